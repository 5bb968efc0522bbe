"""Multivariate nonparametric change-point localization and inference.

Kernel-CUSUM statistics over seeded intervals give preliminary estimates,
a local least-squares step refines them, and a block long-run variance with
the two-sided Brownian argmin law gives confidence intervals.
"""

from ._backend import BACKEND
from .detect import ChangePointSet, ConfigError, DetectionConfig, detect, select_threshold
from .gram import GramContext, InputError, build_gram, cusum_argmax, cusum_norm, segment_mean_sq_dist
from .inference import (SCHEMA_VERSION, ConfidenceInterval, QuantileTable, confidence_interval,
                        simulate_standard_quantiles)
from .kernels import KernelError, KernelSpec, cubature_l2_norm, kernel_value, pairwise_l2_inner
from .lrv import LrvEstimate, block_lrv, default_R, estimate_lrv
from .pipeline import InferenceResult, InferenceSettings, run_inference
from .refine import RefinedEstimate, estimate_jump, refine, refinement_intervals
from .seeded import SeededIntervalSet, generate as seeded_intervals
from .simlab import EvalReport, LabeledSeries, ScenarioSpec, generate_scenario, hausdorff, run_study

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ChangePointSet", "ConfigError", "DetectionConfig", "detect", "select_threshold",
    "GramContext", "InputError", "build_gram", "cusum_argmax", "cusum_norm", "segment_mean_sq_dist",
    "SCHEMA_VERSION", "ConfidenceInterval", "QuantileTable", "confidence_interval",
    "simulate_standard_quantiles", "KernelError", "KernelSpec", "cubature_l2_norm", "kernel_value",
    "pairwise_l2_inner", "LrvEstimate", "block_lrv", "default_R", "estimate_lrv",
    "InferenceResult", "InferenceSettings", "run_inference", "RefinedEstimate", "estimate_jump",
    "refine", "refinement_intervals", "SeededIntervalSet", "seeded_intervals", "EvalReport",
    "LabeledSeries", "ScenarioSpec", "generate_scenario", "hausdorff", "run_study",
]
