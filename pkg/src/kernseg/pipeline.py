"""End-to-end run: detect, refine, long-run variance, confidence intervals."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .detect import ChangePointSet, DetectionConfig, detect
from .gram import as_observations
from .inference import ConfidenceInterval, QuantileTable, confidence_interval
from .lrv import default_R, estimate_lrv
from .refine import DEFAULT_C_KAPPA, DEFAULT_H_TILDE, RefinedEstimate, refine, refinement_intervals

log = logging.getLogger(__name__)


@dataclass
class InferenceSettings:
    alphas: tuple = (0.05,)
    c_kappa: float = DEFAULT_C_KAPPA
    h_tilde: float = DEFAULT_H_TILDE
    means: str = "fixed"
    R: int | None = None


@dataclass
class ChangePointInference:
    k: int
    eta_hat: int
    eta_tilde: int
    kappa_hat: float
    kappa_h1: float | None
    h1: float | None
    window: tuple[int, int]
    sigma2_inf: float | None
    R: int | None
    S: int | None
    intervals: dict = field(default_factory=dict)
    flag: str | None = None


@dataclass
class InferenceResult:
    prelim: ChangePointSet
    refined: list[RefinedEstimate]
    points: list[ChangePointInference]
    settings: InferenceSettings


def run_inference(obs, cfg: DetectionConfig | None = None, table: QuantileTable | None = None,
                  settings: InferenceSettings | None = None,
                  prelim: ChangePointSet | None = None) -> InferenceResult:
    """Detect (unless ``prelim`` is given), refine and attach intervals.

    The interval for change point ``k`` is scaled by the jump measured at the
    refinement bandwidth ``h1`` (``kappa_h1``), the same quantity that sets
    the drift of the refinement objective.  Without a quantile table only the
    point estimates and variances are returned.
    """
    cfg = cfg or DetectionConfig()
    settings = settings or InferenceSettings()
    X = as_observations(obs, min_rows=4)
    T, p = X.shape
    if prelim is None:
        prelim = detect(X, cfg)
    if prelim.K_hat == 0:
        return InferenceResult(prelim, [], [], settings)
    refined = refine(X, prelim, cfg, settings.c_kappa, settings.h_tilde, settings.means)
    R = settings.R or default_R(refinement_intervals(prelim))
    lrvs = {v.k: v for v in estimate_lrv(X, refined, R, cfg.r, cfg.kernel)}
    points = []
    for est in refined:
        v = lrvs.get(est.k)
        pt = ChangePointInference(est.k, est.eta_hat, est.eta_tilde, est.kappa_hat,
                                  v.kappa_h1 if v else None, est.h1, est.window,
                                  v.sigma2_inf if v else None, v.R if v else None,
                                  v.S if v else None, flag=est.flag)
        if v is None:
            pt.flag = pt.flag or "window too short for long-run variance"
        elif v.kappa_h1 <= 0.0:
            pt.flag = "zero jump at refinement bandwidth"
        elif table is not None:
            for a in settings.alphas:
                ci: ConfidenceInterval = confidence_interval(
                    est.eta_tilde, v.kappa_h1, v.sigma2_inf, p, cfg.r, a, table, T, est.k)
                pt.intervals[float(a)] = ci
                if ci.flag:
                    pt.flag = ci.flag
        points.append(pt)
    return InferenceResult(prelim, refined, points, settings)
