"""Kernel families, point evaluation and exact L2 inner products of kernel bumps.

Every L2 functional used by the detector is a quadratic form in the bumps
``K_h(. - X_t)``, so all that is ever needed is the pairwise integral

    <K_h(. - a), K_h(. - b)> = int K_h(x - a) K_h(x - b) dx

which has a closed form for each supported family.  The numeric cubature
routine at the bottom of this module is an independent oracle for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FAMILIES = ("gaussian", "uniform", "epanechnikov")


class KernelError(ValueError):
    """Invalid kernel configuration or input of the wrong shape."""


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family with bandwidth ``h`` in ``p`` dimensions.

    The uniform and Epanechnikov families are coordinate products of the
    one-dimensional kernels on ``[-1, 1]``.
    """

    family: str = "gaussian"
    h: float = 1.0
    p: int = 1

    def __post_init__(self):
        family = self.family.lower().replace("-product", "")
        if family not in FAMILIES:
            raise KernelError(f"unsupported kernel family {self.family!r}; choose from {FAMILIES}")
        object.__setattr__(self, "family", family)
        if not (self.h > 0 and math.isfinite(self.h)):
            raise KernelError(f"bandwidth must be positive and finite, got {self.h}")
        if int(self.p) != self.p or self.p < 1:
            raise KernelError(f"dimension must be a positive integer, got {self.p}")
        object.__setattr__(self, "p", int(self.p))

    def with_bandwidth(self, h: float) -> "KernelSpec":
        return KernelSpec(self.family, h, self.p)


def _profile_1d(family: str, u: np.ndarray) -> np.ndarray:
    if family == "gaussian":
        return np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
    inside = np.abs(u) <= 1.0
    if family == "uniform":
        return np.where(inside, 0.5, 0.0)
    return np.where(inside, 0.75 * (1.0 - u * u), 0.0)


def _conv_1d(family: str, d: np.ndarray) -> np.ndarray:
    """Self-convolution of the unit-bandwidth 1-d kernel at lag ``d``."""
    d = np.abs(d)
    if family == "gaussian":
        return np.exp(-0.25 * d * d) / math.sqrt(4.0 * math.pi)
    inside = d <= 2.0
    if family == "uniform":
        return np.where(inside, (2.0 - d) / 4.0, 0.0)
    dd = np.minimum(d, 2.0)
    return np.where(inside, 3.0 / 160.0 * (2.0 - dd) ** 3 * (dd * dd + 6.0 * dd + 4.0), 0.0)


def _check_points(spec: KernelSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (spec.p,) and not (spec.p == 1 and x.ndim == 0):
        raise KernelError(f"expected points of dimension {spec.p}, got shape {x.shape}")
    return x.reshape(x.shape[:-1] + (spec.p,)) if x.ndim else x.reshape(1)


def kernel_value(spec: KernelSpec, x) -> float | np.ndarray:
    """Evaluate ``K_h(x) = h^-p K(x / h)``.

    ``x`` has trailing dimension ``p``; leading dimensions are broadcast and
    a scalar is returned for a single point.
    """
    x = _check_points(spec, x)
    u = x / spec.h
    if spec.family == "gaussian":
        val = np.exp(-0.5 * np.sum(u * u, axis=-1)) / (2.0 * math.pi) ** (spec.p / 2)
    else:
        val = np.prod(_profile_1d(spec.family, u), axis=-1)
    val = val / spec.h ** spec.p
    return float(val) if np.ndim(val) == 0 else val


def pairwise_l2_inner(spec: KernelSpec, a, b) -> float:
    """Exact ``int K_h(x - a) K_h(x - b) dx``."""
    a = _check_points(spec, a)
    b = _check_points(spec, b)
    return float(cross_gram(spec, a.reshape(1, -1), b.reshape(1, -1))[0, 0])


def cross_gram(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix of pairwise L2 inner products between bumps centred at rows of A and B."""
    A = np.asarray(A, dtype=float).reshape(-1, spec.p) / spec.h
    B = np.asarray(B, dtype=float).reshape(-1, spec.p) / spec.h
    scale = spec.h ** (-spec.p)
    if spec.family == "gaussian":
        sq = np.zeros((A.shape[0], B.shape[0]))
        for j in range(spec.p):
            sq += (A[:, j][:, None] - B[:, j][None, :]) ** 2
        return scale * (4.0 * math.pi) ** (-spec.p / 2) * np.exp(-0.25 * sq)
    out = np.ones((A.shape[0], B.shape[0]))
    for j in range(spec.p):
        out *= _conv_1d(spec.family, A[:, j][:, None] - B[:, j][None, :])
    return scale * out


def self_inner(spec: KernelSpec) -> float:
    """``||K_h||_2^2``, the common diagonal of every Gram matrix."""
    return spec.h ** (-spec.p) * float(_conv_1d(spec.family, np.zeros(1))[0]) ** spec.p


@dataclass
class CubatureResult:
    value: float
    error: float
    converged: bool
    evaluations: int


def cubature_l2_norm(spec: KernelSpec, centers, weights, tol: float = 1e-7,
                     budget: int = 100_000) -> CubatureResult:
    """Numerically integrate ``||sum_i w_i K_h(. - c_i)||_2`` by adaptive cubature.

    The squared mixture is integrated over a box padded by the kernel support
    (eight bandwidths for the Gaussian) using Gauss-Kronrod panels in one
    dimension and the Genz-Malik rule otherwise.  When the evaluation budget
    runs out the best estimate is returned with ``converged=False``.
    """
    from scipy.integrate import cubature

    centers = np.asarray(centers, dtype=float).reshape(-1, spec.p)
    weights = np.asarray(weights, dtype=float).ravel()
    if centers.shape[0] != weights.shape[0] or weights.size == 0:
        raise KernelError("centers and weights must be non-empty and of equal length")
    if tol <= 0:
        raise KernelError("tol must be positive")

    pad = (8.0 if spec.family == "gaussian" else 1.0) * spec.h
    lo = centers.min(0) - pad
    hi = centers.max(0) + pad

    def integrand(x):
        diff = x[:, None, :] - centers[None, :, :]
        mix = kernel_value(spec, diff) @ weights
        return mix * mix

    p = spec.p
    if p == 1:
        rule, per_region = "gk21", 21
    else:
        rule, per_region = "genz-malik", 2 ** p + 2 * p * p + 2 * p + 1
    max_sub = max(1, budget // per_region - 1)
    # squared-norm tolerance; the root halves the relative error
    res = cubature(integrand, lo, hi, rule=rule, rtol=tol, atol=1e-300,
                   max_subdivisions=max_sub)
    est = max(float(res.estimate), 0.0)
    value = math.sqrt(est)
    err = float(res.error) / (2.0 * value) if value > 0 else math.sqrt(float(res.error))
    return CubatureResult(value, err, res.status == "converged",
                          (res.subdivisions + 1) * per_region)
