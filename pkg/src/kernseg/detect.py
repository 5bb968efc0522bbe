"""Seeded binary segmentation over kernel-CUSUM statistics."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .gram import GramContext, InputError, as_observations, build_gram, permuted
from .kernels import KernelSpec
from .seeded import SeededIntervalSet, generate

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid tuning configuration."""


def default_bandwidth(T: int, p: int, r: float, c_h: float = 2.0) -> float:
    return c_h * (1.0 / T) ** (1.0 / (2.0 * r + p))


def theory_threshold(T: int, p: int, r: float, c_tau: float = 1.0) -> float:
    return c_tau * T ** (p / (4.0 * r + 2.0 * p)) * math.sqrt(math.log(T))


@dataclass
class DetectionConfig:
    """Tuning of the preliminary detector.

    ``h=None`` means ``c_h * T^(-1/(2r+p))``.  ``tau`` is a number or one of
    ``"theory"`` / ``"permutation"``.
    """

    r: float = 2.0
    h: float | None = None
    tau: float | str = "permutation"
    C_frak: float = 1.0
    rho_override: float | None = None
    min_segment: int = 2
    kernel: str = "gaussian"
    c_h: float = 2.0
    c_tau: float = 1.0
    n_permutations: int = 100
    seed: int | None = 0

    def __post_init__(self):
        if self.r <= 0:
            raise ConfigError("smoothness r must be positive")
        if self.h is not None and not self.h > 0:
            raise ConfigError("bandwidth h must be positive")
        if isinstance(self.tau, str):
            if self.tau not in ("theory", "permutation"):
                raise ConfigError(f"tau must be a number, 'theory' or 'permutation', got {self.tau!r}")
        elif not self.tau > 0:
            raise ConfigError("numeric tau must be positive")
        if self.min_segment < 2:
            raise ConfigError("min_segment must be at least 2")
        if self.rho_override is not None and self.rho_override < 0:
            raise ConfigError("rho_override must be non-negative")

    def bandwidth(self, T: int, p: int) -> float:
        return self.h if self.h is not None else default_bandwidth(T, p, self.r, self.c_h)

    def kernel_spec(self, T: int, p: int) -> KernelSpec:
        return KernelSpec(self.kernel, self.bandwidth(T, p), p)


@dataclass
class ChangePointSet:
    """Sorted change-point estimates; ``t`` is the last index before a change."""

    estimates: list[int]
    T: int
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.estimates = sorted(int(x) for x in self.estimates)
        if any(b <= a for a, b in zip(self.estimates, self.estimates[1:])):
            raise InputError("change points must be strictly increasing")
        if self.estimates and not (1 <= self.estimates[0] and self.estimates[-1] <= self.T):
            raise InputError("change points must lie within [1, T]")

    @property
    def K_hat(self) -> int:
        return len(self.estimates)

    def augmented(self) -> list[int]:
        """Estimates with the boundary convention ``1`` and ``T + 1`` attached."""
        return [1] + self.estimates + [self.T + 1]

    def min_spacing(self) -> int:
        pts = [0] + self.estimates + [self.T]
        return min(b - a for a, b in zip(pts, pts[1:]))


def trimming(T: int, h: float, p: int) -> float:
    return math.log(T) * h ** (-p)


def _resolve_rho(T: int, spec: KernelSpec, cfg: DetectionConfig, diag: dict) -> float | None:
    if cfg.rho_override is not None:
        rho = float(cfg.rho_override)
        if rho >= T / 2:
            diag["warning"] = "trimming exhausts sample"
            return None
        return rho
    rho = trimming(T, spec.h, spec.p)
    if 2 * rho >= T:
        capped = float(T // 10)
        log.warning("trimming rho=%.3f disables every interval; capping at %g", rho, capped)
        diag["rho_capped_from"] = rho
        return capped
    return rho


@dataclass
class _Scan:
    starts: np.ndarray
    ends: np.ndarray
    best_t: np.ndarray
    best_v: np.ndarray


def scan_all(ctx: GramContext, sis: SeededIntervalSet, rho: float) -> _Scan:
    bt, bv = _backend.core.scan_intervals(ctx.P, sis.starts, sis.ends, float(rho), ctx.tie_tol())
    return _Scan(sis.starts, sis.ends, bt, bv)


def _segment(scan: _Scan, tau: float, min_segment: int) -> list[int]:
    found = []
    stack = [(0, int(scan.ends.max()))]
    while stack:
        s, e = stack.pop()
        if e - s < min_segment:
            continue
        inside = (scan.starts >= s) & (scan.ends <= e) & (scan.best_t >= 0)
        if not inside.any():
            continue
        vals = np.where(inside, scan.best_v, -1.0)
        i = int(np.argmax(vals))
        if vals[i] <= tau:
            continue
        b = int(scan.best_t[i])
        found.append(b)
        stack.append((s, b))
        stack.append((b + 1, e))
    return sorted(found)


def max_statistic(ctx: GramContext, sis: SeededIntervalSet, rho: float) -> float:
    """Largest interval statistic over the whole seeded collection."""
    scan = scan_all(ctx, sis, rho)
    return max(0.0, float(scan.best_v.max()))


def select_threshold(obs, cfg: DetectionConfig, method: str = "permutation", *,
                     ctx: GramContext | None = None, rng=None) -> float:
    """Detection threshold by the theoretical rate or by permutation calibration.

    ``permutation`` reruns the seeded scan on random time permutations of the
    sample and returns the ``1 - 1/T`` quantile of the maximal statistic.
    """
    X = as_observations(obs, min_rows=4)
    T, p = X.shape
    if method == "theory":
        return theory_threshold(T, p, cfg.r, cfg.c_tau)
    if method != "permutation":
        raise ConfigError(f"unknown threshold method {method!r}")
    if cfg.n_permutations < 10:
        raise ConfigError("permutation calibration needs at least 10 permutations")
    spec = cfg.kernel_spec(T, p)
    if ctx is None:
        ctx = build_gram(X, spec)
    rho = _resolve_rho(T, spec, cfg, {})
    if rho is None:
        return math.inf
    sis = generate(T, cfg.C_frak)
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    stats = np.empty(cfg.n_permutations)
    for b in range(cfg.n_permutations):
        stats[b] = max_statistic(permuted(ctx, rng.permutation(T)), sis, rho)
    return float(np.quantile(stats, 1.0 - 1.0 / T))


def detect(obs, cfg: DetectionConfig | None = None, *, ctx: GramContext | None = None) -> ChangePointSet:
    """Preliminary change-point estimates by seeded binary segmentation.

    Every seeded interval is scanned once for its best split; the recursion
    then repeatedly takes the strongest interval inside the current span,
    records its split ``b`` if it beats the threshold and recurses on
    ``(s, b]`` and ``(b + 1, e]``.
    """
    cfg = cfg or DetectionConfig()
    X = as_observations(obs, min_rows=4)
    T, p = X.shape
    spec = cfg.kernel_spec(T, p)
    diag = {"h": spec.h}
    if ctx is None:
        ctx = build_gram(X, spec)
    rho = _resolve_rho(T, spec, cfg, diag)
    diag["rho"] = rho
    if rho is None:
        return ChangePointSet([], T, diag)
    if isinstance(cfg.tau, str):
        tau = select_threshold(X, cfg, cfg.tau, ctx=ctx)
    else:
        tau = float(cfg.tau)
    diag["tau"] = tau
    sis = generate(T, cfg.C_frak)
    scan = scan_all(ctx, sis, rho)
    return ChangePointSet(_segment(scan, tau, cfg.min_segment), T, diag)
