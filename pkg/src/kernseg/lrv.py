"""Block-type long-run variance of the projection series around each change point."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .gram import as_observations, build_gram
from .kernels import KernelSpec
from .refine import RefinedEstimate

log = logging.getLogger(__name__)


@dataclass
class LrvEstimate:
    k: int
    sigma2_inf: float
    R: int
    S: int
    y_series: np.ndarray
    kappa_h1: float = 0.0


def default_R(windows) -> int:
    """``floor(max window length ** 0.6)``, at least 2."""
    longest = max(e - s for s, e in windows)
    return max(2, int(math.floor(longest ** 0.6 + 1e-9)))


def block_lrv(y, R: int) -> tuple[float, int]:
    """Mean of squared normalised sums over ``R`` contiguous blocks of ``y``.

    Blocks have length ``S = len(y) // R`` and start at the beginning of the
    series; a remainder shorter than ``S`` is ignored.
    """
    y = np.asarray(y, dtype=float)
    if R < 2:
        raise ValueError("need at least two blocks")
    S = y.shape[0] // R
    if S < 2:
        raise ValueError(f"series of length {y.shape[0]} too short for {R} blocks")
    sums = y[:R * S].reshape(R, S).sum(axis=1) / math.sqrt(S)
    return float(np.mean(sums ** 2)), S


def projection_series(X: np.ndarray, est: RefinedEstimate, r: float,
                      kernel: str = "gaussian") -> tuple[np.ndarray, float]:
    """Centred increments of the refinement objective, projected on the jump.

    At bandwidth ``h1`` the side means of the window split at ``eta_tilde``
    give the jump ``d = mean_left - mean_right``.  Each bump is centred by the
    leave-one-out mean of its own side and mapped to ``2 <F_t - m_t, d>``,
    the fluctuation of one step of the objective; the series is scaled by
    ``||d||^(p/(2r) - 1)`` and centred within each side.  Returns the series
    and ``||d||``.
    """
    s, e = est.window
    p = X.shape[1]
    ctx = build_gram(X[s:e], KernelSpec(kernel, est.h1, p))
    G = ctx.G
    m = est.eta_tilde - s
    n = e - s
    nl, nr = m, n - m
    jump_sq = (ctx.cblock(0, m, 0, m) / nl ** 2 - 2.0 * ctx.cblock(0, m, m, n) / (nl * nr)
               + ctx.cblock(m, n, m, n) / nr ** 2)
    jump = math.sqrt(max(jump_sq, 0.0))
    proj = G[:, :m].sum(1) / nl - G[:, m:].sum(1) / nr
    y = np.empty(n)
    for lo, hi, cnt in ((0, m, nl), (m, n, nr)):
        seg = proj[lo:hi]
        if cnt > 1:
            y[lo:hi] = seg - (seg.sum() - seg) / (cnt - 1)
        else:
            y[lo:hi] = 0.0
        y[lo:hi] -= y[lo:hi].mean()
    if jump == 0.0:
        return np.zeros(n), 0.0
    return 2.0 * jump ** (p / (2.0 * r) - 1.0) * y, jump


def estimate_lrv(obs, refined: list[RefinedEstimate], R: int, r: float,
                 kernel: str = "gaussian") -> list[LrvEstimate]:
    """Long-run variance for every refined change point with a usable window.

    Flagged estimates and windows shorter than ``2 R`` are skipped with a
    log message.
    """
    X = as_observations(obs)
    out = []
    for est in refined:
        s, e = est.window
        if est.flag is not None or est.h1 is None:
            log.info("skipping change point %d: %s", est.k, est.flag)
            continue
        if e - s < 2 * R:
            log.info("skipping change point %d: window (%d, %d] shorter than 2R=%d", est.k, s, e, 2 * R)
            continue
        y, jump = projection_series(X, est, r, kernel)
        sigma2, S = block_lrv(y, R)
        out.append(LrvEstimate(est.k, sigma2, R, S, y, jump))
    return out
