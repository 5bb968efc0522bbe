"""Local refinement of preliminary change points and jump-size estimation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detect import ChangePointSet, DetectionConfig
from .gram import InputError, as_observations, build_gram, segment_mean_sq_dists
from .kernels import KernelSpec, cross_gram

DEFAULT_H_TILDE = 0.05
DEFAULT_C_KAPPA = 2.0


@dataclass
class RefinedEstimate:
    k: int
    eta_hat: int
    eta_tilde: int
    kappa_hat: float
    window: tuple[int, int]
    h1: float | None
    h_tilde: float
    c_kappa: float
    flag: str | None = None


def refinement_intervals(prelim: ChangePointSet) -> list[tuple[int, int]]:
    """Windows ``(s_k, e_k]`` reaching nine tenths of the way to each neighbour.

    Neighbours use the boundary convention 1 and T + 1; ``s_k`` is rounded
    down, ``e_k`` up and then truncated at T.
    """
    pts = prelim.augmented()
    out = []
    for k in range(1, len(pts) - 1):
        s = (9 * pts[k - 1] + pts[k]) // 10
        e = -(-(9 * pts[k + 1] + pts[k]) // 10)
        out.append((s, min(e, prelim.T)))
    return out


def _block_sum(spec: KernelSpec, A: np.ndarray, B: np.ndarray, chunk: int = 2048) -> float:
    total = 0.0
    for lo in range(0, A.shape[0], chunk):
        total += float(cross_gram(spec, A[lo:lo + chunk], B).sum())
    return total


def mean_difference_norm(spec: KernelSpec, left: np.ndarray, right: np.ndarray) -> float:
    """``|| mean_i K_h(. - left_i) - mean_j K_h(. - right_j) ||_2``."""
    nl, nr = left.shape[0], right.shape[0]
    if nl == 0 or nr == 0:
        raise InputError("jump size needs two non-empty segments")
    sll = _block_sum(spec, left, left)
    srr = _block_sum(spec, right, right)
    slr = _block_sum(spec, left, right)
    val = sll / nl ** 2 - 2.0 * slr / (nl * nr) + srr / nr ** 2
    return float(np.sqrt(max(val, 0.0)))


def estimate_jump(obs, prelim: ChangePointSet, h_tilde: float, k: int,
                  kernel: str = "gaussian") -> float:
    """Jump size at the ``k``-th estimate (1-based).

    The normalised CUSUM at ``eta_k`` over its neighbouring estimates reduces
    to the L2 distance between the mean kernel bumps of the two adjacent
    segments; segments are bounded by the neighbouring estimates, or by 0 and
    T at the ends of the sample.
    """
    X = as_observations(obs)
    if not 1 <= k <= prelim.K_hat:
        raise InputError(f"k must lie in 1..{prelim.K_hat}, got {k}")
    pts = [0] + prelim.estimates + [prelim.T]
    a, b, c = pts[k - 1], pts[k], pts[k + 1]
    if not (a < b < c):
        raise InputError("degenerate segment next to change point")
    spec = KernelSpec(kernel, h_tilde, X.shape[1])
    return mean_difference_norm(spec, X[a:b], X[b:c])


def refinement_objective(obs, s: int, e: int, split: int, h1: float,
                         kernel: str = "gaussian", means: str = "fixed") -> np.ndarray:
    """Least-squares objective over candidates ``eta = s+1 .. e-1``.

    With ``means="fixed"`` the two segment means are those of ``(s, split]``
    and ``(split, e]``; ``"candidate"`` recomputes them at every ``eta``.
    """
    X = as_observations(obs)
    if not (0 <= s < split < e <= X.shape[0]):
        raise InputError(f"need 0 <= s < split < e <= T, got s={s}, split={split}, e={e}")
    if e - s < 2:
        raise InputError("window too short")
    ctx = build_gram(X[s:e], KernelSpec(kernel, h1, X.shape[1]))
    n = e - s
    m = split - s
    if means == "fixed":
        dl = segment_mean_sq_dists(ctx, 0, m, 1, n)
        dr = segment_mean_sq_dists(ctx, m, n, 1, n)
        cl = np.cumsum(dl)
        cr = np.cumsum(dr[::-1])[::-1]
        # Q(eta) = sum_{t<=eta} dl + sum_{t>eta} dr for eta = 1..n-1 (local)
        return cl[:-1] + cr[1:]
    if means == "candidate":
        eta = np.arange(1, n)
        P = ctx.P
        total_diag = np.cumsum(ctx.diag - ctx.offset)
        left = total_diag[eta - 1] - P[eta, eta] / eta
        right_blk = P[n, n] - P[eta, n] - P[n, eta] + P[eta, eta]
        right = (total_diag[-1] - total_diag[eta - 1]) - right_blk / (n - eta)
        return left + right
    raise InputError(f"means must be 'fixed' or 'candidate', got {means!r}")


def _argmin_first(q: np.ndarray) -> int:
    tol = 1e-10 * max(1.0, float(np.abs(q).max()))
    return int(np.argmax(q <= q.min() + tol))


def refine(obs, prelim: ChangePointSet, cfg: DetectionConfig | None = None,
           c_kappa: float = DEFAULT_C_KAPPA, h_tilde: float = DEFAULT_H_TILDE,
           means: str = "fixed") -> list[RefinedEstimate]:
    """Refine every preliminary estimate inside its window.

    The jump size is estimated at bandwidth ``h_tilde`` and sets the local
    bandwidth ``h1 = c_kappa * kappa_hat^(1/r)``.  A zero jump size leaves the
    preliminary estimate in place and flags the record.
    """
    cfg = cfg or DetectionConfig()
    X = as_observations(obs)
    out = []
    for k, (s, e) in enumerate(refinement_intervals(prelim), start=1):
        eta_hat = prelim.estimates[k - 1]
        kappa = estimate_jump(X, prelim, h_tilde, k, cfg.kernel)
        if kappa <= 0.0 or e - s < 2:
            out.append(RefinedEstimate(k, eta_hat, eta_hat, kappa, (s, e), None, h_tilde,
                                       c_kappa, flag="zero jump" if kappa <= 0 else "short window"))
            continue
        h1 = c_kappa * kappa ** (1.0 / cfg.r)
        split = min(max(eta_hat, s + 1), e - 1)
        q = refinement_objective(X, s, e, split, h1, cfg.kernel, means)
        eta = s + 1 + _argmin_first(q)
        out.append(RefinedEstimate(k, eta_hat, eta, kappa, (s, e), h1, h_tilde, c_kappa))
    return out
