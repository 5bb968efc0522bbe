"""Gram-matrix engine: CUSUM norms and distances to segment means.

Time indices follow the half-open convention ``(s, e]`` with observations
numbered ``1..T``; observation ``t`` is row ``t - 1`` of the data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .kernels import KernelSpec, cross_gram


class InputError(ValueError):
    """Data or index arguments violate a precondition."""


def as_observations(data, min_rows: int = 1) -> np.ndarray:
    """Validate a T x p panel of finite reals; 1-d input is read as p = 1."""
    X = np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[1] < 1:
        raise InputError(f"observations must be a T x p array, got shape {X.shape}")
    if X.shape[0] < min_rows:
        raise InputError(f"need at least {min_rows} observations, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise InputError("observations contain non-finite values")
    return X


@dataclass(frozen=True)
class GramContext:
    """Pairwise kernel inner products of the sample with prefix sums.

    ``G[i, j]`` is the L2 inner product of the bumps at observations i+1 and
    j+1.  The prefix arrays are taken over ``G - offset`` with ``offset`` the
    common diagonal value: ``row_prefix[i, b]`` sums ``G[i, :b] - offset``
    and ``P[a, b]`` sums ``G[:a, :b] - offset``.  Every functional with
    weights summing to zero (CUSUMs, distances to segment means) is
    unchanged by the shift, and identical observations then cancel exactly
    instead of leaving rounding noise.  ``G`` and ``row_prefix`` are dropped
    by a chunked build.
    """

    spec: KernelSpec
    P: np.ndarray
    diag: np.ndarray
    G: np.ndarray | None = None
    row_prefix: np.ndarray | None = None
    X: np.ndarray | None = field(default=None, repr=False)
    offset: float = 0.0

    @property
    def T(self) -> int:
        return self.P.shape[0] - 1

    def cblock(self, a1: int, b1: int, a2: int, b2: int) -> float:
        """Sum of ``G - offset`` over rows (a1, b1] and columns (a2, b2]."""
        P = self.P
        return float(P[b1, b2] - P[a1, b2] - P[b1, a2] + P[a1, a2])

    def block(self, a1: int, b1: int, a2: int, b2: int) -> float:
        """Sum of ``G`` over rows (a1, b1] and columns (a2, b2]."""
        return self.cblock(a1, b1, a2, b2) + self.offset * (b1 - a1) * (b2 - a2)

    def crow_block(self, t: int, a: int, b: int) -> float:
        """``sum_{j in (a, b]} (G[t, j] - offset)`` for 1-based row ``t``."""
        if self.row_prefix is not None:
            return float(self.row_prefix[t - 1, b] - self.row_prefix[t - 1, a])
        row = cross_gram(self.spec, self.X[t - 1:t], self.X[a:b]) - self.offset
        return float(row.sum())

    def row_block(self, t: int, a: int, b: int) -> float:
        """``sum_{j in (a, b]} G[t, j]`` for 1-based row ``t``."""
        return self.crow_block(t, a, b) + self.offset * (b - a)

    def tie_tol(self) -> float:
        """Absolute tolerance under which two squared statistics count as tied."""
        return 1e-12 * self.T * float(self.diag.max())


def build_gram(obs, spec: KernelSpec, chunk: int | None = None) -> GramContext:
    """Build the Gram context of ``obs`` under ``spec``.

    With ``chunk`` set, rows are streamed in blocks of that size into the
    prefix sums and the full matrix is not retained.
    """
    X = as_observations(obs)
    if X.shape[1] != spec.p:
        raise InputError(f"kernel dimension {spec.p} does not match data dimension {X.shape[1]}")
    T = X.shape[0]
    if chunk is None:
        G = cross_gram(spec, X, X)
        offset = float(G[0, 0])
        Gc = G - offset
        P = _backend.core.block_prefix(Gc)
        row_prefix = np.zeros((T, T + 1))
        np.cumsum(Gc, axis=1, out=row_prefix[:, 1:])
        return GramContext(spec, P, np.diag(G).copy(), G, row_prefix, X, offset)
    P = np.zeros((T + 1, T + 1))
    diag = np.empty(T)
    offset = None
    for lo in range(0, T, chunk):
        hi = min(T, lo + chunk)
        rows = cross_gram(spec, X[lo:hi], X)
        diag[lo:hi] = rows[np.arange(hi - lo), np.arange(lo, hi)]
        if offset is None:
            offset = float(diag[0])
        cum_rows = np.cumsum(rows - offset, axis=1)
        P[lo + 1:hi + 1, 1:] = P[lo, 1:] + np.cumsum(cum_rows, axis=0)
    return GramContext(spec, P, diag, None, None, X, offset)


def permuted(ctx: GramContext, perm: np.ndarray) -> GramContext:
    """Context of the time-permuted sample ``X[perm]`` without re-evaluating kernels."""
    if ctx.G is None:
        raise InputError("permutation requires a context that retains G")
    G = np.ascontiguousarray(ctx.G[np.ix_(perm, perm)])
    P = _backend.core.block_prefix(G - ctx.offset)
    return GramContext(ctx.spec, P, ctx.diag[perm], G, None, None, ctx.offset)


def cusum_weights(s: int, t: int, e: int) -> tuple[float, float]:
    """Left and right weights of the CUSUM at split ``t`` of (s, e]."""
    a = math.sqrt((e - t) / ((e - s) * (t - s)))
    b = math.sqrt((t - s) / ((e - s) * (e - t)))
    return a, b


def _check_triplet(ctx: GramContext, s: int, t: int, e: int):
    if not (0 <= s < t < e <= ctx.T):
        raise InputError(f"need 0 <= s < t < e <= T={ctx.T}, got s={s}, t={t}, e={e}")


def cusum_norm(ctx: GramContext, s: int, t: int, e: int) -> float:
    """L2 norm of the kernel CUSUM at split ``t`` of the interval (s, e]."""
    _check_triplet(ctx, s, t, e)
    a, b = cusum_weights(s, t, e)
    s11 = ctx.cblock(s, t, s, t)
    s12 = ctx.cblock(s, t, t, e)
    s22 = ctx.cblock(t, e, t, e)
    val = a * a * s11 - 2.0 * a * b * s12 + b * b * s22
    return math.sqrt(max(val, 0.0))


class IntervalTooShort(InputError):
    """No admissible split remains after trimming."""


def cusum_argmax(ctx: GramContext, s: int, e: int, rho: float) -> tuple[int, float]:
    """Maximising split of the CUSUM over ``s + rho <= t <= e - rho``.

    Raises :class:`IntervalTooShort` when ``e - s <= 2 rho``.
    """
    if not (0 <= s < e <= ctx.T):
        raise InputError(f"need 0 <= s < e <= T={ctx.T}, got s={s}, e={e}")
    t, v = _backend.core.scan_intervals(ctx.P, np.array([s]), np.array([e]), float(rho),
                                        ctx.tie_tol())
    if t[0] < 0:
        raise IntervalTooShort(f"interval ({s}, {e}] too short for trimming rho={rho}")
    return int(t[0]), float(v[0])


def segment_mean_sq_dist(ctx: GramContext, t: int, a: int, b: int) -> float:
    """Squared L2 distance from bump ``t`` to the mean bump over (a, b]."""
    if not (0 <= a < b <= ctx.T) or not (1 <= t <= ctx.T):
        raise InputError(f"need a < b within (0, T] and 1 <= t <= T, got t={t}, a={a}, b={b}")
    n = b - a
    val = (ctx.diag[t - 1] - ctx.offset) - 2.0 / n * ctx.crow_block(t, a, b) + ctx.cblock(a, b, a, b) / (n * n)
    return max(float(val), 0.0)


def segment_mean_sq_dists(ctx: GramContext, a: int, b: int, lo: int, hi: int) -> np.ndarray:
    """Vectorised :func:`segment_mean_sq_dist` for ``t = lo..hi``."""
    if ctx.row_prefix is None:
        return np.array([segment_mean_sq_dist(ctx, t, a, b) for t in range(lo, hi + 1)])
    n = b - a
    rows = np.arange(lo - 1, hi)
    rb = ctx.row_prefix[rows, b] - ctx.row_prefix[rows, a]
    val = (ctx.diag[rows] - ctx.offset) - 2.0 / n * rb + ctx.cblock(a, b, a, b) / (n * n)
    return np.maximum(val, 0.0)
