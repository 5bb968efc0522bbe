"""Pure numpy implementations of the hot kernels.

Used when the compiled ``_core`` extension is unavailable, and as the
reference the extension is tested against.
"""

import math

import numpy as np


def block_prefix(G):
    """(T+1) x (T+1) array with ``P[a, b] = sum(G[:a, :b])``."""
    T = G.shape[0]
    P = np.zeros((T + 1, T + 1))
    np.cumsum(G, axis=0, out=P[1:, 1:])
    np.cumsum(P[1:, 1:], axis=1, out=P[1:, 1:])
    return P


def candidate_range(s, e, rho):
    """Integer split points ``t`` with ``s + rho <= t <= e - rho`` and ``s < t < e``."""
    lo = max(s + 1, int(math.ceil(s + rho - 1e-9)))
    hi = min(e - 1, int(math.floor(e - rho + 1e-9)))
    return lo, hi


def cusum_sq_profile(P, s, lo, hi, e):
    """Squared CUSUM norms for split points ``lo..hi`` of the interval (s, e]."""
    t = np.arange(lo, hi + 1)
    n = e - s
    nl = t - s
    nr = e - t
    Ptt = P[t, t]
    s11 = Ptt - P[s, t] - P[t, s] + P[s, s]
    s22 = P[e, e] - P[t, e] - P[e, t] + Ptt
    s12 = P[t, e] - P[s, e] - Ptt + P[s, t]
    a2 = nr / (n * nl)
    b2 = nl / (n * nr)
    ab = 1.0 / n
    return a2 * s11 - 2.0 * ab * s12 + b2 * s22


def scan_intervals(P, starts, ends, rho, tie_tol=0.0):
    """Best split and its CUSUM norm for every interval (starts[i], ends[i]].

    Intervals with ``e - s <= 2 rho`` or without an admissible split get
    index -1 and value -1.  Squared norms within ``tie_tol`` of the maximum
    count as ties, resolved to the smallest split point.
    """
    starts = np.asarray(starts, dtype=np.int64)
    ends = np.asarray(ends, dtype=np.int64)
    m = starts.shape[0]
    best_t = np.full(m, -1, dtype=np.int64)
    best_v = np.full(m, -1.0)
    for i in range(m):
        s = int(starts[i])
        e = int(ends[i])
        if e - s <= 2.0 * rho:
            continue
        lo, hi = candidate_range(s, e, rho)
        if hi < lo:
            continue
        prof = cusum_sq_profile(P, s, lo, hi, e)
        j = int(np.argmax(prof >= prof.max() - tie_tol))
        best_t[i] = lo + j
        best_v[i] = math.sqrt(max(prof[j], 0.0))
    return best_t, best_v
