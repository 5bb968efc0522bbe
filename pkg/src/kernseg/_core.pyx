# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels in ``_core_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, ceil, floor

cnp.import_array()


def block_prefix(double[:, ::1] G):
    cdef Py_ssize_t T = G.shape[0]
    cdef Py_ssize_t i, j
    cdef double row
    P_arr = np.zeros((T + 1, T + 1))
    cdef double[:, ::1] P = P_arr
    for i in range(T):
        row = 0.0
        for j in range(T):
            row += G[i, j]
            P[i + 1, j + 1] = P[i, j + 1] + row
    return P_arr


def scan_intervals(double[:, ::1] P, starts, ends, double rho, double tie_tol=0.0):
    cdef cnp.int64_t[::1] s_arr = np.ascontiguousarray(starts, dtype=np.int64)
    cdef cnp.int64_t[::1] e_arr = np.ascontiguousarray(ends, dtype=np.int64)
    cdef Py_ssize_t m = s_arr.shape[0]
    best_t_arr = np.full(m, -1, dtype=np.int64)
    best_v_arr = np.full(m, -1.0)
    cdef cnp.int64_t[::1] best_t = best_t_arr
    cdef double[::1] best_v = best_v_arr
    cdef Py_ssize_t i, t, s, e, lo, hi, arg
    cdef double n, nl, nr, Ptt, s11, s22, s12, val, best
    for i in range(m):
        s = s_arr[i]
        e = e_arr[i]
        if e - s <= 2.0 * rho:
            continue
        lo = <Py_ssize_t> ceil(s + rho - 1e-9)
        if lo < s + 1:
            lo = s + 1
        hi = <Py_ssize_t> floor(e - rho + 1e-9)
        if hi > e - 1:
            hi = e - 1
        if hi < lo:
            continue
        n = <double> (e - s)
        best = -1.0
        arg = -1
        for t in range(lo, hi + 1):
            nl = <double> (t - s)
            nr = <double> (e - t)
            Ptt = P[t, t]
            s11 = Ptt - P[s, t] - P[t, s] + P[s, s]
            s22 = P[e, e] - P[t, e] - P[e, t] + Ptt
            s12 = P[t, e] - P[s, e] - Ptt + P[s, t]
            val = nr / (n * nl) * s11 - 2.0 / n * s12 + nl / (n * nr) * s22
            if arg < 0 or val > best:
                best = val
                arg = t
        # second pass: smallest t within tie_tol of the maximum
        for t in range(lo, hi + 1):
            nl = <double> (t - s)
            nr = <double> (e - t)
            Ptt = P[t, t]
            s11 = Ptt - P[s, t] - P[t, s] + P[s, s]
            s22 = P[e, e] - P[t, e] - P[e, t] + Ptt
            s12 = P[t, e] - P[s, e] - Ptt + P[s, t]
            val = nr / (n * nl) * s11 - 2.0 / n * s12 + nl / (n * nr) * s22
            if val >= best - tie_tol:
                arg = t
                break
        best_t[i] = arg
        best_v[i] = sqrt(best) if best > 0.0 else 0.0
    return best_t_arr, best_v_arr
