"""Compare the compiled and numpy backends on the hot kernels.

Run with ``python3 benchmarks/bench_core.py [T ...]``.  Prints the median
wall time of the prefix build and the full seeded scan for each backend and
checks that both return identical splits.
"""

import sys
import timeit

import numpy as np

from kernseg import _backend
from kernseg.detect import trimming
from kernseg.gram import build_gram
from kernseg.kernels import KernelSpec
from kernseg.seeded import generate


def bench(T, p=3, repeat=7):
    rng = np.random.default_rng(0)
    X = rng.standard_normal((T, p))
    h = 2.0 * T ** (-1.0 / (4 + p))
    ctx = build_gram(X, KernelSpec("gaussian", h, p))
    sis = generate(T)
    rho = min(trimming(T, h, p), T // 10)
    out = {}
    for name in ("cython", "python"):
        try:
            _backend.use_backend(name)
        except ImportError:
            print(f"  {name:6s} unavailable")
            continue
        core = _backend.core
        t_prefix = min(timeit.repeat(lambda: core.block_prefix(ctx.G), number=1, repeat=repeat))
        t_scan = min(timeit.repeat(
            lambda: core.scan_intervals(ctx.P, sis.starts, sis.ends, rho, 0.0), number=1, repeat=repeat))
        out[name] = core.scan_intervals(ctx.P, sis.starts, sis.ends, rho, 0.0)
        print(f"  {name:6s} prefix {t_prefix * 1e3:9.3f} ms   scan ({len(sis)} intervals) {t_scan * 1e3:9.3f} ms")
    if len(out) == 2:
        same = np.array_equal(out["cython"][0], out["python"][0])
        close = np.allclose(out["cython"][1], out["python"][1], rtol=1e-10, atol=1e-12)
        print(f"  splits identical: {same}   statistics close: {close}")
    _backend.use_backend("cython" if "cython" in out else "python")


if __name__ == "__main__":
    sizes = [int(a) for a in sys.argv[1:]] or [150, 500, 2000]
    for T in sizes:
        print(f"T={T}")
        bench(T)
