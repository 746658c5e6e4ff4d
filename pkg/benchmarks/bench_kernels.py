"""Compare the numba-compiled Numerov kernels with their plain Python versions.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both versions run in the same process on identical inputs; results are
checked for agreement before timings are printed.
"""
import argparse
import time

import numpy as np

from rydpol import _kernels
from rydpol.potential import ReducedPotential
from rydpol.schroedinger import DEFAULT_GRID


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    u = DEFAULT_GRID.points()
    w = ReducedPotential.attractive(5.0)(u)
    h = DEFAULT_GRID.h
    f = w - 0.0
    out_py, out_jit = np.empty_like(f), np.empty_like(f)

    # warm up the compiled versions and check agreement
    _kernels.numerov_even_jit(f, h, out_jit)
    _kernels.numerov_even_py(f, h, out_py)
    assert np.allclose(out_py, out_jit, rtol=1e-12, atol=0)
    e = -10.0
    assert _kernels.count_below_jit(w, e, h) == _kernels.count_below_py(w, e, h)

    rows = [
        ("numerov integration", lambda: _kernels.numerov_even_py(f, h, out_py),
         lambda: _kernels.numerov_even_jit(f, h, out_jit)),
        ("state count", lambda: _kernels.count_below_py(w, e, h),
         lambda: _kernels.count_below_jit(w, e, h)),
    ]
    print(f"grid points: {len(u)}")
    print(f"{'kernel':<22}{'python [ms]':>14}{'numba [ms]':>14}{'speed-up':>12}")
    for name, py, jit in rows:
        tp = best_of(py, args.repeat)
        tj = best_of(jit, max(args.repeat, 10))
        print(f"{name:<22}{tp * 1e3:>14.2f}{tj * 1e3:>14.3f}{tp / tj:>12.0f}")


if __name__ == "__main__":
    main()
