"""Compare the compiled and numpy backends on the brute-force norm sum.

Run:  python3 benchmarks/bench_direct.py
"""

import time

import numpy as np

from gowers import _kernels_py
from gowers.group import get_space

try:
    from gowers import _kernels_c
except ImportError:
    _kernels_c = None

CASES = [(2, 3, 2), (2, 3, 3), (3, 2, 3), (3, 3, 2), (3, 3, 3), (3, 4, 2)]


def time_backend(fn, values, table, k, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(values, table, k)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    rng = np.random.default_rng(0)
    print("%-14s %12s %12s %9s %12s" % ("case", "c (s)", "numpy (s)", "speedup", "gap"))
    for p, n, k in CASES:
        space = get_space(p, n)
        values = np.exp(1j * rng.uniform(0, 2 * np.pi, space.order))
        table = space.add_table
        t_py, r_py = time_backend(_kernels_py.direct_norm_sum, values, table, k)
        if _kernels_c is None:
            print("p=%d n=%d k=%d  compiled kernel unavailable, numpy %.4fs" % (p, n, k, t_py))
            continue
        t_c, r_c = time_backend(_kernels_c.direct_norm_sum, values, table, k)
        gap = abs(r_c - r_py) / space.order ** (k + 1)
        print("p=%d n=%d k=%d  %12.5f %12.5f %8.1fx %12.3g"
              % (p, n, k, t_c, t_py, t_py / t_c if t_c else float("inf"), gap))


if __name__ == "__main__":
    main()
