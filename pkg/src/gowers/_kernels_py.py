"""Pure numpy backend for the brute-force Gowers norm sum.

Enumerates the full (h_1, ..., h_k, x) grid like the compiled kernel, but
vectorizes the two innermost loops: for every fixed prefix (h_1, ..., h_{k-1})
it forms the derived function g = D_{h_{k-1}} ... D_{h_1} f once (prefixes are
shared along the recursion) and accumulates the N x N table
conj(g)(x) * g(x + h_k) in one shot.  Same O(N^{k+1}) scalar work, different
loop structure and summation order than the C kernel.
"""

from __future__ import annotations

import numpy as np


def direct_norm_sum(values: np.ndarray, add_table: np.ndarray, k: int) -> complex:
    """Sum of D_{h_k} ... D_{h_1} f(x) over all h_1, ..., h_k, x in F_p^n."""
    f = np.asarray(values, dtype=np.complex128)
    table = np.asarray(add_table)

    def recurse(g: np.ndarray, level: int) -> complex:
        if level == k - 1:
            # innermost two loops at once: sum_{x, h} conj(g)(x) g(x + h)
            return complex(np.sum(np.conj(g)[:, None] * g[table]))
        total = 0.0 + 0.0j
        cg = np.conj(g)
        for h in range(table.shape[0]):
            total += recurse(cg * g[table[:, h]], level + 1)
        return total

    return recurse(f, 0)
