# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for the brute-force Gowers norm sum.

Walks the full (h_1, ..., h_k, x) grid with plain nested loops, maintaining a
stack of derived functions so each prefix of derivatives is computed once.
Cost is O(N^{k+1}) complex multiply-adds for N = p^n.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef double complex _recurse(double complex[:, ::1] stack,
                             const int[:, ::1] table,
                             int level, int k, int N) noexcept nogil:
    cdef double complex total = 0
    cdef int h, x
    if level == k:
        for x in range(N):
            total = total + stack[k, x]
        return total
    for h in range(N):
        for x in range(N):
            stack[level + 1, x] = stack[level, x].conjugate() * stack[level, table[x, h]]
        total = total + _recurse(stack, table, level + 1, k, N)
    return total


def direct_norm_sum(values, add_table, int k):
    """Sum of D_{h_k} ... D_{h_1} f(x) over all h_1, ..., h_k, x in F_p^n."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] f = np.ascontiguousarray(values, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] table = np.ascontiguousarray(add_table, dtype=np.int32)
    cdef int N = f.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] stack = np.empty((k + 1, N), dtype=np.complex128)
    stack[0, :] = f
    cdef double complex[:, ::1] stack_view = stack
    cdef const int[:, ::1] table_view = table
    cdef double complex total
    with nogil:
        total = _recurse(stack_view, table_view, 0, k, N)
    return complex(total)
