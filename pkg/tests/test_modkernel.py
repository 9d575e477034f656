import itertools

import numpy as np
import pytest

from gowers.modkernel import kernel_mod_prime_power


def brute_force_kernel(matrix, p, m):
    """Oracle: enumerate all vectors mod p^m and keep those annihilated."""
    modulus = p ** m
    A = np.asarray(matrix, dtype=object) % modulus
    rows, cols = A.shape
    out = set()
    for vec in itertools.product(range(modulus), repeat=cols):
        v = np.array(vec, dtype=object)
        if all(int(np.dot(A[i], v)) % modulus == 0 for i in range(rows)):
            out.add(vec)
    return out


def enumerate_kernel(kern):
    return set(tuple(int(c) for c in el) for el in kern)


CASES = [
    (np.array([[2]]), 2, 2),
    (np.array([[0]]), 2, 1),
    (np.array([[1, 1], [1, 1]]), 2, 2),
    (np.array([[2, 4], [6, 2]]), 2, 3),
    (np.array([[3, 6, 0]]), 3, 2),
    (np.array([[1, 2], [3, 4], [5, 6]]), 3, 2),
    (np.array([[4, 2, 6], [2, 0, 4]]), 2, 3),
    (np.array([[9, 3], [3, 9]]), 3, 2),
    (np.array([[5, 10]]), 5, 2),
    (np.array([[0, 0], [0, 0]]), 2, 2),
]


@pytest.mark.parametrize("matrix,p,m", CASES)
def test_kernel_matches_brute_force(matrix, p, m):
    kern = kernel_mod_prime_power(matrix, p, m)
    got = enumerate_kernel(kern)
    want = brute_force_kernel(matrix, p, m)
    assert got == want
    assert kern.count == len(want)
    # count is consistent with the cyclic orders of the generators
    assert kern.count == int(np.prod([p ** e for e in kern.orders], initial=1))


def test_random_matrices_against_brute_force():
    rng = np.random.default_rng(0)
    for trial in range(20):
        p = int(rng.choice([2, 3]))
        m = int(rng.integers(1, 3))
        rows = int(rng.integers(1, 4))
        cols = int(rng.integers(1, 3))
        A = rng.integers(0, p ** m, size=(rows, cols))
        kern = kernel_mod_prime_power(A, p, m)
        assert enumerate_kernel(kern) == brute_force_kernel(A, p, m)


def test_kernel_elements_are_duplicate_free():
    A = np.array([[2, 0], [0, 2]])
    kern = kernel_mod_prime_power(A, 2, 2)
    elements = [tuple(int(c) for c in el) for el in kern]
    assert len(elements) == len(set(elements)) == kern.count


def test_deterministic_sampling():
    A = np.array([[2, 4, 6]])
    kern = kernel_mod_prime_power(A, 2, 3)
    a = [tuple(int(c) for c in kern.sample(np.random.default_rng(42))) for _ in range(5)]
    b = [tuple(int(c) for c in kern.sample(np.random.default_rng(42))) for _ in range(5)]
    assert a == b
    assert all(v in enumerate_kernel(kern) for v in a)
