import numpy as np
import pytest

from gowers import _kernels_py
from gowers._backend import BACKEND
from gowers.group import get_space

try:
    from gowers import _kernels_c
except ImportError:
    _kernels_c = None


def reference_sum(values, space, k):
    """Third, fully independent oracle: literal nested iteration, no sharing."""
    import itertools

    total = 0.0 + 0.0j
    N = space.order
    for hs in itertools.product(range(N), repeat=k):
        for x in range(N):
            term = 1.0 + 0.0j
            for bits in itertools.product((0, 1), repeat=k):
                point = x
                for b, h in zip(bits, hs):
                    if b:
                        point = space.add(point, h)
                v = values[point]
                term *= v if sum(bits) % 2 == k % 2 else np.conj(v)
            total += term
    return total


@pytest.mark.parametrize("p,n,k", [(2, 1, 1), (2, 2, 2), (3, 1, 2), (2, 2, 3), (3, 1, 3)])
def test_numpy_backend_matches_literal_enumeration(p, n, k):
    rng = np.random.default_rng(p + n + k)
    space = get_space(p, n)
    values = np.exp(1j * rng.uniform(0, 2 * np.pi, space.order))
    got = _kernels_py.direct_norm_sum(values, space.add_table, k)
    want = reference_sum(values, space, k)
    assert abs(got - want) / space.order ** (k + 1) < 1e-12


@pytest.mark.skipif(_kernels_c is None, reason="compiled kernel not built")
@pytest.mark.parametrize("p,n,k", [(2, 2, 2), (2, 3, 3), (3, 2, 2), (3, 2, 3), (5, 1, 2)])
def test_backends_agree(p, n, k):
    rng = np.random.default_rng(17 * p + n + k)
    space = get_space(p, n)
    values = np.exp(1j * rng.uniform(0, 2 * np.pi, space.order))
    a = _kernels_c.direct_norm_sum(values, space.add_table, k)
    b = _kernels_py.direct_norm_sum(values, space.add_table, k)
    assert abs(a - b) / space.order ** (k + 1) < 1e-12


def test_backend_selected():
    assert BACKEND in ("c", "python")
