import itertools

import numpy as np
import pytest

from gowers.errors import CapacityError, ContractError
from gowers.functions import GroupFunction, fourier_transform, random_unit_function
from gowers.group import Character, get_space
from gowers.norms import (NormReport, _finalize, dual_function, gowers_inner_product,
                          gowers_norm_direct, gowers_norm_fast, pairing_with_dual,
                          u2_norm_fourier, vertex_needs_conj)
from gowers.phasepoly import enumerate_phase_polys


def character_function(space, xi):
    table = Character(space, xi).exponent_table()
    return GroupFunction(space, np.exp(2j * np.pi * table / space.p))


def test_u1_is_absolute_mean():
    rng = np.random.default_rng(0)
    s = get_space(3, 2)
    f = random_unit_function(s, rng)
    assert np.isclose(gowers_norm_direct(f, 1).value, abs(f.mean()), atol=1e-12)
    assert np.isclose(gowers_norm_fast(f, 1).value, abs(f.mean()), atol=1e-12)


def test_nontrivial_character_norms():
    s = get_space(3, 2)
    f = character_function(s, 7)
    # the reported value is a 2nd root of the averaged sum, so cancellation
    # error of ~1e-16 in the inner sum surfaces as ~1e-8 here
    assert gowers_norm_direct(f, 1).value < 1e-7
    for k in (2, 3, 4):
        assert abs(gowers_norm_direct(f, k).value - 1.0) < 1e-12
        assert abs(gowers_norm_fast(f, k).value - 1.0) < 1e-12


def test_trivial_character_has_full_u1():
    s = get_space(3, 2)
    f = character_function(s, 0)
    assert np.isclose(gowers_norm_direct(f, 1).value, 1.0)


@pytest.mark.parametrize("p,n,k", [(2, 2, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3), (3, 2, 3)])
def test_direct_and_fast_agree_on_random_functions(p, n, k):
    rng = np.random.default_rng(100 * p + 10 * n + k)
    s = get_space(p, n)
    for _ in range(5):
        f = random_unit_function(s, rng)
        d = gowers_norm_direct(f, k)
        fast = gowers_norm_fast(f, k)
        assert abs(d.value - fast.value) < 1e-10
        assert d.method == "direct"
        assert fast.method == ("fourier" if k == 2 else "recursive")
        assert d.term_count == s.order ** (k + 1)


def test_u2_fourier_identity():
    rng = np.random.default_rng(5)
    s = get_space(3, 2)
    for _ in range(10):
        f = random_unit_function(s, rng)
        fourth = fourier_transform(f).fourth_moment()
        assert abs(gowers_norm_direct(f, 2).inner - fourth) < 1e-10
        assert abs(u2_norm_fourier(f) - gowers_norm_fast(f, 2).value) < 1e-12


def test_norms_bounded_by_one_and_monotone():
    rng = np.random.default_rng(11)
    s = get_space(2, 3)
    for _ in range(20):
        f = random_unit_function(s, rng)
        norms = [gowers_norm_fast(f, k).value for k in (1, 2, 3, 4)]
        assert all(v <= 1 + 1e-9 for v in norms)
        for lo, hi in zip(norms, norms[1:]):
            assert lo <= hi + 1e-9


def test_shift_and_conjugation_invariance():
    rng = np.random.default_rng(2)
    s = get_space(3, 2)
    f = random_unit_function(s, rng)
    base = gowers_norm_fast(f, 3).value
    assert abs(gowers_norm_fast(f.shift(4), 3).value - base) < 1e-10
    assert abs(gowers_norm_fast(f.conj(), 3).value - base) < 1e-10
    # modulation by a character is invisible to U^k for k >= 2
    chi = character_function(s, 5)
    assert abs(gowers_norm_fast(f * chi, 2).value - gowers_norm_fast(f, 2).value) < 1e-10


def test_seminorm_scaling():
    rng = np.random.default_rng(23)
    s = get_space(2, 2)
    f = random_unit_function(s, rng)
    half = GroupFunction(s, 0.5 * f.values)
    assert np.isclose(gowers_norm_fast(half, 2).value,
                      0.5 * gowers_norm_fast(f, 2).value, atol=1e-10)


def test_norm_one_iff_phase_polynomial():
    # both directions on a small cell: enumerated phases hit 1, others stay below
    fam = enumerate_phase_polys(2, 2, 2, 1)
    for phi in fam:
        assert abs(gowers_norm_fast(phi.to_function(), 2).value - 1.0) < 1e-9
    rng = np.random.default_rng(4)
    s = get_space(2, 2)
    found_below = 0
    for _ in range(25):
        f = random_unit_function(s, rng)
        if gowers_norm_fast(f, 2).value < 1 - 1e-6:
            found_below += 1
    assert found_below == 25  # random phases are almost surely not polynomial


def test_gowers_inner_product_diagonal_and_csg():
    rng = np.random.default_rng(9)
    s = get_space(2, 3)
    k = 2
    f = random_unit_function(s, rng)
    diag = gowers_inner_product([f] * 4, k)
    assert abs(diag.imag) < 1e-10
    assert abs(diag.real - gowers_norm_direct(f, k).inner) < 1e-10
    for _ in range(20):
        fs = [random_unit_function(s, rng) for _ in range(1 << k)]
        ip = gowers_inner_product(fs, k)
        bound = np.prod([gowers_norm_fast(g, k).value for g in fs])
        assert abs(ip) <= bound + 1e-8


def test_gowers_inner_product_validates_arity():
    s = get_space(2, 2)
    f = random_unit_function(s, np.random.default_rng(0))
    with pytest.raises(ContractError):
        gowers_inner_product([f, f, f], 2)


def test_dual_function_pairing_and_fixed_points():
    rng = np.random.default_rng(13)
    s = get_space(3, 2)
    for k in (1, 2, 3):
        f = random_unit_function(s, rng)
        assert abs(pairing_with_dual(f, k).real - gowers_norm_direct(f, k).inner) < 1e-10
    # phases of degree < k are fixed points of D_k
    for phi in enumerate_phase_polys(3, 2, 2, 1):
        d = dual_function(phi.to_function(), 2)
        assert np.max(np.abs(d.values - phi.to_function().values)) < 1e-10


def test_dual_function_closed_form_small_case():
    # independent oracle: literal closed-form evaluation at k=2 on F_2^2
    rng = np.random.default_rng(21)
    s = get_space(2, 2)
    f = random_unit_function(s, rng)
    want = np.zeros(s.order, dtype=np.complex128)
    for x in range(s.order):
        acc = 0.0 + 0.0j
        for h1 in range(s.order):
            for h2 in range(s.order):
                acc += (f.values[s.add(x, h1)] * f.values[s.add(x, h2)]
                        * np.conj(f.values[s.add(s.add(x, h1), h2)]))
        want[x] = acc / s.order ** 2
    got = dual_function(f, 2)
    assert np.allclose(got.values, want, atol=1e-12)


def test_vertex_sign_convention():
    # k = 2: vertices 0b00 and 0b11 have sign +, the mixed ones -
    assert not vertex_needs_conj(0b00, 2)
    assert vertex_needs_conj(0b01, 2)
    assert vertex_needs_conj(0b10, 2)
    assert not vertex_needs_conj(0b11, 2)
    # k = 1: sign of the base vertex is -
    assert vertex_needs_conj(0b0, 1)
    assert not vertex_needs_conj(0b1, 1)


def test_imaginary_residue_policy():
    ok = _finalize(0.5 + 5e-11j, 2, "direct", 10)
    assert ok.warning is None
    warned = _finalize(0.5 + 1e-8j, 2, "direct", 10)
    assert warned.warning is not None
    with pytest.raises(ContractError):
        _finalize(0.5 + 1e-3j, 2, "direct", 10)
    with pytest.raises(ContractError):
        _finalize(-1e-3 + 0j, 2, "direct", 10)
    clamped = _finalize(-5e-11 + 0j, 2, "direct", 10)
    assert clamped.value == 0.0


def test_budget_is_enforced():
    s = get_space(3, 2)
    f = random_unit_function(s, np.random.default_rng(0))
    with pytest.raises(CapacityError):
        gowers_norm_direct(f, 3, budget=100)
    with pytest.raises(ContractError):
        gowers_norm_direct(f, 0)
