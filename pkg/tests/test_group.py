import numpy as np
import pytest

from gowers.errors import ContractError
from gowers.group import (Character, CyclicValue, GroupPoint, Space, exponents_to_complex,
                          get_space, is_prime)


def test_primality():
    # sieve oracle
    limit = 200
    sieve = np.ones(limit, dtype=bool)
    sieve[:2] = False
    for d in range(2, limit):
        if sieve[d]:
            sieve[2 * d::d] = False
    for v in range(-3, limit):
        assert is_prime(v) == (v >= 2 and bool(sieve[v]))


def test_space_rejects_bad_parameters():
    with pytest.raises(ContractError):
        Space(4, 2)
    with pytest.raises(ContractError):
        Space(3, 0)


def test_little_endian_index_encoding():
    s = get_space(3, 3)
    # coords[0] is the least significant digit
    assert s.coords_of(1) == (1, 0, 0)
    assert s.coords_of(3) == (0, 1, 0)
    assert s.coords_of(9) == (0, 0, 1)
    assert s.index_of((2, 1, 0)) == 2 + 3
    for idx in range(s.order):
        assert s.index_of(s.coords_of(idx)) == idx


def test_add_neg_scale_match_coordinate_arithmetic():
    rng = np.random.default_rng(0)
    s = get_space(5, 2)
    for _ in range(50):
        a, b = rng.integers(0, s.order, size=2)
        ca, cb = np.array(s.coords_of(a)), np.array(s.coords_of(b))
        assert s.add(a, b) == s.index_of((ca + cb) % 5)
        assert s.neg(a) == s.index_of((-ca) % 5)
        assert s.scale(a, 3) == s.index_of((3 * ca) % 5)
        assert s.add(a, s.neg(a)) == 0


def test_add_table_matches_scalar_add():
    s = get_space(3, 2)
    t = s.add_table
    for a in range(s.order):
        for b in range(s.order):
            assert t[a, b] == s.add(a, b)


def test_group_point_algebra():
    s = get_space(3, 2)
    a = s.point((1, 2))
    b = s.point((2, 2))
    assert (a + b).coords == (0, 1)
    assert (a - a).index == 0
    with pytest.raises(ContractError):
        GroupPoint(s, s.order)


def test_cyclic_value_exact_arithmetic():
    a = CyclicValue(1, 2, 3)   # e(1/9)
    b = CyclicValue(1, 1, 3)   # e(1/3)
    prod = a * b
    assert (prod.m, prod.exponent) == (2, 4)
    assert (a ** 9).is_one()
    assert (a.conj() * a).is_one()
    assert np.isclose(a.to_complex() * b.to_complex(), prod.to_complex())


def test_cyclic_value_minimal_form():
    v = CyclicValue(3, 2, 3)  # e(3/9) = e(1/3)
    assert (v.minimal().exponent, v.minimal().m) == (1, 1)
    assert CyclicValue(0, 3, 2).minimal().m == 0


def test_cyclic_value_rejects_mixed_characteristics():
    with pytest.raises(ContractError):
        CyclicValue(1, 1, 2) * CyclicValue(1, 1, 3)


def test_character_is_multiplicative():
    s = get_space(3, 2)
    chi = Character(s, 5)
    for a in range(s.order):
        for b in range(s.order):
            assert (chi.exponent_at(s.add(a, b))
                    == (chi.exponent_at(a) + chi.exponent_at(b)) % 3)
    assert Character(s, 0).is_trivial()
    table = chi.exponent_table()
    assert np.allclose(exponents_to_complex(table, 3, 1),
                       [chi(x).to_complex() for x in range(s.order)])


def test_generator_shift_permutations():
    s = get_space(2, 3)
    for i in range(3):
        shift = s.generator_shift(i)
        for x in range(s.order):
            assert shift[x] == s.add(x, s.generator(i))
