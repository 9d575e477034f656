"""Arithmetic of the ambient group F_p^n and of roots of unity.

Group elements are encoded as integers 0 .. p^n - 1 in little-endian
mixed radix: index = sum(coords[i] * p**i), so coords[0] is the least
significant digit.  All bulk operations work on these indices with
precomputed numpy tables; GroupPoint is a thin convenience wrapper.

Roots of unity are kept as exact integer exponents modulo a prime power
(CyclicValue): the complex value is e(exponent / p^m) where
e(t) = exp(2*pi*i*t).  Conversion to floating point happens only at the
boundary of norm computations.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractError

#: dense tables (addition, shifts) are only built up to this group size.
MAX_DENSE_ORDER = 1 << 20


def is_prime(p: int) -> bool:
    """Deterministic primality check, adequate for the small moduli used here."""
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def require_prime(p: int) -> int:
    if not is_prime(p):
        raise ContractError("p must be prime, got %r" % (p,))
    return p


class Space:
    """The ambient group F_p^n with index-level arithmetic tables."""

    def __init__(self, p: int, n: int):
        require_prime(p)
        if n < 1:
            raise ContractError("n must be >= 1, got %r" % (n,))
        if p ** n > MAX_DENSE_ORDER:
            raise ContractError(
                "group order %d exceeds dense-table limit %d" % (p ** n, MAX_DENSE_ORDER)
            )
        self.p = p
        self.n = n
        self.order = p ** n
        self._powers = p ** np.arange(n, dtype=np.int64)
        # coords[i, j] = j-th digit of index i
        idx = np.arange(self.order, dtype=np.int64)
        self.coords_table = (idx[:, None] // self._powers[None, :]) % p
        self._add_table = None

    def __eq__(self, other):
        return isinstance(other, Space) and (self.p, self.n) == (other.p, other.n)

    def __hash__(self):
        return hash((self.p, self.n))

    def __repr__(self):
        return "Space(p=%d, n=%d)" % (self.p, self.n)

    def index_of(self, coords) -> int:
        coords = np.asarray(coords, dtype=np.int64) % self.p
        if coords.shape != (self.n,):
            raise ContractError("expected %d coordinates, got %r" % (self.n, coords.shape))
        return int(coords @ self._powers)

    def coords_of(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.order:
            raise ContractError("index %r out of range for %r" % (index, self))
        return tuple(int(c) for c in self.coords_table[index])

    def add(self, a: int, b: int) -> int:
        """Index of the sum of two group elements."""
        return int(((self.coords_table[a] + self.coords_table[b]) % self.p) @ self._powers)

    def neg(self, a: int) -> int:
        return int(((-self.coords_table[a]) % self.p) @ self._powers)

    def scale(self, a: int, c: int) -> int:
        """Index of the integer multiple c*a."""
        return int(((self.coords_table[a] * c) % self.p) @ self._powers)

    def add_many(self, a, b):
        """Vectorized index addition for arrays of indices."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        ca = self.coords_table[a]
        cb = self.coords_table[b]
        return ((ca + cb) % self.p) @ self._powers

    @property
    def add_table(self) -> np.ndarray:
        """Dense (order x order) int32 table of index sums, built on demand."""
        if self._add_table is None:
            idx = np.arange(self.order, dtype=np.int64)
            self._add_table = self.add_many(idx[:, None], idx[None, :]).astype(np.int32)
        return self._add_table

    def generator(self, i: int) -> int:
        """Index of the i-th standard basis vector e_i."""
        if not 0 <= i < self.n:
            raise ContractError("generator index %r out of range" % (i,))
        return int(self._powers[i])

    def generator_shift(self, i: int) -> np.ndarray:
        """Permutation array s with s[x] = x + e_i."""
        return self.add_table[:, self.generator(i)].copy()

    def points(self):
        """All group elements as GroupPoint, in index order."""
        return [GroupPoint(self, i) for i in range(self.order)]

    def point(self, coords) -> "GroupPoint":
        return GroupPoint(self, self.index_of(coords))


@lru_cache(maxsize=None)
def get_space(p: int, n: int) -> Space:
    """Cached Space constructor; the dense tables are shared per (p, n)."""
    return Space(p, n)


@dataclass(frozen=True)
class GroupPoint:
    """One element of F_p^n, identified by its little-endian index."""

    space: Space
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.space.order:
            raise ContractError("index %r out of range for %r" % (self.index, self.space))

    @property
    def coords(self) -> tuple[int, ...]:
        return self.space.coords_of(self.index)

    def __add__(self, other: "GroupPoint") -> "GroupPoint":
        if other.space != self.space:
            raise ContractError("cannot add points of %r and %r" % (self.space, other.space))
        return GroupPoint(self.space, self.space.add(self.index, other.index))

    def __neg__(self) -> "GroupPoint":
        return GroupPoint(self.space, self.space.neg(self.index))

    def __sub__(self, other: "GroupPoint") -> "GroupPoint":
        return self + (-other)


def as_index(x, space: Space) -> int:
    """Accept a GroupPoint, an index, or a coordinate tuple; return the index."""
    if isinstance(x, GroupPoint):
        if x.space != space:
            raise ContractError("point belongs to %r, expected %r" % (x.space, space))
        return x.index
    if isinstance(x, (int, np.integer)):
        if not 0 <= x < space.order:
            raise ContractError("index %r out of range for %r" % (x, space))
        return int(x)
    return space.index_of(x)


@dataclass(frozen=True)
class CyclicValue:
    """The root of unity e(exponent / p^m), stored exactly.

    Arithmetic aligns torsion levels by lifting to the larger modulus
    (e(a/p^m) = e(a*p / p^(m+1))), so products and powers stay exact.
    """

    exponent: int
    m: int
    p: int

    def __post_init__(self):
        require_prime(self.p)
        if self.m < 0:
            raise ContractError("torsion exponent m must be >= 0")
        object.__setattr__(self, "exponent", self.exponent % self.modulus)

    @property
    def modulus(self) -> int:
        return self.p ** self.m

    def lift(self, m: int) -> "CyclicValue":
        """Rewrite the same root of unity with torsion level m >= self.m."""
        if m < self.m:
            raise ContractError("cannot lower torsion from %d to %d" % (self.m, m))
        return CyclicValue(self.exponent * self.p ** (m - self.m), m, self.p)

    def _aligned(self, other: "CyclicValue"):
        if other.p != self.p:
            raise ContractError("mixed characteristics %d and %d" % (self.p, other.p))
        m = max(self.m, other.m)
        return self.lift(m), other.lift(m)

    def __mul__(self, other: "CyclicValue") -> "CyclicValue":
        a, b = self._aligned(other)
        return CyclicValue(a.exponent + b.exponent, a.m, a.p)

    def __pow__(self, k: int) -> "CyclicValue":
        return CyclicValue(self.exponent * k, self.m, self.p)

    def conj(self) -> "CyclicValue":
        return CyclicValue(-self.exponent, self.m, self.p)

    def minimal(self) -> "CyclicValue":
        """Canonical form: smallest torsion level representing the same value."""
        e, m = self.exponent, self.m
        while m > 0 and e % self.p == 0:
            e //= self.p
            m -= 1
        return CyclicValue(e, m, self.p)

    def is_one(self) -> bool:
        return self.exponent == 0

    def to_complex(self) -> complex:
        return np.exp(2j * np.pi * self.exponent / self.modulus)


def exponents_to_complex(exponents: np.ndarray, p: int, m: int) -> np.ndarray:
    """Vectorized e(exponents / p^m) for integer exponent arrays."""
    return np.exp(2j * np.pi * (np.asarray(exponents, dtype=np.int64) % p ** m) / p ** m)


@dataclass(frozen=True)
class Character:
    """The additive character x -> e(<frequency, x> / p) on F_p^n."""

    space: Space
    frequency: int  # index of the frequency vector

    def exponent_at(self, x) -> int:
        xi = self.space.coords_table[self.frequency]
        cx = self.space.coords_table[as_index(x, self.space)]
        return int((xi @ cx) % self.space.p)

    def __call__(self, x) -> CyclicValue:
        return CyclicValue(self.exponent_at(x), 1, self.space.p)

    def exponent_table(self) -> np.ndarray:
        """Exponents mod p of the character at every group element."""
        xi = self.space.coords_table[self.frequency]
        return (self.space.coords_table @ xi) % self.space.p

    def is_trivial(self) -> bool:
        return self.frequency == 0
