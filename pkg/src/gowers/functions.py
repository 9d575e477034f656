"""Functions on F_p^n: complex tables, exact phase tables, Fourier transform.

Two representations coexist.  GroupFunction stores complex128 values and is
the working type for norms and correlations.  ExponentFunction stores exact
integer exponents modulo p^m and represents the unit-modulus function
x -> e(P(x) / p^m); all phase-polynomial algebra is done on exponents and
only converted to complex at the boundary.

The Fourier transform uses the probability normalization
fhat(xi) = E_x f(x) e(-<xi, x>/p), so sum_xi |fhat(xi)|^2 = E|f|^2.
It is computed as n successive size-p transforms along the coordinate axes
(the fast Walsh-Hadamard butterfly when p = 2), costing O(p^n * n * p).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .group import Space, as_index, exponents_to_complex, get_space

DEFAULT_TOLERANCE = 1e-9


class GroupFunction:
    """A complex-valued function on F_p^n, stored as a dense table."""

    def __init__(self, space: Space, values, tolerance: float = DEFAULT_TOLERANCE):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (space.order,):
            raise ContractError(
                "expected %d values for %r, got shape %r" % (space.order, space, values.shape)
            )
        self.space = space
        self.values = values
        self.tolerance = tolerance

    # -- basic algebra -------------------------------------------------

    def shift(self, h) -> "GroupFunction":
        """The translate T_h f with (T_h f)(x) = f(x + h)."""
        h = as_index(h, self.space)
        return GroupFunction(self.space, self.values[self.space.add_table[:, h]], self.tolerance)

    def conj(self) -> "GroupFunction":
        return GroupFunction(self.space, np.conj(self.values), self.tolerance)

    def __mul__(self, other: "GroupFunction") -> "GroupFunction":
        self._check_same_space(other)
        return GroupFunction(self.space, self.values * other.values,
                             min(self.tolerance, other.tolerance))

    def mult_derivative(self, h) -> "GroupFunction":
        """Multiplicative derivative conj(f) * T_h f."""
        h = as_index(h, self.space)
        shifted = self.values[self.space.add_table[:, h]]
        return GroupFunction(self.space, np.conj(self.values) * shifted, self.tolerance)

    def derivative_chain(self, hs) -> "GroupFunction":
        """Iterated multiplicative derivative along the list hs."""
        g = self
        for h in hs:
            g = g.mult_derivative(h)
        return g

    def mean(self) -> complex:
        return complex(np.mean(self.values))

    def is_unit_modulus(self, tolerance: float | None = None) -> bool:
        tol = self.tolerance if tolerance is None else tolerance
        return bool(np.all(np.abs(np.abs(self.values) - 1.0) <= tol))

    def require_unit_modulus(self) -> "GroupFunction":
        if not self.is_unit_modulus():
            raise ContractError("function is not unit-modulus within tolerance %g" % self.tolerance)
        return self

    def _check_same_space(self, other: "GroupFunction") -> None:
        if other.space != self.space:
            raise ContractError("mismatched ambient groups %r and %r" % (self.space, other.space))

    # -- serialization --------------------------------------------------

    def to_json(self) -> str:
        payload = {
            "p": self.space.p,
            "n": self.space.n,
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GroupFunction":
        try:
            payload = json.loads(text)
            p, n = int(payload["p"]), int(payload["n"])
            raw = payload["values"]
            values = np.array([complex(re, im) for re, im in raw])
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractError("malformed function JSON: %s" % exc)
        return cls(get_space(p, n), values)


def inner_product(f: GroupFunction, g: GroupFunction) -> complex:
    """E_x f(x) conj(g(x))."""
    f._check_same_space(g)
    return complex(np.mean(f.values * np.conj(g.values)))


def random_unit_function(space: Space, rng: np.random.Generator) -> GroupFunction:
    """Random unit-modulus function (uniform independent phases)."""
    theta = rng.uniform(0.0, 2 * np.pi, size=space.order)
    return GroupFunction(space, np.exp(1j * theta))


class ExponentFunction:
    """The phase x -> e(P(x)/p^m) stored as the exact exponent table P mod p^m."""

    def __init__(self, space: Space, m: int, exponents):
        if m < 1:
            raise ContractError("torsion exponent m must be >= 1, got %r" % (m,))
        exponents = np.asarray(exponents, dtype=np.int64) % space.p ** m
        if exponents.shape != (space.order,):
            raise ContractError(
                "expected %d exponents for %r, got shape %r"
                % (space.order, space, exponents.shape)
            )
        self.space = space
        self.m = m
        self.exponents = exponents

    @property
    def modulus(self) -> int:
        return self.space.p ** self.m

    def shift(self, h) -> "ExponentFunction":
        h = as_index(h, self.space)
        return ExponentFunction(self.space, self.m, self.exponents[self.space.add_table[:, h]])

    def add_derivative(self, h) -> "ExponentFunction":
        """Additive derivative P(x + h) - P(x), the exponent of the multiplicative one."""
        h = as_index(h, self.space)
        return ExponentFunction(
            self.space, self.m, self.exponents[self.space.add_table[:, h]] - self.exponents
        )

    def __mul__(self, other: "ExponentFunction") -> "ExponentFunction":
        if other.space != self.space:
            raise ContractError("mismatched ambient groups")
        m = max(self.m, other.m)
        return ExponentFunction(self.space, m,
                                self.lift(m).exponents + other.lift(m).exponents)

    def __pow__(self, k: int) -> "ExponentFunction":
        return ExponentFunction(self.space, self.m, self.exponents * k)

    def lift(self, m: int) -> "ExponentFunction":
        """Same phase written with torsion level m >= self.m."""
        if m < self.m:
            raise ContractError("cannot lower torsion from %d to %d" % (self.m, m))
        return ExponentFunction(self.space, m,
                                self.exponents * self.space.p ** (m - self.m))

    def rotate(self, c: int) -> "ExponentFunction":
        """Multiply by the constant e(-c/p^m): subtract c from every exponent."""
        return ExponentFunction(self.space, self.m, self.exponents - c)

    def digit(self, j: int, l: int) -> "ExponentFunction":
        """Base-p digit j of the representative in [0, p^m), as a C_{p^l} exponent."""
        if not 0 <= j < self.m:
            raise ContractError("digit index %r out of range for m=%d" % (j, self.m))
        digits = (self.exponents // self.space.p ** j) % self.space.p
        return ExponentFunction(self.space, l, digits)

    def minimal_torsion(self) -> int:
        """Smallest t with all values in C_{p^t}."""
        e, m = self.exponents, self.m
        while m > 0 and bool(np.all(e % self.space.p == 0)):
            e = e // self.space.p
            m -= 1
        return m

    def is_zero(self) -> bool:
        return bool(np.all(self.exponents == 0))

    def to_function(self, tolerance: float = DEFAULT_TOLERANCE) -> GroupFunction:
        values = exponents_to_complex(self.exponents, self.space.p, self.m)
        return GroupFunction(self.space, values, tolerance)

    def to_json(self) -> str:
        payload = {
            "p": self.space.p,
            "n": self.space.n,
            "m": self.m,
            "exponents": [int(e) for e in self.exponents],
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExponentFunction":
        try:
            payload = json.loads(text)
            space = get_space(int(payload["p"]), int(payload["n"]))
            return cls(space, int(payload["m"]), payload["exponents"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractError("malformed exponent-function JSON: %s" % exc)


def fourier_transform(f: GroupFunction) -> "Spectrum":
    """Probability-normalized Fourier transform via axis-wise size-p DFTs."""
    space = f.space
    p, n = space.p, space.n
    # C-order reshape puts coordinate 0 (least significant digit) on the last axis.
    cube = f.values.reshape((p,) * n)
    if p == 2:
        for axis in range(n):
            a = np.take(cube, 0, axis=axis)
            b = np.take(cube, 1, axis=axis)
            cube = np.stack((a + b, a - b), axis=axis)
    else:
        w = np.exp(-2j * np.pi * np.outer(np.arange(p), np.arange(p)) / p)
        for axis in range(n):
            cube = np.moveaxis(np.tensordot(w, cube, axes=([1], [axis])), 0, axis)
    return Spectrum(space, cube.reshape(space.order) / space.order)


@dataclass
class Spectrum:
    """Fourier coefficients of a GroupFunction, indexed by frequency."""

    space: Space
    coefficients: np.ndarray

    def inverse(self, tolerance: float = DEFAULT_TOLERANCE) -> GroupFunction:
        """Resynthesize f(x) = sum_xi fhat(xi) e(<xi, x>/p)."""
        p, n = self.space.p, self.space.n
        cube = self.coefficients.reshape((p,) * n)
        w = np.exp(2j * np.pi * np.outer(np.arange(p), np.arange(p)) / p)
        for axis in range(n):
            cube = np.moveaxis(np.tensordot(w, cube, axes=([1], [axis])), 0, axis)
        return GroupFunction(self.space, cube.reshape(self.space.order), tolerance)

    def max_coefficient(self) -> tuple[int, float]:
        """(frequency index, |fhat|) of the largest coefficient, ties to least index."""
        mags = np.abs(self.coefficients)
        idx = int(np.argmax(mags))
        return idx, float(mags[idx])

    def fourth_moment(self) -> float:
        """sum_xi |fhat(xi)|^4, the fourth power of the U^2 norm."""
        return float(np.sum(np.abs(self.coefficients) ** 4))
