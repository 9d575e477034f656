"""A finite window into the Heisenberg nilsystem over F_p((t)).

The model is the homogeneous space H(F((t)))/H(F[t]) with the F[t]-action
generated by g -> (g*alpha, g*beta, g*gamma + binom(g,2)*alpha*beta), written
in torus coordinates ((x, y), z) with x, y, z in T(F) = F((t))/F[t]:

  T_g((x,y),z) = ((x,y) + (g*alpha, g*beta),
                  z + g*gamma + binom(g,2)*alpha*beta + floor(g*alpha)*y
                    - g*beta*{x} - {g*alpha}*g*beta)

Laurent series are handled through finite coefficient windows.  Parameters
alpha, beta, gamma have fractional support in [-m, -1]; acting by
polynomials g of degree < d_g only ever produces fractional exponents down
to -2m (the only products are of two m-windows), so windows are allocated
at the doubled floor -2m and a truncation flag records if anything would
ever fall below it.  In this range floor and fractional part are exact
homomorphisms (no carries), which is what makes the orbit phase
P(g) = binom(g,2)*alpha*beta + g*gamma - {g*alpha}*g*beta a genuine
quadratic polynomial in g: its third additive differences vanish exactly.

The evaluation character sends a torus element to e(c/p) where c is the
coefficient of t^{-1}; the induced function f((x,y),z) = e(z - {x}y) is
invariant under the right H(F[t]) translations (audited numerically) and
its restriction to the orbit of the origin is the function whose U^3 norm
the acceptance tests measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .functions import GroupFunction
from .group import get_space, require_prime


class LaurentWindow:
    """An element of F_p((t)) with support confined to [floor_exp, +inf).

    Coefficients are kept sparsely; a nonzero coefficient pushed below the
    allocated floor is dropped and recorded in the `truncated` flag, which
    propagates through arithmetic.
    """

    __slots__ = ("p", "coeffs", "floor_exp", "truncated")

    def __init__(self, p: int, coeffs: dict[int, int] | None = None,
                 floor_exp: int | None = None, truncated: bool = False):
        require_prime(p)
        self.p = p
        self.floor_exp = floor_exp
        self.truncated = truncated
        clean: dict[int, int] = {}
        for e, c in (coeffs or {}).items():
            c %= p
            if c == 0:
                continue
            if floor_exp is not None and e < floor_exp:
                self.truncated = True
                continue
            clean[int(e)] = c
        self.coeffs = clean

    def _merge_floor(self, other: "LaurentWindow") -> int | None:
        floors = [f for f in (self.floor_exp, other.floor_exp) if f is not None]
        return max(floors) if floors else None

    def __add__(self, other: "LaurentWindow") -> "LaurentWindow":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentWindow(self.p, out, self._merge_floor(other),
                             self.truncated or other.truncated)

    def __neg__(self) -> "LaurentWindow":
        return LaurentWindow(self.p, {e: -c for e, c in self.coeffs.items()},
                             self.floor_exp, self.truncated)

    def __sub__(self, other: "LaurentWindow") -> "LaurentWindow":
        return self + (-other)

    def __mul__(self, other: "LaurentWindow") -> "LaurentWindow":
        out: dict[int, int] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentWindow(self.p, out, self._merge_floor(other),
                             self.truncated or other.truncated)

    def scale(self, c: int) -> "LaurentWindow":
        return LaurentWindow(self.p, {e: v * c for e, v in self.coeffs.items()},
                             self.floor_exp, self.truncated)

    def floor_part(self) -> "LaurentWindow":
        """The F[t] part: coefficients at nonnegative exponents."""
        return LaurentWindow(self.p, {e: c for e, c in self.coeffs.items() if e >= 0},
                             self.floor_exp, self.truncated)

    def frac_part(self) -> "LaurentWindow":
        """The torus representative: coefficients at negative exponents."""
        return LaurentWindow(self.p, {e: c for e, c in self.coeffs.items() if e < 0},
                             self.floor_exp, self.truncated)

    def pairing(self) -> int:
        """Coefficient of t^{-1}: the exponent of the evaluation character."""
        return self.coeffs.get(-1, 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, LaurentWindow) and self.p == other.p \
            and self.coeffs == other.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "LaurentWindow(0)"
        terms = " + ".join("%d*t^%d" % (c, e) for e, c in sorted(self.coeffs.items()))
        return "LaurentWindow(%s)" % terms


def binom2(g: LaurentWindow) -> LaurentWindow:
    """binom(g, 2) = (g^2 - g) / 2 in F_p[t]; needs p odd."""
    if g.p == 2:
        raise ContractError("binom(g,2) needs characteristic > 2")
    inv2 = pow(2, -1, g.p)
    return (g * g - g).scale(inv2)


@dataclass(frozen=True)
class HeisenbergPoint:
    """Torus coordinates ((x, y), z) of a point of the nilmanifold."""

    x: LaurentWindow
    y: LaurentWindow
    z: LaurentWindow

    @property
    def truncated(self) -> bool:
        return self.x.truncated or self.y.truncated or self.z.truncated


class HeisenbergSystem:
    """The finite-window Heisenberg system with fixed parameters."""

    def __init__(self, p: int, m: int, alpha: dict[int, int], beta: dict[int, int],
                 gamma: dict[int, int], d_g: int):
        require_prime(p)
        if p == 2:
            raise ContractError("the Heisenberg construction needs p >= 3")
        if m < 1 or d_g < 1:
            raise ContractError("need window width m >= 1 and degree bound d_g >= 1")
        self.p = p
        self.m = m
        self.d_g = d_g
        self.floor = -2 * m
        for name, coeffs in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
            if any(not -m <= e <= -1 for e in coeffs if coeffs[e] % p):
                raise ContractError("%s must have support in [-%d, -1]" % (name, m))
        self.alpha = LaurentWindow(p, alpha, self.floor)
        self.beta = LaurentWindow(p, beta, self.floor)
        self.gamma = LaurentWindow(p, gamma, self.floor)
        self.group = get_space(p, d_g)  # g = sum_j digit_j t^j, little-endian

    def polynomial(self, g_index: int) -> LaurentWindow:
        """The group element with index g_index as a polynomial in F_p[t]."""
        coords = self.group.coords_table[g_index]
        return LaurentWindow(self.p, {j: int(c) for j, c in enumerate(coords)}, self.floor)

    def origin(self) -> HeisenbergPoint:
        zero = LaurentWindow(self.p, {}, self.floor)
        return HeisenbergPoint(zero, zero, zero)

    def act(self, g: LaurentWindow, pt: HeisenbergPoint) -> HeisenbergPoint:
        ga = g * self.alpha
        gb = g * self.beta
        z_inc = (g * self.gamma
                 + binom2(g) * self.alpha * self.beta
                 + ga.floor_part() * pt.y
                 - gb * pt.x.frac_part()
                 - ga.frac_part() * gb)
        return HeisenbergPoint((pt.x + ga).frac_part(),
                               (pt.y + gb).frac_part(),
                               (pt.z + z_inc).frac_part())

    def right_translate(self, pt: HeisenbergPoint, a: LaurentWindow, b: LaurentWindow,
                        c: LaurentWindow) -> HeisenbergPoint:
        """Right multiplication by the H(F[t]) element (a, b, c) on a lifted point.

        In matrix form (x, y, z) * (a, b, c) = (x + a, y + b, z + c + x*b);
        the induced function must be invariant under this, which is the
        well-definedness audit of f on the quotient.
        """
        return HeisenbergPoint(pt.x + a, pt.y + b, pt.z + c + pt.x * b)

    def f_exponent(self, pt: HeisenbergPoint) -> int:
        """Exponent mod p of f((x,y),z) = e(z - {x}y) at a (possibly lifted) point."""
        return (pt.z - pt.x.frac_part() * pt.y).pairing() % self.p

    def orbit_phase(self, g: LaurentWindow) -> LaurentWindow:
        """P(g) = binom(g,2) alpha beta + g gamma - {g alpha} g beta, exactly."""
        ga = g * self.alpha
        return binom2(g) * self.alpha * self.beta + g * self.gamma \
            - ga.frac_part() * (g * self.beta)

    def induced_function(self) -> GroupFunction:
        """f along the orbit of the origin, as a function on F_p^{d_g}."""
        values = np.empty(self.group.order, dtype=np.complex128)
        for idx in range(self.group.order):
            pt = self.act(self.polynomial(idx), self.origin())
            if pt.truncated:
                raise ContractError("window truncation while computing the orbit")
            values[idx] = np.exp(2j * np.pi * self.f_exponent(pt) / self.p)
        return GroupFunction(self.group, values)


@dataclass
class PhasePolyCertificate:
    """Outcome of the exhaustive third-difference check of the orbit phase."""

    cases: int
    all_vanish: bool
    truncation_seen: bool
    first_failure: tuple[int, int, int, int] | None = None


def certify_phase_polynomial(system: HeisenbergSystem) -> PhasePolyCertificate:
    """Check d_{h1} d_{h2} d_{h3} P(g) = 0 exactly for all g, h1, h2, h3.

    The alternating 8-term sum is evaluated on dense coefficient vectors of
    the precomputed orbit phases, vectorized over the full grid.
    """
    space = system.group
    G = space.order
    phases = [system.orbit_phase(system.polynomial(i)) for i in range(G)]
    truncation = any(ph.truncated for ph in phases)
    exps = sorted({e for ph in phases for e in ph.coeffs})
    pos = {e: i for i, e in enumerate(exps)}
    dense = np.zeros((G, len(exps)), dtype=np.int64)
    for i, ph in enumerate(phases):
        for e, c in ph.coeffs.items():
            dense[i, pos[e]] = c

    idx = np.arange(G, dtype=np.int64)
    cases = 0
    for h1 in range(G):
        s1 = space.add_table[:, h1].astype(np.int64)
        for h2 in range(G):
            s2 = space.add_table[:, h2].astype(np.int64)
            # third difference in h3 evaluated for all (g, h3) at once
            for h3 in range(G):
                s3 = space.add_table[:, h3].astype(np.int64)
                total = (dense[s3[s2[s1[idx]]]] - dense[s2[s1[idx]]]
                         - dense[s3[s1[idx]]] - dense[s3[s2[idx]]]
                         + dense[s1[idx]] + dense[s2[idx]] + dense[s3[idx]]
                         - dense[idx]) % system.p
                cases += G
                if np.any(total):
                    bad = int(np.nonzero(np.any(total, axis=1))[0][0])
                    return PhasePolyCertificate(cases=cases, all_vanish=False,
                                                truncation_seen=truncation,
                                                first_failure=(bad, h1, h2, h3))
    return PhasePolyCertificate(cases=cases, all_vanish=True, truncation_seen=truncation)


def well_definedness_audit(system: HeisenbergSystem, rng: np.random.Generator,
                           trials: int = 50) -> bool:
    """f is unchanged under random right H(F[t]) translations of random lifts."""
    for _ in range(trials):
        def random_frac():
            return LaurentWindow(system.p,
                                 {-j: int(rng.integers(0, system.p))
                                  for j in range(1, system.m + 1)}, system.floor)

        def random_poly():
            return LaurentWindow(system.p,
                                 {j: int(rng.integers(0, system.p))
                                  for j in range(0, system.d_g)}, system.floor)

        pt = HeisenbergPoint(random_frac(), random_frac(), random_frac())
        a, b, c = random_poly(), random_poly(), random_poly()
        moved = system.right_translate(pt, a, b, c)
        if system.f_exponent(pt) != system.f_exponent(moved):
            return False
    return True


def action_homomorphism_audit(system: HeisenbergSystem) -> bool:
    """T_g T_h = T_{g+h} on the orbit of the origin, exhaustively."""
    space = system.group
    for g in range(space.order):
        for h in range(space.order):
            pt = system.act(system.polynomial(h), system.origin())
            via = system.act(system.polynomial(g), pt)
            direct = system.act(system.polynomial(space.add(g, h)), system.origin())
            if not (via.x == direct.x and via.y == direct.y and via.z == direct.z):
                return False
    return True
