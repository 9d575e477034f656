"""Finite measure-preserving F_p^n-systems, cocycles and abelian extensions.

A FiniteSystem is a finite point set with a probability weight vector and n
commuting measure-preserving permutations of order dividing p: the actions
of the standard generators of G = F_p^n.  The action of a general g is the
digit-wise composition of generator permutations.

Cocycles take values in the fiber group U = C_{p^m}^L and are stored as
exact exponent tables rho[g, x, component] modulo p^m.  The cocycle
equation rho(g + g', x) = rho(g, T_{g'} x) + rho(g', x) is checked
exhaustively; coboundaries are solved by spanning-tree propagation over
each orbit with exhaustive edge verification, returning either an exact
antiderivative or an inconsistent-cycle certificate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, check_budget
from .group import Space, as_index, get_space, require_prime


class FiberGroup:
    """The abelian fiber U = C_{p^m}^L, elements encoded as little-endian indices."""

    def __init__(self, p: int, m: int, L: int = 1):
        require_prime(p)
        if m < 1 or L < 1:
            raise ContractError("fiber needs m >= 1 and L >= 1")
        self.p = p
        self.m = m
        self.L = L
        self.modulus = p ** m
        self.order = self.modulus ** L

    def __eq__(self, other):
        return isinstance(other, FiberGroup) and \
            (self.p, self.m, self.L) == (other.p, other.m, other.L)

    def index_of(self, comps) -> int:
        comps = np.asarray(comps, dtype=np.int64) % self.modulus
        return int(sum(int(c) * self.modulus ** i for i, c in enumerate(comps)))

    def comps_of(self, index: int) -> tuple[int, ...]:
        return tuple((index // self.modulus ** i) % self.modulus for i in range(self.L))

    def add_index(self, a: int, b: int) -> int:
        return self.index_of(np.asarray(self.comps_of(a)) + np.asarray(self.comps_of(b)))


class FiniteSystem:
    """A finite measure-preserving system with an F_p^n action."""

    def __init__(self, p: int, n: int, weights, generator_perms, fiber: FiberGroup | None = None,
                 base_size: int | None = None):
        self.group = get_space(p, n)
        self.weights = np.asarray(weights, dtype=np.float64)
        if self.weights.ndim != 1 or self.weights.size == 0:
            raise ContractError("weights must be a non-empty vector")
        if abs(self.weights.sum() - 1.0) > 1e-12 or np.any(self.weights < 0):
            raise ContractError("weights must be a probability vector")
        self.size = self.weights.size
        if len(generator_perms) != n:
            raise ContractError("expected %d generator permutations, got %d"
                                % (n, len(generator_perms)))
        self.generator_perms = [np.asarray(g, dtype=np.int64) for g in generator_perms]
        self._validate()
        self.fiber = fiber          # set for extension systems
        self.base_size = base_size  # size of the base when this is an extension
        self._perm_cache: list[np.ndarray] | None = None

    @property
    def p(self) -> int:
        return self.group.p

    @property
    def n(self) -> int:
        return self.group.n

    def _validate(self) -> None:
        ident = np.arange(self.size)
        for i, g in enumerate(self.generator_perms):
            if sorted(g.tolist()) != ident.tolist():
                raise ContractError("generator %d is not a permutation" % i)
            if not np.allclose(self.weights[g], self.weights, atol=1e-12):
                raise ContractError("generator %d does not preserve the measure" % i)
            power = ident
            for _ in range(self.p):
                power = g[power]
            if not np.array_equal(power, ident):
                raise ContractError("generator %d is not of order dividing p=%d" % (i, self.p))
            for j, h in enumerate(self.generator_perms[:i]):
                if not np.array_equal(g[h], h[g]):
                    raise ContractError("generators %d and %d do not commute" % (j, i))

    def group_perms(self) -> list[np.ndarray]:
        """Permutation of the point set for every group element index."""
        if self._perm_cache is None:
            perms = [np.arange(self.size)]
            for idx in range(1, self.group.order):
                coords = self.group.coords_table[idx]
                i = int(np.nonzero(coords)[0][0])
                prev = idx - self.group.p ** i
                perms.append(self.generator_perms[i][perms[prev]])
            self._perm_cache = perms
        return self._perm_cache

    def act(self, g, x: int) -> int:
        """T_g x for a group element g (point/index/coords) and a point id x."""
        return int(self.group_perms()[as_index(g, self.group)][x])

    def orbits(self) -> list[list[int]]:
        """Orbit partition of the point set, orbits sorted by least point id."""
        parent = list(range(self.size))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for g in self.generator_perms:
            for x in range(self.size):
                ra, rb = find(x), find(int(g[x]))
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        groups: dict[int, list[int]] = {}
        for x in range(self.size):
            groups.setdefault(find(x), []).append(x)
        return [groups[r] for r in sorted(groups)]

    def to_json(self) -> str:
        payload = {
            "p": self.p,
            "n": self.n,
            "points": self.size,
            "weights": [float(w) for w in self.weights],
            "generators": [[int(v) for v in g] for g in self.generator_perms],
            "fiber": None if self.fiber is None else
            {"p": self.fiber.p, "m": self.fiber.m, "L": self.fiber.L,
             "base_size": self.base_size},
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FiniteSystem":
        try:
            payload = json.loads(text)
            fiber = None
            base_size = None
            if payload.get("fiber"):
                fb = payload["fiber"]
                fiber = FiberGroup(int(fb["p"]), int(fb["m"]), int(fb["L"]))
                base_size = int(fb["base_size"])
            return cls(int(payload["p"]), int(payload["n"]), payload["weights"],
                       payload["generators"], fiber=fiber, base_size=base_size)
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractError("malformed system JSON: %s" % exc)


def translation_system(p: int, n: int) -> FiniteSystem:
    """F_p^n acting on itself by translation with uniform measure."""
    space = get_space(p, n)
    weights = np.full(space.order, 1.0 / space.order)
    perms = [space.generator_shift(i).astype(np.int64) for i in range(n)]
    return FiniteSystem(p, n, weights, perms)


class CocycleTable:
    """Exact exponent table rho[g, x, component] of a U-valued function on G x X."""

    def __init__(self, system: FiniteSystem, fiber: FiberGroup, exponents):
        if fiber.p != system.p:
            raise ContractError("fiber characteristic %d != system characteristic %d"
                                % (fiber.p, system.p))
        exponents = np.asarray(exponents, dtype=np.int64) % fiber.modulus
        expected = (system.group.order, system.size, fiber.L)
        if exponents.shape != expected:
            raise ContractError("expected cocycle table of shape %r, got %r"
                                % (expected, exponents.shape))
        self.system = system
        self.fiber = fiber
        self.exponents = exponents

    def value_table(self) -> np.ndarray:
        """Unit-complex values e(rho / p^m), summed over fiber components dropped."""
        return np.exp(2j * np.pi * self.exponents / self.fiber.modulus)

    def minimal_torsion(self) -> int:
        """Smallest t with every value in C_{p^t}."""
        e, m = self.exponents, self.fiber.m
        while m > 0 and bool(np.all(e % self.fiber.p == 0)):
            e = e // self.fiber.p
            m -= 1
        return m


@dataclass
class CocycleViolation:
    """A triple where the cocycle equation fails, with both sides."""

    g: int
    g_prime: int
    x: int
    lhs: tuple[int, ...]
    rhs: tuple[int, ...]


def is_cocycle(rho: CocycleTable) -> tuple[bool, CocycleViolation | None]:
    """Exhaustive check of rho(g+g', x) = rho(g, T_{g'} x) + rho(g', x)."""
    system = rho.system
    space = system.group
    perms = system.group_perms()
    mod = rho.fiber.modulus
    exp = rho.exponents
    for g in range(space.order):
        for gp in range(space.order):
            s = space.add(g, gp)
            lhs = exp[s]
            rhs = (exp[g][perms[gp]] + exp[gp]) % mod
            if not np.array_equal(lhs, rhs):
                bad = np.nonzero(np.any(lhs != rhs, axis=1))[0]
                x = int(bad[0])
                return False, CocycleViolation(g, gp, x, tuple(int(v) for v in lhs[x]),
                                               tuple(int(v) for v in rhs[x]))
    return True, None


@dataclass
class CoboundaryWitness:
    """Antiderivative F with rho(g, x) = F(T_g x) - F(x), as exact exponents."""

    exponents: np.ndarray  # shape (points, L), modulo p^m


@dataclass
class CoboundaryObstruction:
    """Certificate that rho is not a coboundary: a cycle with nonzero sum.

    The cycle starts and ends at `x`: first the single step by group element
    `g`, then the reversed spanning-tree path back from T_g x to x.  `defect`
    is the nonzero value of rho summed along the cycle (the tree edges enter
    with minus sign), which would vanish for any coboundary.
    """

    g: int
    x: int
    defect: tuple[int, ...]
    tree_edges: list[tuple[int, int]] = field(default_factory=list)  # (gen index, source point)


def solve_coboundary(rho: CocycleTable, require_cocycle: bool = True):
    """Solve rho = dF exactly, or return a CoboundaryObstruction.

    With require_cocycle=True (the default) a non-cocycle input is a
    ContractError; type tests pass require_cocycle=False so that failures
    surface as obstruction certificates instead.
    """
    if require_cocycle:
        ok, witness = is_cocycle(rho)
        if not ok:
            raise ContractError("input is not a cocycle; first violation: %r" % (witness,))
    system = rho.system
    fiber = rho.fiber
    mod = fiber.modulus
    F = np.zeros((system.size, fiber.L), dtype=np.int64)
    visited = np.zeros(system.size, dtype=bool)
    parent_edge: dict[int, tuple[int, int]] = {}  # point -> (generator index, source point)
    gen_indices = [system.group.generator(i) for i in range(system.n)]

    for base in range(system.size):
        if visited[base]:
            continue
        visited[base] = True
        queue = [base]
        while queue:
            x = queue.pop(0)
            for i in range(system.n):
                y = int(system.generator_perms[i][x])
                if not visited[y]:
                    visited[y] = True
                    F[y] = (F[x] + rho.exponents[gen_indices[i], x]) % mod
                    parent_edge[y] = (i, x)
                    queue.append(y)

    # exhaustive verification over every group element, not just generators
    perms = system.group_perms()
    for g in range(system.group.order):
        perm = perms[g]
        predicted = (F[perm] - F) % mod
        diff = (rho.exponents[g] - predicted) % mod
        bad = np.nonzero(np.any(diff != 0, axis=1))[0]
        if bad.size:
            x = int(bad[0])
            tree_edges = []
            for endpoint in (int(perm[x]), x):
                node = endpoint
                while node in parent_edge:
                    i, src = parent_edge[node]
                    tree_edges.append((i, src))
                    node = src
            return CoboundaryObstruction(g=g, x=x, defect=tuple(int(v) for v in diff[x]),
                                         tree_edges=tree_edges)
    return CoboundaryWitness(exponents=F)


def coboundary_of(system: FiniteSystem, fiber: FiberGroup, F) -> CocycleTable:
    """The coboundary dF(g, x) = F(T_g x) - F(x) as an exact table."""
    F = np.asarray(F, dtype=np.int64) % fiber.modulus
    if F.shape != (system.size, fiber.L):
        raise ContractError("expected antiderivative of shape %r" % ((system.size, fiber.L),))
    perms = system.group_perms()
    table = np.stack([(F[perm] - F) % fiber.modulus for perm in perms])
    return CocycleTable(system, fiber, table)


def extend(system: FiniteSystem, rho: CocycleTable) -> FiniteSystem:
    """The extension X x_rho U with shift (x, u) -> (T_g x, rho(g, x) + u).

    Point ids are x * |U| + u with u the little-endian fiber index.  The
    cocycle equation makes the extension a well-defined F_p^n-system.
    """
    if rho.system is not system:
        raise ContractError("cocycle is defined over a different system")
    ok, witness = is_cocycle(rho)
    if not ok:
        raise ContractError("extension needs a cocycle; first violation: %r" % (witness,))
    fiber = rho.fiber
    U = fiber.order
    size = system.size * U
    weights = np.repeat(system.weights, U) / U
    u_comps = np.array([fiber.comps_of(u) for u in range(U)], dtype=np.int64)  # (U, L)
    powers = fiber.modulus ** np.arange(fiber.L, dtype=np.int64)
    gen_perms = []
    for i in range(system.n):
        g_idx = system.group.generator(i)
        base_perm = system.generator_perms[i]
        perm = np.empty(size, dtype=np.int64)
        for x in range(system.size):
            shifted = (u_comps + rho.exponents[g_idx, x][None, :]) % fiber.modulus
            new_u = shifted @ powers
            perm[x * U: (x + 1) * U] = int(base_perm[x]) * U + new_u
        gen_perms.append(perm)
    return FiniteSystem(system.p, system.n, weights, gen_perms,
                        fiber=fiber, base_size=system.size)


def fiber_translation(ext: FiniteSystem, t) -> np.ndarray:
    """The vertical rotation V_t (x, u) = (x, u + t) on an extension system."""
    if ext.fiber is None:
        raise ContractError("system is not an extension")
    fiber = ext.fiber
    U = fiber.order
    t_idx = t if isinstance(t, (int, np.integer)) else fiber.index_of(t)
    perm = np.empty(ext.size, dtype=np.int64)
    for u in range(U):
        shifted = fiber.add_index(u, int(t_idx))
        for x in range(ext.base_size):
            perm[x * U + u] = x * U + shifted
    return perm


def vertical_derivative(ext: FiniteSystem, values: np.ndarray, t) -> np.ndarray:
    """Multiplicative vertical derivative (D_t f)(y) = conj(f(y)) f(V_t y)."""
    perm = fiber_translation(ext, t)
    values = np.asarray(values, dtype=np.complex128)
    return np.conj(values) * values[perm]


def vertical_derivative_exponents(ext: FiniteSystem, exponents: np.ndarray, t) -> np.ndarray:
    """Exact exponent version of the vertical derivative."""
    perm = fiber_translation(ext, t)
    exponents = np.asarray(exponents, dtype=np.int64)
    return exponents[perm] - exponents


@dataclass
class DegreeCertificate:
    """Certified phase-polynomial degree along the system generators.

    `degree` d means membership in Phase_{<d+1} was verified and membership
    in Phase_{<d} fails (d = 0 covers constants).  `degree` is None when no
    level up to k_max vanishes.  `exhaustive` marks the all-directions oracle.
    """

    degree: int | None
    k_max: int
    exhaustive: bool = False


def system_degree_bound(system: FiniteSystem, table, k_max: int,
                        exact: bool = True, modulus: int | None = None,
                        tolerance: float = 1e-9) -> DegreeCertificate:
    """Least-degree certificate for a phase on a finite system.

    With exact=True, `table` is an integer exponent array modulo `modulus`
    and derivatives are additive differences; otherwise `table` is a
    unit-modulus complex array and derivatives are multiplicative, compared
    to 1 within `tolerance`.  Only generator directions are used: every
    k-fold derivative along arbitrary directions expands into shifted
    compositions of at least k generator derivatives, so their vanishing is
    sufficient (and trivially necessary).
    """
    table = np.asarray(table)
    if exact:
        if modulus is None:
            raise ContractError("exact degree test needs the exponent modulus")
        current = [(0, table.astype(np.int64) % modulus)]

        def derive(arr, i):
            return (arr[system.generator_perms[i]] - arr) % modulus

        def vanishes(arr):
            return bool(np.all(arr == 0))
    else:
        current = [(0, table.astype(np.complex128))]

        def derive(arr, i):
            return np.conj(arr) * arr[system.generator_perms[i]]

        def vanishes(arr):
            return bool(np.all(np.abs(arr - 1.0) <= tolerance))

    for level in range(k_max + 1):
        if all(vanishes(arr) for _, arr in current):
            return DegreeCertificate(degree=max(level - 1, 0), k_max=k_max)
        if level == k_max:
            break
        # extend each multiset by generators >= its largest used index
        current = [(i, derive(arr, i))
                   for min_i, arr in current
                   for i in range(min_i, system.n)]
    return DegreeCertificate(degree=None, k_max=k_max)


def exhaustive_degree_bound(system: FiniteSystem, table, k_max: int,
                            exact: bool = True, modulus: int | None = None,
                            tolerance: float = 1e-9,
                            budget: int | None = None) -> DegreeCertificate:
    """All-directions degree oracle: derivatives along every tuple in G^k.

    Exponential in k_max; intended as the independent cross-check of
    system_degree_bound on small systems.
    """
    G = system.group.order
    check_budget((G ** k_max) * system.size, budget, "exhaustive degree test")
    perms = system.group_perms()
    table = np.asarray(table)
    if exact:
        if modulus is None:
            raise ContractError("exact degree test needs the exponent modulus")
        current = [table.astype(np.int64) % modulus]

        def derive(arr, g):
            return (arr[perms[g]] - arr) % modulus

        def vanishes(arr):
            return bool(np.all(arr == 0))
    else:
        current = [table.astype(np.complex128)]

        def derive(arr, g):
            return np.conj(arr) * arr[perms[g]]

        def vanishes(arr):
            return bool(np.all(np.abs(arr - 1.0) <= tolerance))

    for level in range(k_max + 1):
        if all(vanishes(arr) for arr in current):
            return DegreeCertificate(degree=max(level - 1, 0), k_max=k_max, exhaustive=True)
        if level == k_max:
            break
        current = [derive(arr, g) for arr in current for g in range(G)]
    return DegreeCertificate(degree=None, k_max=k_max, exhaustive=True)


def enumerate_polynomial_cocycles(p: int, n: int, k: int, m: int,
                                  budget: int | None = None) -> list[CocycleTable]:
    """All cocycles on the translation system whose generator slices have degree < k.

    A cocycle is determined by its values on the n generators; candidates are
    drawn from Phase_{<k}(F_p^n, C_{p^m}) per generator, filtered by the
    p-torsion relation along each generator and pairwise compatibility, then
    assembled over all of G by the cocycle equation and verified exhaustively.
    """
    import itertools

    from .phasepoly import enumerate_phase_polys

    system = translation_system(p, n)
    space = system.group
    fiber = FiberGroup(p, m, 1)
    family = list(enumerate_phase_polys(p, n, k, m, budget))
    check_budget(len(family) ** n * space.order, budget,
                 "polynomial cocycle enumeration over %d^%d candidates"
                 % (len(family), n))
    mod = fiber.modulus
    perms = [system.generator_perms[i] for i in range(n)]

    # per-generator torsion filter: sum of the p translates along e_i vanishes
    per_gen: list[list[np.ndarray]] = []
    for i in range(n):
        keep = []
        for phi in family:
            acc = np.zeros(space.order, dtype=np.int64)
            cur = phi.exponents
            for _ in range(p):
                acc = (acc + cur) % mod
                cur = cur[perms[i]]
            if np.all(acc == 0):
                keep.append(phi.exponents)
        per_gen.append(keep)

    results = []
    for combo in itertools.product(*per_gen):
        compatible = True
        for i in range(n):
            for j in range(i + 1, n):
                lhs = (combo[i][perms[j]] + combo[j]) % mod
                rhs = (combo[j][perms[i]] + combo[i]) % mod
                if not np.array_equal(lhs, rhs):
                    compatible = False
                    break
            if not compatible:
                break
        if not compatible:
            continue
        table = np.zeros((space.order, system.size, 1), dtype=np.int64)
        for idx in range(1, space.order):
            coords = space.coords_table[idx]
            i = int(np.nonzero(coords)[0][0])
            prev = idx - p ** i
            # rho(e_i + g', x) = rho(e_i, T_{g'} x) + rho(g', x)
            prev_perm = system.group_perms()[prev]
            table[idx, :, 0] = (combo[i][prev_perm] + table[prev, :, 0]) % mod
        rho = CocycleTable(system, fiber, table)
        ok, _ = is_cocycle(rho)
        if ok:
            results.append(rho)
    return results


def type_test(system: FiniteSystem, f_exponents: np.ndarray, fiber: FiberGroup, k: int,
              budget: int | None = None):
    """Is f of type < k: is d^[k] f a coboundary over the cube system?

    `f_exponents` is the exact table f[g, x] modulo p^m of a (G, X, C_{p^m})
    function.  d^[k] f is assembled vertex-wise on the support of mu^[k] and
    handed to solve_coboundary without the cocycle precondition, so the
    answer is either an exact antiderivative on the cube space or an
    inconsistent-cycle certificate.
    """
    from .cubes import cube_space

    f_exponents = np.asarray(f_exponents, dtype=np.int64) % fiber.modulus
    expected = (system.group.order, system.size)
    if f_exponents.shape != expected:
        raise ContractError("expected f table of shape %r, got %r"
                            % (expected, f_exponents.shape))
    measure = cube_space(system, k, budget)
    cube_sys = measure.as_system()
    signs = np.array([1 if (k - v.bit_count()) % 2 == 0 else -1
                      for v in range(1 << k)], dtype=np.int64)
    table = np.zeros((system.group.order, cube_sys.size, 1), dtype=np.int64)
    for g in range(system.group.order):
        acc = np.zeros(cube_sys.size, dtype=np.int64)
        for v in range(1 << k):
            acc += signs[v] * f_exponents[g][measure.support[:, v]]
        table[g, :, 0] = acc % fiber.modulus
    rho = CocycleTable(cube_sys, fiber, table)
    return solve_coboundary(rho, require_cocycle=False)
