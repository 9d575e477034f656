"""Phase polynomials over F_p^n, finite-characteristic algebra, inverse search.

A phase polynomial of degree < k is a unit-modulus function whose k-fold
multiplicative derivatives are identically 1; equivalently e(P/p^m) where
every k-fold additive difference of the exponent P vanishes mod p^m.  It
suffices to test differences along the standard generators: a difference
along g + h expands into shifted compositions of the differences along g
and h, so k-fold generator differences generate all k-fold differences.
An exhaustive all-directions oracle is kept alongside for cross-checks.

The characteristic-p structure implemented here:

* degree bounds force torsion bounds: after rotating by a constant, a phase
  of degree < k takes values in C_{p^t} with t = floor((k-2)/(p-1)) + 1;
* p-th powers drop degree: f of degree < k with k >= p has f^p of degree
  < k - p + 1;
* products of the p translates of a phase along one direction gain torsion;
* base-p digits of exponents interact through carry polynomials, realizable
  over Z/p^l by Lagrange interpolation (all denominators prime to p), which
  makes functions of phase polynomials phase polynomials and lets every
  phase polynomial be rebuilt from its C_p-valued digit phases;
* roots exist: phases of bounded degree have r-th roots of bounded degree
  for every r, by unit inversion plus torsion lifting.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .dynamics import DegreeCertificate, system_degree_bound, translation_system
from .errors import CapacityError, ContractError, check_budget, resolve_budget
from .functions import ExponentFunction, GroupFunction
from .group import Space, get_space
from .modkernel import KernelModPrimePower, kernel_mod_prime_power


@lru_cache(maxsize=None)
def _translation(p: int, n: int):
    return translation_system(p, n)


def torsion_bound_for_degree(p: int, k: int) -> int:
    """t with Phase_{<k} values in C_{p^t} after constant rotation; at least 1."""
    if k < 1:
        return 1
    return max((k - 2) // (p - 1) + 1, 1)


@dataclass
class PhasePolynomial:
    """An exact phase with a certified degree along the generators."""

    exponents: ExponentFunction
    certificate: DegreeCertificate

    @property
    def degree(self) -> int | None:
        return self.certificate.degree

    def to_function(self) -> GroupFunction:
        return self.exponents.to_function()


def degree_test(phi, k_max: int, tolerance: float = 1e-9) -> DegreeCertificate:
    """Certified degree of a phase along generator directions.

    Accepts an ExponentFunction (exact arithmetic) or a unit-modulus
    GroupFunction (tolerance comparison).  The certificate's degree d means
    membership in Phase_{<d+1}; None means no level up to k_max vanished.
    """
    if isinstance(phi, ExponentFunction):
        system = _translation(phi.space.p, phi.space.n)
        return system_degree_bound(system, phi.exponents, k_max,
                                   exact=True, modulus=phi.modulus)
    if isinstance(phi, GroupFunction):
        phi.require_unit_modulus()
        system = _translation(phi.space.p, phi.space.n)
        return system_degree_bound(system, phi.values, k_max,
                                   exact=False, tolerance=tolerance)
    raise ContractError("degree_test expects an ExponentFunction or GroupFunction")


def as_phase_polynomial(exponents: ExponentFunction, k_max: int | None = None) -> PhasePolynomial:
    """Wrap an exponent table with a measured degree certificate."""
    if k_max is None:
        # values in C_{p^m} have degree at most (m-1)(p-1) + 1 levels of interest;
        # cap generously by the group exponent bound
        k_max = (exponents.m) * (exponents.space.p - 1) + exponents.space.n * (exponents.space.p - 1) + 2
    return PhasePolynomial(exponents, degree_test(exponents, k_max))


def standard_phase(p: int, n: int, k: int) -> PhasePolynomial:
    """The sharp witness at p = 2: phi_k(x) = e(sum_j |x_j| / 2^k).

    Has degree exactly k, takes values of full torsion 2^k, and no function
    with smaller torsion matches it up to constants.
    """
    if p != 2:
        raise ContractError("the standard sharp witness is defined at p = 2")
    if k < 1:
        raise ContractError("k must be >= 1")
    space = get_space(2, n)
    weights = space.coords_table.sum(axis=1)
    exps = ExponentFunction(space, k, weights)
    return PhasePolynomial(exps, degree_test(exps, k + 2))


def difference_operator_matrix(space: Space, directions: tuple[int, ...]) -> np.ndarray:
    """Matrix of the iterated additive difference along generator indices."""
    N = space.order
    op = np.eye(N, dtype=np.int64)
    for i in directions:
        perm = space.generator_shift(i)
        op = op[perm] - op
    return op


def phase_poly_kernel(p: int, n: int, k: int, m: int) -> KernelModPrimePower:
    """The group of exponent tables P mod p^m with vanishing k-fold differences."""
    if k < 0:
        raise ContractError("degree bound k must be >= 0")
    space = get_space(p, n)
    if k == 0:
        # Phase_{<0} is trivial: only the zero exponent
        return kernel_mod_prime_power(np.eye(space.order, dtype=np.int64), p, m)
    blocks = [difference_operator_matrix(space, combo)
              for combo in itertools.combinations_with_replacement(range(n), k)]
    return kernel_mod_prime_power(np.concatenate(blocks, axis=0), p, m)


class PhaseFamily:
    """Enumerable family Phase_{<k}(F_p^n, C_{p^m}), backed by the kernel group."""

    def __init__(self, p: int, n: int, k: int, m: int):
        self.p, self.n, self.k, self.m = p, n, k, m
        self.space = get_space(p, n)
        self.kernel = phase_poly_kernel(p, n, k, m)

    @property
    def count(self) -> int:
        return self.kernel.count

    def __iter__(self):
        for exps in self.kernel:
            yield ExponentFunction(self.space, self.m, exps)

    def sample(self, rng: np.random.Generator) -> ExponentFunction:
        return ExponentFunction(self.space, self.m, self.kernel.sample(rng))


def enumerate_phase_polys(p: int, n: int, k: int, m: int,
                          budget: int | None = None) -> PhaseFamily:
    """Phase_{<k}(F_p^n, C_{p^m}) with an eager cardinality/budget check."""
    family = PhaseFamily(p, n, k, m)
    count = family.count
    limit = resolve_budget(budget)
    if count * family.space.order > limit:
        raise CapacityError(
            "enumerating %d phase polynomials (x %d values each) exceeds budget %d"
            % (count, family.space.order, limit))
    return family


# -- digits and carries ------------------------------------------------


def carry_bit(p: int, a_digits, b_digits) -> int:
    """Carry into the next digit when adding numbers with the given base-p digits."""
    carry = 0
    for ad, bd in zip(a_digits, b_digits):
        carry = 1 if ad + bd + carry >= p else 0
    return carry


@lru_cache(maxsize=None)
def _vandermonde_inverse_mod(p: int, l: int) -> np.ndarray:
    """Inverse mod p^l of the Vandermonde matrix on nodes 0..p-1.

    All denominators divide products of differences of nodes, hence are
    prime to p; that is asserted during the exact rational inversion.
    """
    nodes = list(range(p))
    V = [[Fraction(x) ** d for d in range(p)] for x in nodes]
    # exact Gauss-Jordan over Q
    aug = [row + [Fraction(int(i == j)) for j in range(p)] for i, row in enumerate(V)]
    for col in range(p):
        pivot_row = next(r for r in range(col, p) if aug[r][col] != 0)
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        pivot = aug[col][col]
        aug[col] = [v / pivot for v in aug[col]]
        for r in range(p):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [v - factor * w for v, w in zip(aug[r], aug[col])]
    modulus = p ** l
    out = np.zeros((p, p), dtype=np.int64)
    for i in range(p):
        for j in range(p):
            frac = aug[i][p + j]
            if frac.denominator % p == 0:
                raise ContractError("interpolation denominator divisible by p")
            out[i, j] = frac.numerator * pow(frac.denominator, -1, modulus) % modulus
    return out


@dataclass
class CarryTable:
    """The carry c_j into digit j, as a table and an exact polynomial mod p^l.

    Arguments are (b_0(x), ..., b_{j-1}(x), b_0(y), ..., b_{j-1}(y)); the
    coefficient tensor has one axis of length p per argument, and the
    polynomial reproduces the table exactly over Z/p^l.
    """

    p: int
    j: int
    l: int
    table: np.ndarray   # shape (p,) * (2j)
    coeffs: np.ndarray  # shape (p,) * (2j), monomial coefficients mod p^l

    def evaluate_table(self, args) -> int:
        return int(self.table[tuple(args)])

    def evaluate_polynomial(self, args) -> int:
        """Evaluate the interpolant at integer arguments, mod p^l."""
        modulus = self.p ** self.l
        acc = self.coeffs
        for a in args:
            powers = np.array([pow(int(a), d, modulus) for d in range(self.p)],
                              dtype=np.int64)
            acc = np.tensordot(powers, acc, axes=([0], [0])) % modulus
        return int(acc % modulus)


def carry_polynomial(p: int, j: int, l: int) -> CarryTable:
    """Build the carry c_j and its exact interpolant over Z/p^l."""
    if j < 1:
        raise ContractError("carry index j must be >= 1")
    shape = (p,) * (2 * j)
    table = np.zeros(shape, dtype=np.int64)
    for args in itertools.product(range(p), repeat=2 * j):
        table[args] = carry_bit(p, args[:j], args[j:])
    inv = _vandermonde_inverse_mod(p, l)
    modulus = p ** l
    coeffs = table.copy()
    for axis in range(2 * j):
        coeffs = np.moveaxis(
            np.tensordot(inv.T, coeffs, axes=([0], [axis])) % modulus, 0, axis)
    return CarryTable(p=p, j=j, l=l, table=table, coeffs=coeffs)


def digit_addition_defect(p: int, j: int, l: int, x: int, y: int) -> int:
    """b_j(x+y) - b_j(x) - b_j(y) - c_j(...) + p*c_{j+1}(...) mod p^l (should be 0)."""
    def digits(v: int, count: int) -> list[int]:
        return [(v // p ** i) % p for i in range(count)]

    cj = carry_bit(p, digits(x, j), digits(y, j))
    cj1 = carry_bit(p, digits(x, j + 1), digits(y, j + 1))
    bj = lambda v: (v // p ** j) % p
    return (bj(x + y) - bj(x) - bj(y) - cj + p * cj1) % p ** l


# -- roots, composition, torsion --------------------------------------


def root(phi: ExponentFunction, r: int, k_max: int | None = None) -> PhasePolynomial:
    """A phase psi with psi^r = phi exactly, with measured degree.

    Write r = u * p^a with u prime to p.  The p-part is handled by lifting
    the torsion level: the representative of P, read mod p^{m+a}, satisfies
    (p^a * that) = P at the original level.  The unit part is inverted
    modulo the lifted modulus.
    """
    if r < 1:
        raise ContractError("root index r must be >= 1")
    p = phi.space.p
    a = 0
    u = r
    while u % p == 0:
        u //= p
        a += 1
    lifted_m = phi.m + a
    modulus = p ** lifted_m
    # representatives in [0, p^m) reinterpreted mod p^{m+a}: a p^a-th root
    exps = phi.exponents % p ** phi.m
    exps = (exps * pow(u, -1, modulus)) % modulus
    psi = ExponentFunction(phi.space, lifted_m, exps)
    if k_max is None:
        k_max = (lifted_m - 1) * (p - 1) + phi.space.n * (p - 1) + 2
    return PhasePolynomial(psi, degree_test(psi, k_max))


def compose(F, phis: list[ExponentFunction], out_m: int,
            k_max: int | None = None) -> PhasePolynomial:
    """Pointwise composition e(F(P_1(x), ..., P_M(x)) / p^out_m), degree measured.

    F maps tuples of exponent residues to a residue mod p^out_m.
    """
    if not phis:
        raise ContractError("compose needs at least one phase")
    space = phis[0].space
    for g in phis[1:]:
        if g.space != space:
            raise ContractError("mismatched ambient groups in compose")
    values = np.array(
        [F(tuple(int(g.exponents[x]) for g in phis)) for x in range(space.order)],
        dtype=np.int64)
    out = ExponentFunction(space, out_m, values)
    if k_max is None:
        k_max = (out_m) * (space.p - 1) + space.n * (space.p - 1) + 2
    return PhasePolynomial(out, degree_test(out, k_max))


@dataclass
class TorsionAudit:
    """Outcome of the degree-to-torsion checks for one phase."""

    degree_bound: int            # the k with phi in Phase_{<k}
    rotated_torsion: int         # minimal t with rotated values in C_{p^t}
    predicted_torsion: int       # floor((k-2)/(p-1)) + 1
    holds: bool


def torsion_audit(phi: ExponentFunction, k: int | None = None) -> TorsionAudit:
    """Check that a degree-< k phase, rotated by a constant, lands in C_{p^t}."""
    if k is None:
        cert = degree_test(
            phi, phi.m * (phi.space.p - 1) + phi.space.n * (phi.space.p - 1) + 2)
        if cert.degree is None:
            raise ContractError("input is not a phase polynomial within the tested range")
        k = cert.degree + 1
    rotated = phi.rotate(int(phi.exponents[0]))
    t = rotated.minimal_torsion()
    predicted = torsion_bound_for_degree(phi.space.p, k)
    return TorsionAudit(degree_bound=k, rotated_torsion=t,
                        predicted_torsion=predicted, holds=t <= predicted)


def translate_product(phi: ExponentFunction, g) -> ExponentFunction:
    """prod_{i=0}^{p-1} T_g^i phi as exact exponents (one direction's norm map)."""
    p = phi.space.p
    acc = np.zeros(phi.space.order, dtype=np.int64)
    current = phi.exponents.copy()
    table = phi.space.add_table
    from .group import as_index
    gi = as_index(g, phi.space)
    for _ in range(p):
        acc += current
        current = current[table[:, gi]]
    return ExponentFunction(phi.space, phi.m, acc)


# -- inverse-theorem search --------------------------------------------


@dataclass
class CorrelationResult:
    """Best correlation of f with the enumerated phase polynomial family."""

    correlation: float
    exponents: np.ndarray     # exponent table of the best phase, mod p^m
    m: int
    searched: int
    k: int


def inverse_search(f: GroupFunction, k: int, budget: int | None = None,
                   unsafe_low_char: bool = False, threads: int = 1) -> CorrelationResult:
    """Maximize |E f conj(phi)| over phi in Phase_{<k}(F_p^n, C_{p^m}).

    The torsion level m is the degree-forced bound, and the constant
    subgroup is quotiented out by restricting to exponent tables vanishing
    at 0 (constants only rotate the correlation).  The search is exhaustive
    and deterministic; ties resolve to the lexicographically smallest
    exponent table.  The inverse theorem's hypothesis is 1 <= k <= p;
    larger k is refused unless unsafe_low_char is set, since no correlation
    is guaranteed there.
    """
    p, n = f.space.p, f.space.n
    if k < 1:
        raise ContractError("inverse search needs k >= 1")
    if k > p and not unsafe_low_char:
        raise ContractError(
            "inverse theorem hypothesis needs k <= p (k=%d, p=%d); "
            "pass unsafe_low_char to search anyway" % (k, p))
    m = torsion_bound_for_degree(p, k)
    family = PhaseFamily(p, n, k, m)
    total = family.count // p ** m  # after quotienting constants
    N = f.space.order
    check_budget(total * N, budget, "inverse search over %d phases" % total)
    modulus = p ** m

    best_corr = -1.0
    best_exps: np.ndarray | None = None
    searched = 0
    target = np.conj(f.values) / N

    chunk: list[np.ndarray] = []

    def flush(chunk_rows: list[np.ndarray]) -> None:
        nonlocal best_corr, best_exps, searched
        if not chunk_rows:
            return
        exps = np.stack(chunk_rows)
        values = np.exp(2j * np.pi * exps / modulus)
        corrs = np.abs(values @ target)
        for row, corr in zip(exps, corrs):
            searched += 1
            c = float(corr)
            if c > best_corr + 1e-15 or (
                    abs(c - best_corr) <= 1e-15 and best_exps is not None
                    and tuple(row) < tuple(best_exps)):
                best_corr = c
                best_exps = row

    for exps in family.kernel:
        if exps[0] != 0:
            continue  # constant-subgroup representative has P(0) = 0
        chunk.append(exps)
        if len(chunk) >= max(256, threads * 256):
            flush(chunk)
            chunk = []
    flush(chunk)
    if best_exps is None:
        raise ContractError("empty search family")
    return CorrelationResult(correlation=best_corr, exponents=best_exps,
                             m=m, searched=searched, k=k)


def empirical_correlation_rows(p: int, n: int, k: int, deltas, trials: int,
                               seed: int, threads: int = 1) -> list[dict]:
    """Empirical inverse-theorem table: never an asserted bound.

    For `trials` seeded random unit-modulus functions, records the best
    phase-polynomial correlation found by inverse_search next to the U^k
    norm, then reports per delta the minimum correlation among functions
    with norm >= delta.  This is observational data for c(p, k, delta);
    no theoretical value of the constant is claimed anywhere.
    """
    from .functions import random_unit_function
    from .norms import gowers_norm_fast

    rng = np.random.default_rng(seed)
    space = get_space(p, n)
    samples = []
    for _ in range(trials):
        f = random_unit_function(space, rng)
        norm = gowers_norm_fast(f, k).value
        corr = inverse_search(f, k, unsafe_low_char=True, threads=threads).correlation
        samples.append((norm, corr))
    rows = []
    for delta in deltas:
        qualifying = [corr for norm, corr in samples if norm >= delta]
        rows.append({
            "p": p, "n": n, "k": k, "delta": float(delta),
            "min_correlation": min(qualifying) if qualifying else float("nan"),
            "trials": len(qualifying),
        })
    return rows
