"""Kernels of integer matrices over Z/p^m.

Z/p^m is a local principal ideal ring: every element is unit * p^e, and a
divides b iff v_p(a) <= v_p(b).  Gaussian elimination therefore works by
always pivoting on an entry of minimal p-valuation in the remaining
submatrix; after normalizing the pivot to exactly p^e, every other entry in
its row and column has a representative divisible by p^e, so elimination is
exact.  Tracking the column operations gives the kernel as an explicit
direct sum of cyclic groups: generators g_t of order p^{e_t} whose integer
combinations enumerate every solution exactly once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ContractError


def _valuation(a: int, p: int, m: int) -> int:
    """p-adic valuation of the residue a mod p^m, with v(0) = m."""
    if a % p ** m == 0:
        return m
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


@dataclass
class KernelModPrimePower:
    """Solution group of A x = 0 over Z/p^m as a direct sum of cyclic groups."""

    p: int
    m: int
    width: int                  # number of unknowns
    generators: np.ndarray      # shape (g, width), each of additive order p^orders[i]
    orders: list[int]           # exponents e_i, all >= 1

    @property
    def count(self) -> int:
        total = 1
        for e in self.orders:
            total *= self.p ** e
        return total

    def element(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=np.int64)
        if coeffs.shape != (len(self.orders),):
            raise ContractError("expected %d coefficients" % len(self.orders))
        if len(self.orders) == 0:
            return np.zeros(self.width, dtype=np.int64)
        return (coeffs @ self.generators) % self.p ** self.m

    def __iter__(self):
        """Every solution exactly once, deterministic order."""
        ranges = [range(self.p ** e) for e in self.orders]
        for coeffs in itertools.product(*ranges):
            yield self.element(coeffs)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        coeffs = np.array([int(rng.integers(0, self.p ** e)) for e in self.orders],
                          dtype=np.int64)
        return self.element(coeffs)


def kernel_mod_prime_power(A, p: int, m: int) -> KernelModPrimePower:
    """All x in (Z/p^m)^N with A x = 0 mod p^m, as a KernelModPrimePower."""
    modulus = p ** m
    M = np.asarray(A, dtype=np.int64) % modulus
    if M.ndim != 2:
        raise ContractError("matrix must be two-dimensional")
    R, N = M.shape
    V = np.eye(N, dtype=np.int64)
    pivot_vals: list[int] = []  # valuation e_t of the t-th diagonal pivot

    t = 0
    while t < min(R, N):
        # find minimal-valuation entry in the remaining submatrix
        sub = M[t:, t:]
        if np.all(sub % modulus == 0):
            break
        best = None
        for i in range(t, R):
            for j in range(t, N):
                v = _valuation(int(M[i, j]), p, m)
                if v < m and (best is None or v < best[0]):
                    best = (v, i, j)
            if best is not None and best[0] == 0:
                break
        e, bi, bj = best
        M[[t, bi]] = M[[bi, t]]
        M[:, [t, bj]] = M[:, [bj, t]]
        V[:, [t, bj]] = V[:, [bj, t]]
        # normalize pivot to exactly p^e (multiply row by the unit inverse)
        unit = int(M[t, t]) // p ** e
        inv_unit = pow(unit, -1, modulus)
        M[t] = (M[t] * inv_unit) % modulus
        pe = p ** e
        # eliminate the rest of column t (row ops, kernel unchanged)
        for i in range(t + 1, R):
            q = int(M[i, t]) // pe
            if q:
                M[i] = (M[i] - q * M[t]) % modulus
        # eliminate the rest of row t (col ops, tracked in V)
        for j in range(t + 1, N):
            q = int(M[t, j]) // pe
            if q:
                M[:, j] = (M[:, j] - q * M[:, t]) % modulus
                V[:, j] = (V[:, j] - q * V[:, t]) % modulus
        pivot_vals.append(e)
        t += 1

    generators = []
    orders = []
    for j in range(N):
        e = pivot_vals[j] if j < len(pivot_vals) else m
        if e == 0:
            continue  # pivot is a unit: that coordinate is forced to zero
        generators.append((V[:, j] * p ** (m - e)) % modulus)
        orders.append(e)
    gens = np.array(generators, dtype=np.int64) if generators else \
        np.zeros((0, N), dtype=np.int64)
    return KernelModPrimePower(p=p, m=m, width=N, generators=gens, orders=orders)
