"""Host-Kra cube measures for finite systems and the seminorms built on them.

The level-k cube measure lives on X^{2^k}; support points are stored as rows
of point ids, with vertex v in [0, 2^k) encoding the {0,1} cube coordinates
little-endian (bit j of v is the coordinate of direction j+1).  Level k+1 is
built from level k through the ergodic decomposition of the diagonal action:
in the finite setting the ergodic components are the orbits of the diagonal
G-action on the support, the conditional measures are uniform on each orbit
(the diagonal action preserves the measure, so weights are constant along
orbits), and the new measure is the orbit-wise relatively independent square.
With the little-endian vertex encoding that step is row concatenation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, check_budget
from .norms import NormReport, _finalize, vertex_needs_conj
from .dynamics import FiniteSystem


@dataclass
class CubeMeasure:
    """The measure mu^[k]: support rows (one point id per vertex) and weights."""

    system: FiniteSystem
    k: int
    support: np.ndarray        # shape (S, 2^k), int64 point ids
    weights: np.ndarray        # shape (S,), sums to 1
    orbit_labels: np.ndarray   # diagonal-action orbit label per support row

    def diagonal_generator_perms(self) -> list[np.ndarray]:
        """Permutations of the support rows under the diagonal generator actions."""
        lookup = {row.tobytes(): i for i, row in enumerate(self.support)}
        perms = []
        for g in self.system.generator_perms:
            moved = g[self.support]
            perm = np.array([lookup[row.tobytes()] for row in moved], dtype=np.int64)
            perms.append(perm)
        return perms

    def as_system(self) -> FiniteSystem:
        """The cube system (X^[k], mu^[k]) with the diagonal G-action."""
        return FiniteSystem(self.system.p, self.system.n, self.weights,
                            self.diagonal_generator_perms())


def _orbit_labels(support: np.ndarray, generator_perms: list[np.ndarray]) -> np.ndarray:
    """Union-find orbit labels of support rows under the diagonal action."""
    lookup = {row.tobytes(): i for i, row in enumerate(support)}
    S = support.shape[0]
    parent = np.arange(S)

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = int(parent[a])
        return a

    for g in generator_perms:
        moved = g[support]
        for i in range(S):
            j = lookup.get(moved[i].tobytes())
            if j is None:
                raise ContractError("support is not closed under the diagonal action")
            ra, rb = find(i), find(j)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([find(i) for i in range(S)])
    # relabel orbits 0..m-1 in order of least row index
    unique_roots = sorted(set(int(r) for r in roots))
    relabel = {r: i for i, r in enumerate(unique_roots)}
    return np.array([relabel[int(r)] for r in roots], dtype=np.int64)


def cube_space(system: FiniteSystem, k: int, budget: int | None = None) -> CubeMeasure:
    """Construct mu^[k] inductively from mu^[0] = the system measure."""
    if k < 0:
        raise ContractError("cube level k must be >= 0, got %r" % (k,))
    support = np.arange(system.size, dtype=np.int64)[:, None]
    weights = system.weights.copy()
    labels = _orbit_labels(support, system.generator_perms)
    for level in range(k):
        order = np.argsort(labels, kind="stable")
        new_size = sum(int(np.sum(labels == lab)) ** 2 for lab in range(labels.max() + 1))
        check_budget(new_size * (2 << level), budget, "cube measure at level %d" % (level + 1))
        rows = []
        wts = []
        for lab in range(int(labels.max()) + 1):
            members = order[labels[order] == lab]
            orbit_weight = float(weights[members].sum())
            # conditional measure is uniform on the orbit; audit that
            if not np.allclose(weights[members], weights[members][0], atol=1e-12):
                raise ContractError("measure is not diagonal-invariant at level %d" % level)
            w_pair = weights[members][:, None] * weights[members][None, :] / orbit_weight
            left = np.repeat(support[members], len(members), axis=0)
            right = np.tile(support[members], (len(members), 1))
            rows.append(np.concatenate([left, right], axis=1))
            wts.append(w_pair.reshape(-1))
        support = np.concatenate(rows, axis=0)
        weights = np.concatenate(wts)
        labels = _orbit_labels(support, system.generator_perms)
    return CubeMeasure(system=system, k=k, support=support, weights=weights,
                       orbit_labels=labels)


def cube_integral(measure: CubeMeasure, value_tables) -> complex:
    """Integral of the tensor product over mu^[k], conjugating negative-sign vertices."""
    k = measure.k
    tables = [np.asarray(t, dtype=np.complex128) for t in value_tables]
    if len(tables) != 1 << k:
        raise ContractError("expected %d vertex functions, got %d" % (1 << k, len(tables)))
    acc = np.ones(measure.support.shape[0], dtype=np.complex128)
    for v, table in enumerate(tables):
        vals = table[measure.support[:, v]]
        acc *= np.conj(vals) if vertex_needs_conj(v, k) else vals
    return complex(np.sum(acc * measure.weights))


def d_k_values(measure: CubeMeasure, values: np.ndarray) -> np.ndarray:
    """d^[k] f on the support rows: the signed vertex product of one function."""
    values = np.asarray(values, dtype=np.complex128)
    acc = np.ones(measure.support.shape[0], dtype=np.complex128)
    for v in range(1 << measure.k):
        vals = values[measure.support[:, v]]
        acc *= np.conj(vals) if vertex_needs_conj(v, measure.k) else vals
    return acc


def d_k_exponents(measure: CubeMeasure, exponents: np.ndarray, modulus: int) -> np.ndarray:
    """Exact d^[k] of a phase given by exponents: the signed exponent sum."""
    exponents = np.asarray(exponents, dtype=np.int64)
    acc = np.zeros(measure.support.shape[0], dtype=np.int64)
    for v in range(1 << measure.k):
        vals = exponents[measure.support[:, v]]
        acc += -vals if vertex_needs_conj(v, measure.k) else vals
    return acc % modulus


def ghk_seminorm(system: FiniteSystem, values: np.ndarray, k: int,
                 budget: int | None = None) -> NormReport:
    """The Gowers-Host-Kra seminorm |||f|||_k = (integral of d^[k] f)^{1/2^k}."""
    if k < 1:
        raise ContractError("seminorm level k must be >= 1, got %r" % (k,))
    measure = cube_space(system, k, budget)
    inner = complex(np.sum(d_k_values(measure, values) * measure.weights))
    return _finalize(inner, k, "cube", int(measure.support.shape[0]))


def ghk_seminorm_iterated(system: FiniteSystem, values: np.ndarray, k: int,
                          budget: int | None = None) -> NormReport:
    """Independent route: E_{h_1..h_k in G} integral of the derivative chain.

    Exact for finite systems, where the averaged shifts play the role of the
    limits in the iterated-average formula.
    """
    if k < 1:
        raise ContractError("seminorm level k must be >= 1, got %r" % (k,))
    G = system.group.order
    check_budget(G ** k * system.size, budget, "iterated-average seminorm")
    perms = system.group_perms()
    values = np.asarray(values, dtype=np.complex128)
    weights = system.weights

    def recurse(table: np.ndarray, level: int) -> complex:
        if level == 0:
            return complex(np.sum(table * weights))
        total = 0.0 + 0.0j
        for g in range(G):
            total += recurse(np.conj(table) * table[perms[g]], level - 1)
        return total / G

    return _finalize(recurse(values, k), k, "iterated", G ** k * system.size)
