"""Finite vector configurations: projector algebras and Kochen-Specker colorings."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, NamedTuple, Sequence

import networkx as nx
import numpy as np

from .errors import ModelError, SizeLimitError, Violation
from .pba import FinitePartialBooleanAlgebra
from .quantum import TOL_COMM, TOL_ORTH
from .stone import pair

VECTOR_CAP = 256
PBA_ELEMENT_CAP = 64


@dataclass(frozen=True, eq=False)
class VectorConfiguration:
    """Unit vectors in C^d; contexts are maximal mutually orthogonal subsets.

    Vectors are normalized on construction.  Zero vectors and vectors
    parallel to an earlier one are rejected, since a ray can only be colored
    once.
    """

    dimension: int
    vectors: tuple[np.ndarray, ...]

    def __init__(self, vectors: Sequence, dimension: int = 3) -> None:
        if not isinstance(dimension, int) or dimension < 1:
            raise ModelError(f"dimension must be a positive integer, got {dimension!r}")
        out = []
        for i, raw in enumerate(vectors):
            v = np.array(raw, dtype=complex).reshape(-1)
            if v.size != dimension:
                raise ModelError(f"vector {i} has {v.size} entries, expected {dimension}")
            if not np.all(np.isfinite(v)):
                raise ModelError(f"vector {i} has non-finite entries")
            norm = np.linalg.norm(v)
            if norm <= TOL_ORTH:
                raise ModelError(f"vector {i} is zero")
            if abs(norm - 1) > TOL_ORTH:
                v = v / norm
            for j, u in enumerate(out):
                if abs(abs(np.vdot(u, v)) - 1) <= TOL_ORTH:
                    raise ModelError(f"vector {i} is parallel to vector {j}")
            v.setflags(write=False)
            out.append(v)
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "vectors", tuple(out))

    def __len__(self) -> int:
        return len(self.vectors)

    def orthogonal(self, i: int, j: int) -> bool:
        return abs(np.vdot(self.vectors[i], self.vectors[j])) <= TOL_ORTH

    @cached_property
    def contexts(self) -> tuple[tuple[int, ...], ...]:
        g = nx.Graph()
        g.add_nodes_from(range(len(self.vectors)))
        g.add_edges_from((i, j) for i, j in itertools.combinations(range(len(self.vectors)), 2) if self.orthogonal(i, j))
        cliques = sorted(tuple(sorted(c)) for c in nx.find_cliques(g))
        for c in cliques:
            if len(c) > self.dimension:
                raise ModelError(f"context {c} has more than {self.dimension} mutually orthogonal vectors")
        return tuple(cliques)

    def projector(self, i: int) -> np.ndarray:
        v = self.vectors[i]
        return np.outer(v, v.conj())


class _MatrixRegistry:
    """Names for projector matrices, identifying matrices equal within tolerance."""

    def __init__(self) -> None:
        self.labels: list[str] = []
        self.matrices: list[np.ndarray] = []

    def find(self, m: np.ndarray) -> str | None:
        for label, other in zip(self.labels, self.matrices):
            if np.max(np.abs(m - other)) <= TOL_ORTH:
                return label
        return None

    def add(self, label: str, m: np.ndarray) -> str:
        found = self.find(m)
        if found is not None:
            return found
        if label in self.labels:
            label = f"e{len(self.labels)}"
        self.labels.append(label)
        self.matrices.append(m)
        return label


def _rest_matrix(vc: VectorConfiguration, context: Sequence[int]) -> np.ndarray:
    return np.eye(vc.dimension) - sum((vc.projector(i) for i in context), np.zeros((vc.dimension,) * 2))


def _context_atoms(vc: VectorConfiguration, reg: _MatrixRegistry, context: Sequence[int]) -> list[str]:
    """Atoms of one context: its rank-1 projectors plus the rest, if non-zero."""
    atoms = [f"v{i}" for i in context]
    if len(context) < vc.dimension:
        inner = "+".join(atoms)
        name = f"¬{inner}" if len(context) == 1 else f"¬({inner})"
        atoms.append(reg.add(name, _rest_matrix(vc, context)))
    return atoms


@dataclass(frozen=True, eq=False)
class ProjectorAlgebra(FinitePartialBooleanAlgebra):
    """A partial Boolean algebra of projectors, remembering each element's matrix."""

    matrices: Mapping[str, np.ndarray] = None


def vector_element(i: int) -> str:
    return f"v{i}"


def configuration_to_pba(vc: VectorConfiguration, cap: int = PBA_ELEMENT_CAP) -> ProjectorAlgebra:
    """The projectors generated inside each context, with commutation as ⊙.

    Meets, joins and complements are tabulated only for pairs that share a
    context; commensurability is plain matrix commutation.
    """
    d = vc.dimension
    reg = _MatrixRegistry()
    reg.add("0", np.zeros((d, d), dtype=complex))
    reg.add("1", np.eye(d, dtype=complex))
    for i in range(len(vc)):
        reg.add(f"v{i}", vc.projector(i))

    meet: dict = {}
    join: dict = {}
    neg: dict = {"0": "1", "1": "0"}
    for context in vc.contexts:
        atoms = _context_atoms(vc, reg, context)
        mats = {a: reg.matrices[reg.labels.index(a)] for a in atoms}
        subsets = {}
        for mask in range(2 ** len(atoms)):
            chosen = [a for k, a in enumerate(atoms) if mask >> k & 1]
            if not chosen:
                subsets[mask] = "0"
            elif len(chosen) == len(atoms):
                subsets[mask] = "1"
            elif len(chosen) == 1:
                subsets[mask] = chosen[0]
            else:
                rest = [a for a in atoms if a not in chosen]
                name = f"¬{rest[0]}" if len(rest) == 1 and not rest[0].startswith("¬") else "+".join(chosen)
                subsets[mask] = reg.add(name, sum(mats[a] for a in chosen))
            if len(reg.labels) > cap:
                raise SizeLimitError(f"projector algebra exceeds {cap} elements")
        full = 2 ** len(atoms) - 1
        for s, t in itertools.combinations_with_replacement(range(full + 1), 2):
            key = pair(subsets[s], subsets[t])
            for table, value in ((meet, subsets[s & t]), (join, subsets[s | t])):
                if table.setdefault(key, value) != value:
                    raise RuntimeError(f"inconsistent operation on {sorted(key)}")
        for s in range(full + 1):
            neg[subsets[s]] = subsets[full ^ s]

    for a, b in itertools.combinations_with_replacement(["0", "1"], 2):
        meet.setdefault(pair(a, b), a if a == b else "0")
        join.setdefault(pair(a, b), a if a == b else "1")
    for label in reg.labels:
        if label not in neg:  # a vector in no context cannot happen; guard anyway
            raise RuntimeError(f"element {label} has no complement")

    matrices = dict(zip(reg.labels, reg.matrices))
    commensurable = set()
    for a, b in itertools.combinations_with_replacement(reg.labels, 2):
        ma, mb = matrices[a], matrices[b]
        if np.max(np.abs(ma @ mb - mb @ ma)) <= TOL_COMM:
            commensurable.add(pair(a, b))
    return ProjectorAlgebra(
        tuple(reg.labels), frozenset(commensurable), meet, join, neg, "1", "0", matrices
    )


class KSResult(NamedTuple):
    colorable: bool
    coloring: dict[int, int] | None

    def to_json(self) -> dict:
        coloring = None if self.coloring is None else {str(i): v for i, v in sorted(self.coloring.items())}
        return {"colorable": self.colorable, "coloring": coloring}


def padded_contexts(vc: VectorConfiguration) -> tuple[list[list[int]], int]:
    """Exactly-one constraints over vector indices plus implicit rest variables.

    A context with fewer than ``d`` vectors gets one extra variable for the
    projector onto the rest of the space; contexts spanning the same
    subspace share it.  Returns the constraints and the variable count.
    """
    reg = _MatrixRegistry()
    n = len(vc)
    constraints = []
    for context in vc.contexts:
        vars_ = list(context)
        if len(context) < vc.dimension:
            before = len(reg.labels)
            label = reg.add(f"r{before}", _rest_matrix(vc, context))
            vars_.append(n + reg.labels.index(label))
        constraints.append(vars_)
    return constraints, n + len(reg.labels)


def verify_coloring(vc: VectorConfiguration, coloring: Mapping[int, int]) -> list[Violation]:
    """Direct check: full contexts carry exactly one 1, orthogonal vectors never share a 1."""
    problems = []
    if set(coloring) != set(range(len(vc))) or any(v not in (0, 1) for v in coloring.values()):
        return [Violation("domain", (), "coloring must map every vector index to 0 or 1")]
    for context in vc.contexts:
        ones = sum(coloring[i] for i in context)
        if len(context) == vc.dimension and ones != 1:
            problems.append(Violation("context", context, f"{ones} vectors colored 1"))
        elif ones > 1:
            problems.append(Violation("context", context, f"{ones} orthogonal vectors colored 1"))
    return problems


def ks_colorable(vc: VectorConfiguration, cap: int = VECTOR_CAP) -> KSResult:
    """Search for a 0/1 coloring with exactly one 1 in every padded context.

    Backtracking over variables ordered by decreasing context membership
    (vectors before rest variables, then by index), trying 1 before 0 and
    propagating each decision through the exactly-one constraints.
    """
    if len(vc) > cap:
        raise SizeLimitError(f"{len(vc)} vectors exceed the cap of {cap}")
    constraints, nvars = padded_contexts(vc)
    member: list[list[int]] = [[] for _ in range(nvars)]
    for k, c in enumerate(constraints):
        for v in c:
            member[v].append(k)
    order = sorted(range(nvars), key=lambda v: (-len(member[v]), v))

    def propagate(vals: list, queue: list) -> bool:
        while queue:
            v, x = queue.pop()
            if vals[v] is not None:
                if vals[v] != x:
                    return False
                continue
            vals[v] = x
            for k in member[v]:
                c = constraints[k]
                if x == 1:
                    queue.extend((u, 0) for u in c if u != v)
                    continue
                open_ = [u for u in c if vals[u] is None]
                if not open_ and all(vals[u] == 0 for u in c):
                    return False
                if len(open_) == 1 and all(vals[u] == 0 for u in c if u != open_[0]):
                    queue.append((open_[0], 1))
        return True

    def search(vals: list):
        free = next((v for v in order if vals[v] is None), None)
        if free is None:
            return vals
        for x in (1, 0):
            trial = list(vals)
            if propagate(trial, [(free, x)]):
                done = search(trial)
                if done is not None:
                    return done
        return None

    solution = search([None] * nvars)
    if solution is None:
        return KSResult(False, None)
    coloring = {i: solution[i] for i in range(len(vc))}
    problems = verify_coloring(vc, coloring)
    if problems:
        raise RuntimeError(f"coloring failed its own check: {problems[0]}")
    return KSResult(True, coloring)
