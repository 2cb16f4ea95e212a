"""Finite partial Boolean algebras: validation, valuations and gluing.

Operations are tabulated only on commensurable pairs.  Each maximal clique
of the commensurability graph must carry a full Boolean algebra, and a
valuation is a two-valued map that respects every defined operation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Mapping

import networkx as nx

from .errors import GluingError, ModelError, SizeLimitError, Violation
from .stone import (
    Element,
    FiniteBooleanAlgebra,
    Valuation,
    is_homomorphism,
    pair,
    validate_boolean_algebra,
)

VALUATION_ELEMENT_CAP = 64


@dataclass(frozen=True, eq=False)
class FinitePartialBooleanAlgebra:
    elements: tuple
    commensurable: frozenset  # unordered pairs; a singleton marks a ⊙ a
    meet_table: Mapping[frozenset, Element]
    join_table: Mapping[frozenset, Element]
    neg_table: Mapping[Element, Element]
    top: Element
    bottom: Element

    def commensurable_with(self, a: Element, b: Element) -> bool:
        return pair(a, b) in self.commensurable

    def meet(self, a: Element, b: Element) -> Element:
        return self.meet_table[pair(a, b)]

    def join(self, a: Element, b: Element) -> Element:
        return self.join_table[pair(a, b)]

    def neg(self, a: Element) -> Element:
        return self.neg_table[a]

    @cached_property
    def _position(self) -> dict:
        return {x: i for i, x in enumerate(self.elements)}

    def sort(self, items: Iterable[Element]) -> tuple:
        return tuple(sorted(items, key=self._position.__getitem__))

    @cached_property
    def maximal_cliques(self) -> tuple[frozenset, ...]:
        """Maximal sets of pairwise commensurable elements, in element order."""
        g = nx.Graph()
        g.add_nodes_from(self.elements)
        g.add_edges_from(tuple(p) for p in self.commensurable if len(p) == 2)
        cliques = [self.sort(c) for c in nx.find_cliques(g)]
        cliques.sort(key=lambda c: [self._position[x] for x in c])
        return tuple(frozenset(c) for c in cliques)

    def clique_algebra(self, clique: Iterable[Element]) -> FiniteBooleanAlgebra:
        """The operations restricted to ``clique``; entries may fall outside it."""
        members = self.sort(clique)
        meet, join = {}, {}
        for a, b in itertools.combinations_with_replacement(members, 2):
            key = pair(a, b)
            if key in self.meet_table:
                meet[key] = self.meet_table[key]
            if key in self.join_table:
                join[key] = self.join_table[key]
        neg = {x: self.neg_table[x] for x in members if x in self.neg_table}
        return FiniteBooleanAlgebra(members, meet, join, neg, self.top, self.bottom)

    @classmethod
    def from_boolean_algebra(cls, b: FiniteBooleanAlgebra) -> "FinitePartialBooleanAlgebra":
        """View a Boolean algebra as a partial one with everything commensurable."""
        pairs = [pair(x, y) for x, y in itertools.combinations_with_replacement(b.elements, 2)]
        return cls(
            tuple(b.elements),
            frozenset(pairs),
            {p: b.meet_table[p] for p in pairs},
            {p: b.join_table[p] for p in pairs},
            dict(b.neg_table),
            b.top,
            b.bottom,
        )


def validate_pba(p: FinitePartialBooleanAlgebra) -> list[Violation]:
    problems: list[Violation] = []
    members = set(p.elements)
    if len(members) != len(p.elements):
        problems.append(Violation("elements", (), "duplicate elements"))
    for name, x in (("top", p.top), ("bottom", p.bottom)):
        if x not in members:
            problems.append(Violation("bounds", (name,), f"{x!r} is not an element"))
    if problems:
        return problems

    for key in sorted(p.commensurable, key=lambda k: p.sort(k)):
        if not key <= members or not 1 <= len(key) <= 2:
            problems.append(Violation("commensurability", tuple(key), "pair names unknown elements"))
    if problems:
        return problems

    for x in p.elements:
        if not p.commensurable_with(x, x):
            problems.append(Violation("reflexivity", (x,), "element is not commensurable with itself"))
        for bound in (p.top, p.bottom):
            if not p.commensurable_with(x, bound):
                problems.append(Violation("commensurability", (x, bound), "not commensurable with a bound"))
        if x not in p.neg_table:
            problems.append(Violation("completeness", ("neg", x), "missing complement"))
        elif p.neg_table[x] not in members:
            problems.append(Violation("closure", ("neg", x), f"{p.neg_table[x]!r} is not an element"))

    for label, table in (("meet", p.meet_table), ("join", p.join_table)):
        for key in p.commensurable:
            if key not in table:
                problems.append(Violation("completeness", (label, *p.sort(key)), "missing entry on a commensurable pair"))
            elif table[key] not in members:
                problems.append(Violation("closure", (label, *p.sort(key)), f"{table[key]!r} is not an element"))
        for key in table:
            if key not in p.commensurable:
                problems.append(Violation("domain", (label, *p.sort(key)), "entry on a non-commensurable pair"))
    if problems:
        return problems

    for i, clique in enumerate(p.maximal_cliques):
        algebra = p.clique_algebra(clique)
        for v in validate_boolean_algebra(algebra):
            problems.append(Violation("clique", (i, v.kind, *v.location), v.message))
    return problems


def _constraints(p: FinitePartialBooleanAlgebra):
    """Index-based (a, b, meet, join) tuples for every commensurable pair."""
    idx = p._position
    out = []
    for key in p.commensurable:
        if key in p.meet_table and key in p.join_table:
            items = tuple(key)
            a, b = items if len(items) == 2 else (items[0], items[0])
            out.append((idx[a], idx[b], idx[p.meet_table[key]], idx[p.join_table[key]]))
    out.sort()
    return out


def is_valuation(p: FinitePartialBooleanAlgebra, values: Mapping[Element, int]) -> bool:
    if any(values.get(x) not in (0, 1) for x in p.elements):
        return False
    if values[p.top] != 1 or values[p.bottom] != 0:
        return False
    if any(values[p.neg(x)] != 1 - values[x] for x in p.elements):
        return False
    for key in p.commensurable:
        if key in p.meet_table and key in p.join_table:
            items = tuple(key)
            a, b = items if len(items) == 2 else (items[0], items[0])
            if values[p.meet_table[key]] != values[a] & values[b]:
                return False
            if values[p.join_table[key]] != values[a] | values[b]:
                return False
    return True


def pba_valuations(p: FinitePartialBooleanAlgebra, cap: int = VALUATION_ELEMENT_CAP) -> list[Valuation]:
    """Every valuation, by backtracking with unit propagation.

    Deciding a value propagates through complements and through every defined
    meet and join touching it; search branches on the first undecided element
    in element order, trying 0 before 1.
    """
    n = len(p.elements)
    if n > cap:
        raise SizeLimitError(f"{n} elements exceed the valuation search cap of {cap}")
    idx = p._position
    neg = [idx[p.neg(x)] for x in p.elements]
    cons = _constraints(p)
    watch: list[list[int]] = [[] for _ in range(n)]
    for k, (a, b, m, j) in enumerate(cons):
        for v in {a, b, m, j}:
            watch[v].append(k)

    def propagate(vals: list, queue: list) -> bool:
        while queue:
            i, v = queue.pop()
            if vals[i] is not None:
                if vals[i] != v:
                    return False
                continue
            vals[i] = v
            queue.append((neg[i], 1 - v))
            for k in watch[i]:
                a, b, m, j = cons[k]
                va, vb, vm, vj = vals[a], vals[b], vals[m], vals[j]
                if va is not None and vb is not None:
                    queue.append((m, va & vb))
                    queue.append((j, va | vb))
                if va == 0 or vb == 0:
                    queue.append((m, 0))
                if va == 1 or vb == 1:
                    queue.append((j, 1))
                if vm == 1:
                    queue.append((a, 1))
                    queue.append((b, 1))
                if vj == 0:
                    queue.append((a, 0))
                    queue.append((b, 0))
                if vm == 0 and va == 1:
                    queue.append((b, 0))
                if vm == 0 and vb == 1:
                    queue.append((a, 0))
                if vj == 1 and va == 0:
                    queue.append((b, 1))
                if vj == 1 and vb == 0:
                    queue.append((a, 1))
        return True

    found: list[list[int]] = []

    def search(vals: list) -> None:
        free = next((i for i, v in enumerate(vals) if v is None), None)
        if free is None:
            found.append(vals)
            return
        for v in (0, 1):
            trial = list(vals)
            if propagate(trial, [(free, v)]):
                search(trial)

    start: list = [None] * n
    if propagate(start, [(idx[p.top], 1), (idx[p.bottom], 0)]):
        search(start)

    out = []
    for vals in found:
        values = dict(zip(p.elements, vals))
        if not is_valuation(p, values):
            raise RuntimeError("valuation search produced an invalid assignment")
        out.append(Valuation(p, values))
    return out


def _as_values(local) -> dict:
    return dict(local.values if isinstance(local, Valuation) else local)


def glue_valuations(
    p: FinitePartialBooleanAlgebra, locals: Mapping[Iterable[Hashable], Valuation | Mapping]
) -> Valuation:
    """Combine valuations on the maximal cliques into one global valuation.

    Locals must cover exactly the maximal cliques.  Any disagreement on a
    shared element raises ``GluingError``; a local that agrees on overlaps but
    is not a morphism on its clique raises ``ModelError``.
    """
    family = {frozenset(k): _as_values(v) for k, v in locals.items()}
    cliques = p.maximal_cliques
    if set(family) != set(cliques):
        raise ModelError("local valuations must be indexed by exactly the maximal cliques")
    for clique in cliques:
        if set(family[clique]) != set(clique):
            raise ModelError(f"local valuation on {list(p.sort(clique))} has the wrong domain")

    # clashes first, so a disagreement is reported even when a local is also malformed
    for c1, c2 in itertools.combinations(cliques, 2):
        for x in p.sort(c1 & c2):
            v1, v2 = family[c1][x], family[c2][x]
            if v1 != v2:
                raise GluingError(f"local valuations disagree on {x!r}: {v1} vs {v2}", element=x, values=(v1, v2))
    for clique in cliques:
        if not is_homomorphism(p.clique_algebra(clique), family[clique]):
            raise ModelError(f"local valuation on {list(p.sort(clique))} is not a morphism")

    merged: dict = {}
    for clique in cliques:
        merged.update(family[clique])
    values = {x: merged[x] for x in p.elements}
    if not is_valuation(p, values):
        raise GluingError("glued map is not a valuation", element=None, values=())
    return Valuation(p, values)
