"""Finite Boolean algebras given by operation tables, and finite Stone duality.

Binary tables are keyed by unordered pairs (``frozenset({a, b})``, or
``frozenset({a})`` for ``a`` with itself), which builds commutativity in.
The partial order is derived from the meet: ``a <= b`` iff ``a & b == a``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import ModelError, SizeLimitError, Violation

Element = Hashable

MAX_POWERSET_SIZE = 16


def pair(a: Element, b: Element) -> frozenset:
    return frozenset((a, b))


class _ComputedTable(Mapping):
    """A binary table evaluated on demand, for algebras too big to tabulate."""

    def __init__(self, elements: Sequence[Element], op: Callable[[Element, Element], Element]):
        self._elements = elements
        self._members = set(elements)
        self._op = op

    def __getitem__(self, key: frozenset) -> Element:
        items = tuple(key)
        if not items or len(items) > 2 or not set(items) <= self._members:
            raise KeyError(key)
        a, b = items if len(items) == 2 else (items[0], items[0])
        return self._op(a, b)

    def __iter__(self) -> Iterator[frozenset]:
        for i, a in enumerate(self._elements):
            for b in self._elements[i:]:
                yield pair(a, b)

    def __len__(self) -> int:
        n = len(self._elements)
        return n * (n + 1) // 2


@dataclass(frozen=True, eq=False)
class FiniteBooleanAlgebra:
    elements: tuple
    meet_table: Mapping[frozenset, Element]
    join_table: Mapping[frozenset, Element]
    neg_table: Mapping[Element, Element]
    top: Element
    bottom: Element

    def meet(self, a: Element, b: Element) -> Element:
        return self.meet_table[pair(a, b)]

    def join(self, a: Element, b: Element) -> Element:
        return self.join_table[pair(a, b)]

    def neg(self, a: Element) -> Element:
        return self.neg_table[a]

    def leq(self, a: Element, b: Element) -> bool:
        return self.meet(a, b) == a

    def order(self) -> frozenset:
        """The partial order as a set of pairs ``(a, b)`` with ``a <= b``."""
        return frozenset((a, b) for a in self.elements for b in self.elements if self.leq(a, b))

    def atoms(self) -> list[Element]:
        return [
            x
            for x in self.elements
            if x != self.bottom and all(self.meet(x, y) in (self.bottom, x) for y in self.elements)
        ]

    def __len__(self) -> int:
        return len(self.elements)


def powerset_algebra(n: int) -> FiniteBooleanAlgebra:
    """Subsets of ``{0, ..., n-1}`` under inclusion, as frozensets."""
    if not isinstance(n, int) or not 0 <= n <= MAX_POWERSET_SIZE:
        raise SizeLimitError(f"powerset size must be an integer in [0, {MAX_POWERSET_SIZE}], got {n!r}")
    elements = tuple(
        frozenset(i for i in range(n) if mask >> i & 1) for mask in range(2**n)
    )
    full = frozenset(range(n))
    return FiniteBooleanAlgebra(
        elements,
        _ComputedTable(elements, lambda a, b: a & b),
        _ComputedTable(elements, lambda a, b: a | b),
        {x: full - x for x in elements},
        full,
        frozenset(),
    )


def algebra_from_partition(blocks: Iterable[Iterable[Hashable]]) -> FiniteBooleanAlgebra:
    """The algebra of all unions of the given disjoint, non-empty blocks."""
    parts = [frozenset(b) for b in blocks]
    if any(not b for b in parts):
        raise ModelError("partition blocks must be non-empty")
    if sum(len(b) for b in parts) != len(frozenset().union(*parts)):
        raise ModelError("partition blocks overlap")
    elements = tuple(
        frozenset().union(*(parts[i] for i in range(len(parts)) if mask >> i & 1))
        for mask in range(2 ** len(parts))
    )
    full = frozenset().union(*parts)
    meet = {pair(a, b): a & b for a, b in itertools.combinations_with_replacement(elements, 2)}
    join = {pair(a, b): a | b for a, b in itertools.combinations_with_replacement(elements, 2)}
    return FiniteBooleanAlgebra(elements, meet, join, {x: full - x for x in elements}, full, frozenset())


def relabel(algebra: FiniteBooleanAlgebra, names: Mapping[Element, Element]) -> FiniteBooleanAlgebra:
    """Copy ``algebra`` with every element renamed through ``names``."""
    if len(set(names[x] for x in algebra.elements)) != len(algebra.elements):
        raise ModelError("relabelling is not injective")
    elements = tuple(names[x] for x in algebra.elements)
    meet = {}
    join = {}
    for a, b in itertools.combinations_with_replacement(algebra.elements, 2):
        meet[pair(names[a], names[b])] = names[algebra.meet(a, b)]
        join[pair(names[a], names[b])] = names[algebra.join(a, b)]
    neg = {names[x]: names[algebra.neg(x)] for x in algebra.elements}
    return FiniteBooleanAlgebra(elements, meet, join, neg, names[algebra.top], names[algebra.bottom])


def validate_boolean_algebra(b: FiniteBooleanAlgebra) -> list[Violation]:
    """Exhaustive check of the lattice, distributivity and complement laws."""
    problems: list[Violation] = []
    els = b.elements
    members = set(els)
    if len(members) != len(els):
        problems.append(Violation("elements", (), "duplicate elements"))
    for name, x in (("top", b.top), ("bottom", b.bottom)):
        if x not in members:
            problems.append(Violation("bounds", (name,), f"{x!r} is not an element"))
    if problems:
        return problems

    n = len(els)
    size = [Violation("size", (), f"{n} elements is not a power of two")] if n & (n - 1) else []

    for a, c in itertools.combinations_with_replacement(els, 2):
        for label, table in (("meet", b.meet_table), ("join", b.join_table)):
            try:
                r = table[pair(a, c)]
            except KeyError:
                problems.append(Violation("completeness", (label, a, c), "missing entry"))
                continue
            if r not in members:
                problems.append(Violation("closure", (label, a, c), f"{r!r} is not an element"))
    for a in els:
        if a not in b.neg_table:
            problems.append(Violation("completeness", ("neg", a), "missing entry"))
        elif b.neg_table[a] not in members:
            problems.append(Violation("closure", ("neg", a), f"{b.neg_table[a]!r} is not an element"))
    if problems:
        return size + problems
    problems = size

    leq = {(a, c) for a in els for c in els if b.meet(a, c) == a}
    for a in els:
        if (a, a) not in leq:
            problems.append(Violation("order", (a,), "not reflexive"))
        if (b.bottom, a) not in leq:
            problems.append(Violation("bounds", (a,), "bottom is not below it"))
        if (a, b.top) not in leq:
            problems.append(Violation("bounds", (a,), "not below top"))
    for a, c in itertools.permutations(els, 2):
        if (a, c) in leq and (c, a) in leq:
            problems.append(Violation("order", (a, c), "antisymmetry fails"))
    for a, c, d in itertools.product(els, repeat=3):
        if (a, c) in leq and (c, d) in leq and (a, d) not in leq:
            problems.append(Violation("order", (a, c, d), "transitivity fails"))
            break
    for a, c in itertools.combinations_with_replacement(els, 2):
        m, j = b.meet(a, c), b.join(a, c)
        lower = {x for x in els if (x, a) in leq and (x, c) in leq}
        upper = {x for x in els if (a, x) in leq and (c, x) in leq}
        if m not in lower or any((x, m) not in leq for x in lower):
            problems.append(Violation("meet", (a, c), f"{m!r} is not the greatest lower bound"))
        if j not in upper or any((j, x) not in leq for x in upper):
            problems.append(Violation("join", (a, c), f"{j!r} is not the least upper bound"))
    for a, c, d in itertools.product(els, repeat=3):
        if b.meet(a, b.join(c, d)) != b.join(b.meet(a, c), b.meet(a, d)):
            problems.append(Violation("distributive", (a, c, d), "meet does not distribute over join"))
            break
    for a in els:
        na = b.neg(a)
        if b.meet(a, na) != b.bottom or b.join(a, na) != b.top:
            problems.append(Violation("complement", (a,), f"{na!r} is not a complement"))
    return problems


@dataclass(frozen=True, eq=False)
class Valuation:
    """A two-valued map on an algebra (total or partial)."""

    domain: object
    values: Mapping[Element, int]

    def key(self) -> tuple:
        return tuple(self.values[x] for x in self.domain.elements)

    def ones(self) -> frozenset:
        return frozenset(x for x, v in self.values.items() if v)


def is_homomorphism(b: FiniteBooleanAlgebra, values: Mapping[Element, int]) -> bool:
    """Whether ``values`` is a Boolean algebra morphism into {0, 1}."""
    if any(values.get(x) not in (0, 1) for x in b.elements):
        return False
    if values[b.top] != 1 or values[b.bottom] != 0:
        return False
    if any(values[b.neg(x)] != 1 - values[x] for x in b.elements):
        return False
    for x, y in itertools.combinations(b.elements, 2):
        if values[b.meet(x, y)] != values[x] & values[y]:
            return False
        if values[b.join(x, y)] != values[x] | values[y]:
            return False
    return True


def stone_spectrum(b: FiniteBooleanAlgebra) -> list[Valuation]:
    """All morphisms into the two-element algebra, one per atom.

    Each candidate sends ``x`` to 1 exactly when a fixed atom lies below
    ``x``; every candidate is checked to be a morphism before it is returned.
    """
    out = []
    for atom in b.atoms():
        values = {x: int(b.meet(atom, x) == atom) for x in b.elements}
        if not is_homomorphism(b, values):
            raise ModelError(f"atom {atom!r} does not induce a morphism; the algebra is not Boolean")
        out.append(Valuation(b, values))
    return out


@dataclass(frozen=True, eq=False)
class StoneIsomorphism:
    """The map ``a -> {points w : w(a) = 1}`` into the subsets of the spectrum."""

    algebra: FiniteBooleanAlgebra
    spectrum: tuple[Valuation, ...]
    mapping: Mapping[Element, frozenset]
    codomain: FiniteBooleanAlgebra


def isomorphism_problems(b: FiniteBooleanAlgebra, codomain: FiniteBooleanAlgebra, f: Mapping) -> list[str]:
    problems = []
    images = [f[x] for x in b.elements]
    if set(images) != set(codomain.elements) or len(set(images)) != len(images):
        problems.append("map is not a bijection onto the codomain")
    if f[b.top] != codomain.top or f[b.bottom] != codomain.bottom:
        problems.append("map does not preserve the bounds")
    for x in b.elements:
        if f[b.neg(x)] != codomain.neg(f[x]):
            problems.append(f"complement of {x!r} is not preserved")
    for x, y in itertools.combinations(b.elements, 2):
        if f[b.meet(x, y)] != codomain.meet(f[x], f[y]):
            problems.append(f"meet of {x!r}, {y!r} is not preserved")
        if f[b.join(x, y)] != codomain.join(f[x], f[y]):
            problems.append(f"join of {x!r}, {y!r} is not preserved")
    return problems


def stone_double_dual(b: FiniteBooleanAlgebra) -> StoneIsomorphism:
    """Represent ``b`` as the algebra of all subsets of its spectrum, verified."""
    if b.top == b.bottom:
        raise ModelError("the trivial algebra has an empty spectrum and no Stone representation")
    spectrum = stone_spectrum(b)
    codomain = powerset_algebra(len(spectrum)) if len(spectrum) <= MAX_POWERSET_SIZE else None
    if codomain is None:
        raise SizeLimitError(f"spectrum of {len(spectrum)} points is too large to tabulate")
    mapping = {x: frozenset(i for i, w in enumerate(spectrum) if w.values[x]) for x in b.elements}
    problems = isomorphism_problems(b, codomain, mapping)
    if problems:
        raise ModelError("Stone map is not an isomorphism: " + "; ".join(problems[:5]))
    return StoneIsomorphism(b, tuple(spectrum), mapping, codomain)
