"""Random partial Boolean algebras and vector pools for the property tests."""

from __future__ import annotations

import itertools
import math
import random

from contextuality.pba import FinitePartialBooleanAlgebra, validate_pba
from contextuality.stone import pair


def _pasting(atom_counts: list[int], links: list[tuple[int, int, int, int]]):
    """Boolean blocks on ``atom_counts`` atoms, pasted along shared atoms.

    ``links`` holds ``(i, s, j, t)``: atom ``s`` of block ``i`` is the same
    element as atom ``t`` of block ``j`` (and so are their complements).
    Every block shares its bounds.  Returns ``None`` when the identifications
    clash.
    """
    parent: dict = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        parent[find(x)] = find(y)

    full = [2**a - 1 for a in atom_counts]
    for i in range(len(atom_counts)):
        union((i, 0), (0, 0))
        union((i, full[i]), (0, full[0]))
    for i, s, j, t in links:
        union((i, 1 << s), (j, 1 << t))
        union((i, full[i] ^ (1 << s)), (j, full[j] ^ (1 << t)))

    names: dict = {find((0, 0)): "0", find((0, full[0])): "1"}
    if len(names) < 2:
        return None
    order = ["0", "1"]
    for i, n in enumerate(atom_counts):
        for mask in range(2**n):
            root = find((i, mask))
            if root not in names:
                names[root] = f"b{i}:{mask}"
                order.append(names[root])

    def name(i, mask):
        return names[find((i, mask))]

    meet, join, neg, comm = {}, {}, {}, set()
    for i, n in enumerate(atom_counts):
        for s, t in itertools.combinations_with_replacement(range(2**n), 2):
            key = pair(name(i, s), name(i, t))
            comm.add(key)
            for table, value in ((meet, name(i, s & t)), (join, name(i, s | t))):
                if table.setdefault(key, value) != value:
                    return None
        for s in range(2**n):
            if neg.setdefault(name(i, s), name(i, full[i] ^ s)) != name(i, full[i] ^ s):
                return None
    return FinitePartialBooleanAlgebra(tuple(order), frozenset(comm), meet, join, neg, "1", "0")


def two_blocks_on_bounds(a: int = 2, b: int = 2) -> FinitePartialBooleanAlgebra:
    return _pasting([a, b], [])


def random_pasting(rng: random.Random, cliques: int | None = None, max_elements: int = 32) -> FinitePartialBooleanAlgebra:
    """A valid pasting of at most three Boolean blocks, resampled until valid.

    With ``cliques`` given, resample until exactly that many maximal cliques.
    """
    while True:
        k = cliques or rng.randint(1, 3)
        atoms = [rng.randint(2, 4) for _ in range(k)]
        links = []
        for i, j in itertools.combinations(range(k), 2):
            if rng.random() < 0.6:
                links.append((i, rng.randrange(atoms[i]), j, rng.randrange(atoms[j])))
        p = _pasting(atoms, links)
        if p is None or len(p.elements) > max_elements:
            continue
        n = len(p.maximal_cliques)
        if n > 3 or (cliques is not None and n != cliques) or validate_pba(p):
            continue
        return p


def vector_pool() -> list[tuple]:
    """Rays of {-1, 0, 1}^3 up to sign, plus a few complex ones."""
    pool = []
    for v in itertools.product((-1, 0, 1), repeat=3):
        if any(v) and next(x for x in v if x) > 0:
            pool.append(tuple(float(x) for x in v))
    pool += [(1, 1j, 0), (1, -1j, 0), (0, 1, 1j), (0, 1, -1j)]
    return pool


def peres_rays() -> list[tuple]:
    """The 33 rays of Peres' set in three dimensions."""
    r = math.sqrt(2)
    base = [(1, 0, 0), (1, 1, 0), (1, -1, 0), (1, 0, r), (1, 0, -r), (1, 1, r), (1, 1, -r), (1, -1, r), (1, -1, -r)]
    rays = []
    for v in base:
        for perm in itertools.permutations(v):
            if not any(_parallel(perm, w) for w in rays):
                rays.append(perm)
    return rays


def _parallel(u, v) -> bool:
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    return abs(abs(dot) - nu * nv) < 1e-9
