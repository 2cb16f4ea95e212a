"""Exact feasibility for ``A x = b, x >= 0`` over the rationals.

Phase one of the tableau simplex method with Bland's rule.  When the system
is infeasible the final reduced costs of the artificial columns yield a
Farkas vector ``y`` with ``y^T A <= 0`` and ``y^T b > 0``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


class PhaseOneResult(NamedTuple):
    x: list[Fraction] | None
    farkas: list[Fraction] | None
    pivots: int


def _pivot(tableau: list[list[Fraction]], cost: list[Fraction], r: int, j: int) -> None:
    row = tableau[r]
    inv = ONE / row[j]
    if inv != 1:
        row[:] = [v * inv if v else v for v in row]
    nz = [k for k, v in enumerate(row) if v]
    for i, other in enumerate(tableau):
        if i == r:
            continue
        f = other[j]
        if f:
            for k in nz:
                other[k] -= f * row[k]
    f = cost[j]
    if f:
        for k in nz:
            cost[k] -= f * row[k]


def phase_one(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction], max_pivots: int = 100_000) -> PhaseOneResult:
    """Find a basic feasible point of ``A x = b, x >= 0`` or a Farkas certificate.

    Columns are tried in index order (Bland's rule), so the returned vertex is
    the first one reached under that order.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    if len(b) != m:
        raise ValueError("A and b have different row counts")
    if m == 0:
        return PhaseOneResult([ZERO] * n, None, 0)

    signs = [(-1 if Fraction(bi) < 0 else 1) for bi in b]
    width = n + m + 1
    tableau = []
    for i in range(m):
        s = signs[i]
        row = [Fraction(v) * s for v in A[i]]
        if len(row) != n:
            raise ValueError("ragged constraint matrix")
        art = [ZERO] * m
        art[i] = ONE
        tableau.append(row + art + [Fraction(b[i]) * s])
    basis = [n + i for i in range(m)]

    # reduced costs of phase one; last entry holds minus the objective value
    cost = [ZERO] * width
    for j in range(n):
        cost[j] = -sum((tableau[i][j] for i in range(m)), ZERO)
    cost[-1] = -sum((tableau[i][-1] for i in range(m)), ZERO)

    pivots = 0
    while True:
        entering = next((j for j in range(n + m) if cost[j] < 0), None)
        if entering is None:
            break
        best = None
        for i in range(m):
            a = tableau[i][entering]
            if a > 0:
                ratio = tableau[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:  # cannot happen: phase one is bounded below by zero
            raise RuntimeError("phase one reported unbounded")
        leaving = best[1]
        _pivot(tableau, cost, leaving, entering)
        basis[leaving] = entering
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("simplex exceeded its pivot budget")

    if cost[-1] == 0:
        x = [ZERO] * n
        for i, var in enumerate(basis):
            if var < n:
                x[var] = tableau[i][-1]
        return PhaseOneResult(x, None, pivots)

    # dual of phase one: y_i = 1 - reduced cost of artificial column i
    y = [(ONE - cost[n + i]) * signs[i] for i in range(m)]
    return PhaseOneResult(None, y, pivots)
