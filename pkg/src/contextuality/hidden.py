"""Hidden global distributions by exact linear feasibility.

A model is non-contextual when some probability distribution over global
assignments marginalizes onto every context table.  There is one LP variable
per global assignment; the constraints are one equality per table cell plus
normalization.  Infeasible systems come back with a Bell-type functional that
the model violates, checked exactly before it is returned.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

from .errors import ModelError, SizeLimitError
from .scenario import (
    Context,
    EmpiricalModel,
    GlobalAssignment,
    MeasurementScenario,
    Result,
    context_key,
    format_fraction,
    require_valid,
    restrict_assignment,
    result_key,
)
from .simplex import phase_one

DEFAULT_ASSIGNMENT_CAP = 2**24

Cell = tuple[Context, Result]


def enumerate_assignments(
    scenario: MeasurementScenario, cap: int = DEFAULT_ASSIGNMENT_CAP
) -> list[GlobalAssignment]:
    """All global assignments, lexicographic in measurement then outcome order."""
    count = scenario.assignment_count()
    if count > cap:
        raise SizeLimitError(f"{count} global assignments exceed the cap of {cap}")
    ms = scenario.measurements
    return [
        GlobalAssignment(tuple(zip(ms, combo)))
        for combo in itertools.product(*(scenario.outcomes[m] for m in ms))
    ]


@dataclass(frozen=True)
class HiddenDistribution:
    weights: Mapping[GlobalAssignment, Fraction]

    def marginal(self, context: Sequence[str]) -> dict[Result, Fraction]:
        out: dict[Result, Fraction] = {}
        for g, w in self.weights.items():
            r = restrict_assignment(g, context)
            out[r] = out.get(r, Fraction(0)) + w
        return out

    def reproduces(self, model: EmpiricalModel) -> bool:
        """Exact check of normalization, positivity and every table cell."""
        if any(w < 0 for w in self.weights.values()):
            return False
        if sum(self.weights.values(), Fraction(0)) != 1:
            return False
        for ctx, r, p in model.cells():
            if self.marginal(ctx).get(r, Fraction(0)) != p:
                return False
        return True


@dataclass(frozen=True)
class FeasibilityCertificate:
    feasible: bool
    distribution: HiddenDistribution | None = None
    functional: Mapping[Cell, Fraction] = field(default_factory=dict)
    value: Fraction | None = None
    classical_bound: Fraction | None = None

    def to_json(self) -> dict:
        if self.feasible:
            return {
                "feasible": True,
                "weights": {g.key(): format_fraction(w) for g, w in self.distribution.weights.items()},
            }
        return {
            "feasible": False,
            "functional": functional_to_json(self.functional),
            "value": format_fraction(self.value),
            "classical_bound": format_fraction(self.classical_bound),
        }


def functional_to_json(functional: Mapping[Cell, Fraction]) -> dict:
    out: dict[str, dict[str, str]] = {}
    for (ctx, r), c in functional.items():
        out.setdefault(context_key(ctx), {})[result_key(r)] = format_fraction(c)
    return out


class BellValue(NamedTuple):
    value: Fraction
    classical_bound: Fraction


def bell_functional_value(
    model: EmpiricalModel,
    functional: Mapping[tuple[Sequence[str], Sequence[str]], object],
    cap: int = DEFAULT_ASSIGNMENT_CAP,
) -> BellValue:
    """Evaluate a linear functional on the model and its maximum over assignments."""
    sc = model.scenario
    coeffs: dict[Cell, Fraction] = {}
    for (raw_ctx, raw_res), c in functional.items():
        raw_ctx = tuple(raw_ctx)
        raw_res = tuple(raw_res)
        try:
            ctx = sc.find_context(raw_ctx)
        except ModelError:
            raise ModelError(f"functional names unknown context {list(raw_ctx)}") from None
        if len(raw_res) != len(ctx):
            raise ModelError(f"result {list(raw_res)} does not fit context {list(ctx)}")
        res = tuple(raw_res[raw_ctx.index(m)] for m in ctx)
        if res not in set(sc.results(ctx)):
            raise ModelError(f"{list(res)} is not a result of context {list(ctx)}")
        coeffs[(ctx, res)] = coeffs.get((ctx, res), Fraction(0)) + Fraction(c)

    value = sum((c * model.prob(ctx, r) for (ctx, r), c in coeffs.items()), Fraction(0))
    if not coeffs:
        return BellValue(value, Fraction(0))
    best = None
    for g in enumerate_assignments(sc, cap):
        total = sum(
            (c for (ctx, r), c in coeffs.items() if restrict_assignment(g, ctx) == r),
            Fraction(0),
        )
        if best is None or total > best:
            best = total
    return BellValue(value, best)


def chsh_functional(
    alice: Sequence[str] = ("A0", "A1"),
    bob: Sequence[str] = ("B0", "B1"),
    outcomes: Sequence[str] = ("0", "1"),
) -> dict[Cell, Fraction]:
    """Correlator sum E(a0,b0) + E(a0,b1) + E(a1,b0) - E(a1,b1) as cell coefficients."""
    out: dict[Cell, Fraction] = {}
    for i, a in enumerate(alice):
        for j, b in enumerate(bob):
            sign = -1 if (i, j) == (1, 1) else 1
            for x in outcomes:
                for y in outcomes:
                    corr = 1 if x == y else -1
                    ctx, res = (a, b), (x, y)
                    if b < a:
                        ctx, res = (b, a), (y, x)
                    out[(ctx, res)] = Fraction(sign * corr)
    return out


def _constraint_system(model: EmpiricalModel, assignments: list[GlobalAssignment]):
    cells = [(ctx, r) for ctx, r, _ in model.cells()]
    index = {cell: i for i, cell in enumerate(cells)}
    A = [[Fraction(0)] * len(assignments) for _ in range(len(cells) + 1)]
    for j, g in enumerate(assignments):
        A[-1][j] = Fraction(1)
        for ctx in model.scenario.contexts:
            A[index[(ctx, restrict_assignment(g, ctx))]][j] = Fraction(1)
    b = [model.prob(ctx, r) for ctx, r in cells] + [Fraction(1)]
    return cells, A, b


def _primitive(coeffs: list[Fraction]) -> list[Fraction]:
    """Rescale by a positive factor to coprime integers."""
    nonzero = [c for c in coeffs if c]
    if not nonzero:
        return coeffs
    lcm = math.lcm(*(c.denominator for c in nonzero))
    ints = [int(c * lcm) for c in coeffs]
    g = math.gcd(*ints)
    return [Fraction(v, g) for v in ints]


def check_hidden_distribution(
    model: EmpiricalModel, cap: int = DEFAULT_ASSIGNMENT_CAP
) -> FeasibilityCertificate:
    """Decide whether a hidden global distribution exists, with a witness either way."""
    require_valid(model)
    assignments = enumerate_assignments(model.scenario, cap)
    cells, A, b = _constraint_system(model, assignments)
    res = phase_one(A, b)

    if res.x is not None:
        weights = {g: w for g, w in zip(assignments, res.x) if w}
        dist = HiddenDistribution(weights)
        if not dist.reproduces(model):
            raise RuntimeError("simplex returned a point that does not reproduce the model")
        return FeasibilityCertificate(True, distribution=dist)

    # y^T A <= 0 < y^T b; the normalization multiplier is a constant offset
    coeffs = _primitive(res.farkas[:-1])
    functional = {cell: c for cell, c in zip(cells, coeffs) if c}
    value, bound = bell_functional_value(model, functional, cap)
    if not value > bound:
        raise RuntimeError("Farkas functional failed its exact verification")
    return FeasibilityCertificate(False, functional=functional, value=value, classical_bound=bound)


def is_weakly_contextual(model: EmpiricalModel, cap: int = DEFAULT_ASSIGNMENT_CAP) -> bool:
    return not check_hidden_distribution(model, cap).feasible
