"""Measurement scenarios, empirical models, marginals and supports.

A scenario only fixes *which* measurements exist, their outcome labels and
which of them can be performed together (the contexts).  An empirical model
attaches one exact conditional distribution to every context.

Contexts are stored as tuples sorted by measurement identifier and joint
results are tuples of outcome labels in the same order, so two models built
from differently ordered inputs compare equal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .errors import ModelError, Violation

Context = tuple[str, ...]
Result = tuple[str, ...]

_RESERVED = (",", "=")


def _check_label(label: object, what: str) -> str:
    if not isinstance(label, str) or not label:
        raise ModelError(f"{what} must be a non-empty string, got {label!r}")
    for ch in _RESERVED:
        if ch in label:
            raise ModelError(f"{what} {label!r} may not contain {ch!r}")
    return label


def canonical_context(measurements: Iterable[str]) -> Context:
    ms = list(measurements)
    if len(set(ms)) != len(ms):
        raise ModelError(f"context {ms!r} repeats a measurement")
    return tuple(sorted(ms))


def context_key(context: Sequence[str]) -> str:
    return ",".join(context)


def result_key(result: Sequence[str]) -> str:
    return ",".join(result)


def to_fraction(value: object) -> Fraction:
    """Exact conversion; floats are rejected so that no rounding sneaks in."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ModelError(f"not a probability: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ModelError(f"not a rational number: {value!r}") from exc
    raise ModelError(f"probabilities must be exact rationals, got {type(value).__name__} {value!r}")


def format_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, init=False)
class MeasurementScenario:
    """Measurements, their outcome sets and the cover of contexts."""

    measurements: tuple[str, ...]
    outcomes: Mapping[str, tuple[str, ...]]
    contexts: tuple[Context, ...]

    def __init__(
        self,
        measurements: Sequence[str],
        outcomes: Mapping[str, Sequence[str]],
        contexts: Iterable[Iterable[str]],
    ) -> None:
        ms = tuple(_check_label(m, "measurement identifier") for m in measurements)
        if len(set(ms)) != len(ms):
            raise ModelError(f"measurement identifiers are not unique: {list(ms)}")
        extra = set(outcomes) - set(ms)
        if extra:
            raise ModelError(f"outcomes given for unknown measurements {sorted(extra)}")
        outs: dict[str, tuple[str, ...]] = {}
        for m in ms:
            if m not in outcomes:
                raise ModelError(f"measurement {m!r} has no outcome list")
            labels = tuple(_check_label(o, f"outcome of {m}") for o in outcomes[m])
            if not labels:
                raise ModelError(f"measurement {m!r} has an empty outcome list")
            if len(set(labels)) != len(labels):
                raise ModelError(f"measurement {m!r} repeats an outcome label")
            outs[m] = labels

        ctxs = []
        for raw in contexts:
            ctx = canonical_context(raw)
            if not ctx:
                raise ModelError("contexts must be non-empty")
            unknown = [m for m in ctx if m not in outs]
            if unknown:
                raise ModelError(f"context {list(ctx)} names unknown measurements {unknown}")
            if ctx in ctxs:
                raise ModelError(f"context {list(ctx)} is listed twice")
            ctxs.append(ctx)
        ctxs.sort()
        for a, b in itertools.permutations(ctxs, 2):
            if set(a) < set(b):
                raise ModelError(f"context {list(a)} is contained in context {list(b)}; the cover must be an antichain")
        covered = {m for ctx in ctxs for m in ctx}
        missing = [m for m in ms if m not in covered]
        if missing:
            raise ModelError(f"measurements {missing} belong to no context")

        object.__setattr__(self, "measurements", ms)
        object.__setattr__(self, "outcomes", outs)
        object.__setattr__(self, "contexts", tuple(ctxs))

    def results(self, measurements: Sequence[str]) -> list[Result]:
        """All joint results over ``measurements``, lexicographic in outcome order."""
        return [tuple(r) for r in itertools.product(*(self.outcomes[m] for m in measurements))]

    def contexts_containing(self, measurement: str) -> list[Context]:
        return [c for c in self.contexts if measurement in c]

    def find_context(self, measurements: Iterable[str]) -> Context:
        ctx = canonical_context(measurements)
        if ctx not in self.contexts:
            raise ModelError(f"{list(ctx)} is not a context of this scenario")
        return ctx

    def enclosing_context(self, measurements: Iterable[str]) -> Context:
        """First context (canonical order) containing every given measurement."""
        wanted = set(measurements)
        for ctx in self.contexts:
            if wanted <= set(ctx):
                return ctx
        raise ModelError(f"no context contains {sorted(wanted)}")

    def assignment_count(self) -> int:
        n = 1
        for m in self.measurements:
            n *= len(self.outcomes[m])
        return n


@dataclass(frozen=True, init=False)
class EmpiricalModel:
    """A scenario together with one exact probability table per context.

    Construction only normalizes keys; table-level problems (missing cells,
    negative entries, rows not summing to one) are reported by
    :func:`validate_model` rather than raised here.
    """

    scenario: MeasurementScenario
    tables: Mapping[Context, Mapping[Result, Fraction]]

    def __init__(
        self,
        scenario: MeasurementScenario,
        tables: Mapping[Sequence[str], Mapping[Sequence[str], object]],
    ) -> None:
        canon: dict[Context, dict[Result, Fraction]] = {}
        for raw_ctx, row in tables.items():
            raw_ctx = tuple(raw_ctx)
            ctx = scenario.find_context(raw_ctx)
            if ctx in canon:
                raise ModelError(f"table for context {list(ctx)} given twice")
            perm = [raw_ctx.index(m) for m in ctx]
            out: dict[Result, Fraction] = {}
            for raw_res, value in row.items():
                raw_res = tuple(raw_res)
                if len(raw_res) != len(ctx):
                    raise ModelError(f"result {list(raw_res)} has the wrong length for context {list(ctx)}")
                res = tuple(raw_res[i] for i in perm)
                for m, o in zip(ctx, res):
                    if o not in scenario.outcomes[m]:
                        raise ModelError(f"{o!r} is not an outcome of {m!r}")
                if res in out:
                    raise ModelError(f"result {list(res)} given twice in context {list(ctx)}")
                out[res] = to_fraction(value)
            order = {r: i for i, r in enumerate(scenario.results(ctx))}
            canon[ctx] = dict(sorted(out.items(), key=lambda kv: order[kv[0]]))
        canon = {c: canon[c] for c in scenario.contexts if c in canon}
        object.__setattr__(self, "scenario", scenario)
        object.__setattr__(self, "tables", canon)

    @classmethod
    def from_rows(
        cls, scenario: MeasurementScenario, rows: Mapping[Sequence[str], Sequence[object]]
    ) -> "EmpiricalModel":
        """Build from rows listed in canonical result order (as in a printed table)."""
        tables = {}
        for raw_ctx, values in rows.items():
            ctx = scenario.find_context(raw_ctx)
            results = scenario.results(ctx)
            if len(values) != len(results):
                raise ModelError(f"context {list(ctx)} needs {len(results)} entries, got {len(values)}")
            tables[ctx] = dict(zip(results, values))
        return cls(scenario, tables)

    def prob(self, context: Sequence[str], result: Sequence[str]) -> Fraction:
        return self.tables[tuple(context)].get(tuple(result), Fraction(0))

    def row(self, context: Sequence[str]) -> dict[Result, Fraction]:
        ctx = tuple(context)
        return {r: self.prob(ctx, r) for r in self.scenario.results(ctx)}

    def cells(self) -> Iterator[tuple[Context, Result, Fraction]]:
        for ctx in self.scenario.contexts:
            for r in self.scenario.results(ctx):
                yield ctx, r, self.prob(ctx, r)


@dataclass(frozen=True)
class GlobalAssignment:
    """A total choice of one outcome per measurement, kept in scenario order."""

    pairs: tuple[tuple[str, str], ...]

    @classmethod
    def from_mapping(cls, scenario: MeasurementScenario, values: Mapping[str, str]) -> "GlobalAssignment":
        missing = [m for m in scenario.measurements if m not in values]
        if missing:
            raise ModelError(f"assignment is not total, missing {missing}")
        extra = set(values) - set(scenario.measurements)
        if extra:
            raise ModelError(f"assignment names unknown measurements {sorted(extra)}")
        for m in scenario.measurements:
            if values[m] not in scenario.outcomes[m]:
                raise ModelError(f"{values[m]!r} is not an outcome of {m!r}")
        return cls(tuple((m, values[m]) for m in scenario.measurements))

    @cached_property
    def values(self) -> dict[str, str]:
        return dict(self.pairs)

    def __getitem__(self, measurement: str) -> str:
        return self.values[measurement]

    def key(self) -> str:
        return ",".join(f"{m}={o}" for m, o in self.pairs)

    @classmethod
    def from_key(cls, scenario: MeasurementScenario, key: str) -> "GlobalAssignment":
        values = {}
        for part in key.split(","):
            m, sep, o = part.partition("=")
            if not sep:
                raise ModelError(f"malformed assignment key {key!r}")
            values[m] = o
        return cls.from_mapping(scenario, values)


Support = Mapping[Context, frozenset]


class SignallingWitness(NamedTuple):
    measurements: tuple[str, ...]
    context_a: Context
    context_b: Context
    marginal_a: dict[Result, Fraction]
    marginal_b: dict[Result, Fraction]


class SignallingCheck(NamedTuple):
    no_signalling: bool
    witnesses: list[SignallingWitness]


def validate_model(model: EmpiricalModel) -> list[Violation]:
    """Every broken table invariant, located by context and result."""
    problems: list[Violation] = []
    sc = model.scenario
    for ctx in sc.contexts:
        table = model.tables.get(ctx)
        if table is None:
            problems.append(Violation("completeness", (context_key(ctx),), "no table for this context"))
            continue
        total = Fraction(0)
        for r in sc.results(ctx):
            if r not in table:
                problems.append(Violation("completeness", (context_key(ctx), result_key(r)), "missing entry"))
                continue
            p = table[r]
            if p < 0:
                problems.append(
                    Violation("negativity", (context_key(ctx), result_key(r)), f"probability {format_fraction(p)} < 0")
                )
            total += p
        if total != 1:
            problems.append(
                Violation("normalization", (context_key(ctx),), f"row sums to {format_fraction(total)}, not 1")
            )
    return problems


def require_valid(model: EmpiricalModel) -> None:
    problems = validate_model(model)
    if problems:
        raise ModelError("invalid empirical model:\n  " + "\n  ".join(map(str, problems)))


def marginalize(
    model: EmpiricalModel, context: Sequence[str], subset: Iterable[str]
) -> dict[Result, Fraction]:
    """Sum a context's table over the measurements not in ``subset``.

    Keys are partial results over ``subset`` in canonical order.
    """
    ctx = model.scenario.find_context(context)
    sub = canonical_context(subset)
    if not set(sub) <= set(ctx):
        raise ModelError(f"{list(sub)} is not a subset of context {list(ctx)}")
    if ctx not in model.tables:
        raise ModelError(f"model has no table for context {list(ctx)}")
    idx = [ctx.index(m) for m in sub]
    out = {r: Fraction(0) for r in model.scenario.results(sub)}
    for r, p in model.tables[ctx].items():
        out[tuple(r[i] for i in idx)] += p
    return out


def is_no_signalling(model: EmpiricalModel) -> SignallingCheck:
    """Check that overlapping contexts induce identical marginals.

    Agreement is tested on the full intersection of every pair of contexts,
    which implies agreement on each of its subsets.
    """
    witnesses = []
    for a, b in itertools.combinations(model.scenario.contexts, 2):
        common = tuple(m for m in a if m in b)
        if not common:
            continue
        ma = marginalize(model, a, common)
        mb = marginalize(model, b, common)
        if ma != mb:
            witnesses.append(SignallingWitness(common, a, b, ma, mb))
    return SignallingCheck(not witnesses, witnesses)


def support_of(model: EmpiricalModel) -> dict[Context, frozenset]:
    return {
        ctx: frozenset(r for r, p in model.tables.get(ctx, {}).items() if p > 0)
        for ctx in model.scenario.contexts
    }


def restrict_assignment(g: GlobalAssignment, context: Sequence[str]) -> Result:
    values = g.values
    try:
        return tuple(values[m] for m in context)
    except KeyError as exc:
        raise ModelError(f"assignment has no value for {exc.args[0]!r}") from None
