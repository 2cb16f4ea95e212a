"""Support-level analysis and the strong / logical / weak hierarchy.

Only which results have non-zero probability matters here.  Extendability is
decided by exhaustive search over global assignments; the propagation chains
are a readable certificate layered on top and are never used to decide.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .errors import ModelError
from .hidden import (
    DEFAULT_ASSIGNMENT_CAP,
    FeasibilityCertificate,
    check_hidden_distribution,
    enumerate_assignments,
    functional_to_json,
)
from .scenario import (
    Context,
    EmpiricalModel,
    GlobalAssignment,
    canonical_context,
    format_fraction,
    is_no_signalling,
    require_valid,
    restrict_assignment,
    support_of,
)

MAX_CHAIN_STATES = 200_000


class Level(enum.Enum):
    NONCONTEXTUAL = "noncontextual"
    WEAK = "weak"
    LOGICAL = "logical"
    STRONG = "strong"


class ChainStep(NamedTuple):
    measurement: str
    outcome: str
    context: Context


@dataclass(frozen=True)
class Classification:
    level: Level
    signalling: bool
    witness: dict = field(default_factory=dict)
    certificate: FeasibilityCertificate | None = None

    def to_json(self) -> dict:
        return {"level": self.level.value, "signalling": self.signalling, "witness": self.witness}


def _in_support(g: GlobalAssignment, support) -> bool:
    return all(restrict_assignment(g, ctx) in rs for ctx, rs in support.items())


def global_sections(model: EmpiricalModel, cap: int = DEFAULT_ASSIGNMENT_CAP) -> list[GlobalAssignment]:
    """Assignments whose restriction to every context is supported."""
    support = support_of(model)
    return [g for g in enumerate_assignments(model.scenario, cap) if _in_support(g, support)]


def _local_section(model: EmpiricalModel, context: Sequence[str], result: Sequence[str]):
    """Normalize a (measurements, outcomes) pair and check it is supported.

    ``context`` may be a whole context or any subset of one; a partial
    section is supported when it is the restriction of a supported result of
    an enclosing context.
    """
    context, result = tuple(context), tuple(result)
    if len(context) != len(result):
        raise ModelError("context and result have different lengths")
    ms = canonical_context(context)
    res = tuple(result[context.index(m)] for m in ms)
    host = model.scenario.enclosing_context(ms)
    idx = [host.index(m) for m in ms]
    supported = {tuple(r[i] for i in idx) for r in support_of(model)[host]}
    if res not in supported:
        raise ModelError(f"{dict(zip(ms, res))} is not in the support of {list(host)}")
    return ms, res


def is_extendable(
    model: EmpiricalModel,
    context: Sequence[str],
    result: Sequence[str],
    cap: int = DEFAULT_ASSIGNMENT_CAP,
) -> bool:
    ms, res = _local_section(model, context, result)
    return any(restrict_assignment(g, ms) == res for g in global_sections(model, cap))


def non_extendability_chain(
    model: EmpiricalModel,
    context: Sequence[str],
    result: Sequence[str],
    cap: int = DEFAULT_ASSIGNMENT_CAP,
) -> list[ChainStep]:
    """A propagation chain from a local section to a contradiction.

    Each step follows from the previous fact through one context whose
    support leaves a single possible value.  The last step forces a
    measurement that is already fixed to a different outcome.  Breadth-first
    search returns a shortest chain; ties go to the chain that starts from
    the earlier measurement of the section and then to canonical context
    order.  An empty list means no such chain exists (the section is still
    non-extendable, by exhaustion).
    """
    ms, res = _local_section(model, context, result)
    if any(restrict_assignment(g, ms) == res for g in global_sections(model, cap)):
        raise ModelError(f"{dict(zip(ms, res))} extends to a global section")

    sc = model.scenario
    support = support_of(model)
    initial = dict(zip(ms, res))

    def forced(known: dict, via: Context, target: str):
        others = [(i, m) for i, m in enumerate(via) if m != target and m in known]
        t = via.index(target)
        values = {r[t] for r in support[via] if all(r[i] == known[m] for i, m in others)}
        return values.pop() if len(values) == 1 else None

    queue = deque(((), dict(initial), m) for m in ms)
    seen = set()
    expanded = 0
    while queue:
        steps, known, current = queue.popleft()
        expanded += 1
        if expanded > MAX_CHAIN_STATES:
            return []
        for via in sc.contexts_containing(current):
            for target in via:
                if target == current:
                    continue
                value = forced(known, via, target)
                if value is None:
                    continue
                step = ChainStep(target, value, via)
                if target in known:
                    if known[target] != value:
                        return list(steps) + [step]
                    continue
                nxt = dict(known)
                nxt[target] = value
                state = (frozenset(nxt.items()), target)
                if state in seen:
                    continue
                seen.add(state)
                queue.append((steps + (step,), nxt, target))
    return []


def _chain_json(chain: list[ChainStep]) -> list[dict]:
    return [{"measurement": s.measurement, "outcome": s.outcome, "context": list(s.context)} for s in chain]


def classify(model: EmpiricalModel, cap: int = DEFAULT_ASSIGNMENT_CAP) -> Classification:
    """Place a model in the hierarchy and attach the evidence for its level."""
    require_valid(model)
    signalling = not is_no_signalling(model).no_signalling
    sections = global_sections(model, cap)
    if not sections:
        return Classification(Level.STRONG, signalling, {"global_sections": []})

    support = support_of(model)
    reachable = {ctx: {restrict_assignment(g, ctx) for g in sections} for ctx in model.scenario.contexts}
    for ctx in model.scenario.contexts:
        for r in sorted(support[ctx], key=model.scenario.results(ctx).index):
            if r not in reachable[ctx]:
                chain = non_extendability_chain(model, ctx, r, cap)
                witness = {
                    "context": list(ctx),
                    "result": list(r),
                    "chain": _chain_json(chain),
                    "global_sections": [g.key() for g in sections],
                }
                return Classification(Level.LOGICAL, signalling, witness)

    cert = check_hidden_distribution(model, cap)
    if cert.feasible:
        weights = {g.key(): format_fraction(w) for g, w in cert.distribution.weights.items()}
        return Classification(Level.NONCONTEXTUAL, signalling, {"weights": weights}, cert)
    witness = {
        "functional": functional_to_json(cert.functional),
        "value": format_fraction(cert.value),
        "classical_bound": format_fraction(cert.classical_bound),
    }
    return Classification(Level.WEAK, signalling, witness, cert)
