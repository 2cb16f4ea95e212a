"""Monte-Carlo simulation of repeated measurement rounds.

Each round picks a context according to ``context_weights`` and then a joint
result from that context's table.  Randomness comes from numpy's PCG64
bit generator seeded with the 64-bit seed; integers are drawn from its raw
64-bit words by exact rejection sampling, so rational probabilities are
sampled without any floating-point rounding and the output depends only on
the PCG64 stream.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import ModelError
from .scenario import Context, EmpiricalModel, Result, require_valid, to_fraction

UNDEFINED = "undefined"
_WORD = 1 << 64
_BATCH = 4096


class WordStream:
    """Unsigned 64-bit words from PCG64, fetched in batches."""

    def __init__(self, seed: int) -> None:
        if not isinstance(seed, int) or not 0 <= seed < _WORD:
            raise ModelError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
        self._bits = np.random.PCG64(seed)
        self._buffer: list[int] = []
        self._pos = 0

    def next_word(self) -> int:
        if self._pos == len(self._buffer):
            self._buffer = self._bits.random_raw(_BATCH).tolist()
            self._pos = 0
        word = self._buffer[self._pos]
        self._pos += 1
        return word

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection on whole 64-bit words."""
        if n < 1:
            raise ValueError("range must be positive")
        words = max(1, -(-n.bit_length() // 64))
        span = _WORD**words
        limit = span - span % n
        while True:
            x = 0
            for _ in range(words):
                x = (x << 64) | self.next_word()
            if x < limit:
                return x % n


class _Categorical:
    """Exact sampler for a finite rational distribution."""

    def __init__(self, labels: Sequence, probs: Sequence[Fraction]) -> None:
        scale = math.lcm(*(p.denominator for p in probs))
        self.labels = [lab for lab, p in zip(labels, probs) if p > 0]
        self.cumulative = []
        total = 0
        for p in probs:
            if p > 0:
                total += int(p * scale)
                self.cumulative.append(total)
        self.scale = scale

    def draw(self, stream: WordStream):
        u = stream.below(self.scale)
        return self.labels[bisect.bisect_right(self.cumulative, u)]


@dataclass(frozen=True)
class SamplingConfig:
    rounds: int
    seed: int
    context_weights: Mapping[Context, Fraction] = field(default_factory=dict)


def uniform_weights(model: EmpiricalModel) -> dict[Context, Fraction]:
    n = len(model.scenario.contexts)
    return {ctx: Fraction(1, n) for ctx in model.scenario.contexts}


def weights_from_json(model: EmpiricalModel, doc: object) -> dict[Context, Fraction]:
    """Context weights keyed like model tables (``"A0,B0"``)."""
    if not isinstance(doc, dict):
        raise ModelError("weights file must be a JSON object")
    sc = model.scenario
    out = {}
    for key, value in doc.items():
        out[sc.find_context(key.split(","))] = to_fraction(value)
    return out


def check_weights(model: EmpiricalModel, weights: Mapping[Context, Fraction]) -> None:
    missing = [list(c) for c in model.scenario.contexts if c not in weights]
    if missing:
        raise ModelError(f"no weight given for contexts {missing}")
    if any(w <= 0 for w in weights.values()):
        raise ModelError("context weights must be strictly positive")
    if sum(weights.values()) != 1:
        raise ModelError("context weights must sum to 1")


@dataclass(frozen=True)
class SampleRun:
    model: EmpiricalModel
    counts: dict[Context, dict[Result, int]]

    def tally(self, context: Context) -> int:
        return sum(self.counts[context].values())

    def empirical(self) -> dict[Context, dict[Result, Fraction] | None]:
        """Tally over rounds per context; ``None`` for contexts never drawn."""
        out = {}
        for ctx, row in self.counts.items():
            n = sum(row.values())
            out[ctx] = None if n == 0 else {r: Fraction(c, n) for r, c in row.items()}
        return out

    def deviation(self) -> dict[Context, dict[Result, Fraction] | None]:
        out = {}
        for ctx, row in self.empirical().items():
            out[ctx] = None if row is None else {r: abs(p - self.model.prob(ctx, r)) for r, p in row.items()}
        return out

    def total_variation(self) -> dict[Context, Fraction | None]:
        return {ctx: None if dev is None else sum(dev.values()) / 2 for ctx, dev in self.deviation().items()}


def sample(model: EmpiricalModel, config: SamplingConfig) -> SampleRun:
    require_valid(model)
    if not isinstance(config.rounds, int) or config.rounds < 0:
        raise ModelError(f"rounds must be a non-negative integer, got {config.rounds!r}")
    weights = dict(config.context_weights) or uniform_weights(model)
    check_weights(model, weights)
    sc = model.scenario
    stream = WordStream(config.seed)
    pick_context = _Categorical(sc.contexts, [weights[c] for c in sc.contexts])
    pick_result = {
        ctx: _Categorical(sc.results(ctx), [model.prob(ctx, r) for r in sc.results(ctx)]) for ctx in sc.contexts
    }
    counts = {ctx: {r: 0 for r in sc.results(ctx)} for ctx in sc.contexts}
    for _ in range(config.rounds):
        ctx = pick_context.draw(stream)
        counts[ctx][pick_result[ctx].draw(stream)] += 1
    return SampleRun(model, counts)
