"""The two-party, two-setting, binary-outcome scenario and its standard models.

Rows are listed in the order (A0,B0), (A0,B1), (A1,B0), (A1,B1); within a row
the results run (0,0), (0,1), (1,0), (1,1).
"""

from __future__ import annotations

from fractions import Fraction as F

from .scenario import EmpiricalModel, MeasurementScenario

ALICE = ("A0", "A1")
BOB = ("B0", "B1")


def bell_scenario() -> MeasurementScenario:
    ms = ALICE + BOB
    return MeasurementScenario(
        ms,
        {m: ("0", "1") for m in ms},
        [(a, b) for a in ALICE for b in BOB],
    )


def _model(rows) -> EmpiricalModel:
    sc = bell_scenario()
    return EmpiricalModel.from_rows(sc, dict(zip(sc.contexts, rows)))


def deterministic() -> EmpiricalModel:
    """Every measurement always yields 1."""
    return _model([[0, 0, 0, 1]] * 4)


def fifty_fifty() -> EmpiricalModel:
    """All measurements share one fair coin flip."""
    h = F(1, 2)
    return _model([[h, 0, 0, h]] * 4)


def signalling() -> EmpiricalModel:
    """Marginals depend on which pair of measurements is performed."""
    return _model([[0, 0, 0, 1], [1, 0, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]])


def pr_box() -> EmpiricalModel:
    """Perfect correlation in three contexts, perfect anticorrelation in (A1,B1)."""
    h = F(1, 2)
    return _model([[h, 0, 0, h], [h, 0, 0, h], [h, 0, 0, h], [0, h, h, 0]])


def chsh() -> EmpiricalModel:
    """The noisy PR box reached by a maximally entangled pair.

    The (A0,B0) row is (1/2, 0, 0, 1/2): the two measurements are aligned,
    so their results always agree.
    """
    a, b, h = F(3, 8), F(1, 8), F(1, 2)
    return _model([[h, 0, 0, h], [a, b, b, a], [a, b, b, a], [b, a, a, b]])


def hardy() -> EmpiricalModel:
    """Logically but not strongly contextual: (A1,B1) is uniform."""
    h, q = F(1, 2), F(1, 4)
    return _model([[h, 0, 0, h], [h, 0, 0, h], [h, 0, 0, h], [q, q, q, q]])


STANDARD_MODELS = {
    "deterministic": deterministic,
    "fifty_fifty": fifty_fifty,
    "signalling": signalling,
    "pr_box": pr_box,
    "chsh": chsh,
    "hardy": hardy,
}
