"""Finite-dimensional Born rule: projections, PVMs and compiled empirical models.

Everything here is double-precision complex linear algebra with declared
tolerances.  The bridge into the exact classification stack
(:func:`realization_to_model`) rationalizes through marginals so that the
compiled model is exactly no-signalling.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import CommensurabilityError, ModelError, NumericalError
from .scenario import Context, EmpiricalModel, MeasurementScenario, Result

log = logging.getLogger(__name__)

TOL_NORM = 1e-12
TOL_PROJ = 1e-10
TOL_COMM = 1e-10
TOL_EIG = 1e-8
TOL_RECONSTRUCT = 1e-8
TOL_ORTH = 1e-9
RATIONAL_DENOMINATOR_CAP = 10**6


def _max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def as_square_matrix(m) -> np.ndarray:
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ModelError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ModelError("matrix has non-finite entries")
    return a


def is_hermitian(m: np.ndarray, tol: float = TOL_PROJ) -> bool:
    return _max_abs(m - m.conj().T) <= tol


@dataclass(frozen=True, eq=False)
class StateVector:
    """A unit vector; the amplitudes are normalized on construction."""

    amplitudes: np.ndarray

    def __init__(self, amplitudes) -> None:
        v = np.array(amplitudes, dtype=complex).reshape(-1)
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise ModelError("state needs finite amplitudes")
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ModelError("the zero vector is not a state")
        if abs(norm - 1) > TOL_NORM:  # leave already-normalized input bit-identical
            v = v / norm
        if abs(np.vdot(v, v).real - 1) > TOL_NORM:
            raise NumericalError("state could not be normalized")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True, eq=False)
class ProjectionOp:
    matrix: np.ndarray

    def __init__(self, matrix) -> None:
        m = as_square_matrix(matrix)
        if _max_abs(m @ m - m) > TOL_PROJ or not is_hermitian(m):
            raise ModelError("matrix is not an orthogonal projection")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def onto(cls, vector) -> "ProjectionOp":
        """Rank-one projection onto the span of ``vector``."""
        v = np.array(vector, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def identity(cls, dimension: int) -> "ProjectionOp":
        return cls(np.eye(dimension))

    @classmethod
    def zero(cls, dimension: int) -> "ProjectionOp":
        return cls(np.zeros((dimension, dimension)))

    def complement(self) -> "ProjectionOp":
        return ProjectionOp(np.eye(self.dimension) - self.matrix)


@dataclass(frozen=True, eq=False)
class PVMDecomposition:
    observable: np.ndarray
    eigenvalues: tuple[float, ...]
    projectors: tuple[ProjectionOp, ...]


def _check_dims(*dims: int) -> None:
    if len(set(dims)) != 1:
        raise ModelError(f"dimension mismatch: {dims}")


def commutes(p: ProjectionOp, q: ProjectionOp) -> bool:
    _check_dims(p.dimension, q.dimension)
    return _max_abs(p.matrix @ q.matrix - q.matrix @ p.matrix) <= TOL_COMM


def _inner(psi: StateVector, m: np.ndarray) -> complex:
    return complex(np.vdot(psi.amplitudes, m @ psi.amplitudes))


def _probability(value: complex) -> float:
    if abs(value.imag) > TOL_PROJ:
        raise NumericalError(f"Born value has imaginary part {value.imag:.3e}")
    p = value.real
    if p < -TOL_PROJ or p > 1 + TOL_PROJ:
        raise NumericalError(f"Born value {p!r} is outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def born_probability(psi: StateVector, p: ProjectionOp) -> float:
    _check_dims(psi.dimension, p.dimension)
    return _probability(_inner(psi, p.matrix))


def joint_probability(psi: StateVector, projections: Sequence[ProjectionOp]) -> float:
    """Probability that every event in a commuting family occurs."""
    if not projections:
        return 1.0
    _check_dims(psi.dimension, *(p.dimension for p in projections))
    for (i, p), (j, q) in itertools.combinations(enumerate(projections), 2):
        if not commutes(p, q):
            raise CommensurabilityError(f"projections {i} and {j} do not commute")
    product = projections[0].matrix
    for p in projections[1:]:
        product = product @ p.matrix
    return _probability(_inner(psi, product))


def expectation(psi: StateVector, t) -> float:
    m = as_square_matrix(t)
    _check_dims(psi.dimension, m.shape[0])
    if not is_hermitian(m):
        raise ModelError("observable is not Hermitian")
    return _inner(psi, m).real


def _gram_schmidt(vectors: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt on the columns of ``vectors``."""
    q = np.array(vectors, dtype=complex)
    for k in range(q.shape[1]):
        for j in range(k):
            q[:, k] -= np.vdot(q[:, j], q[:, k]) * q[:, j]
        q[:, k] /= np.linalg.norm(q[:, k])
    return q


def pvm_from_observable(t) -> PVMDecomposition:
    """Spectral projectors of a Hermitian matrix, one per distinct eigenvalue.

    Eigenvalues closer than ``TOL_EIG`` (absolute) are merged into one
    cluster; its projector is built from an orthonormalized eigenbasis.
    """
    m = as_square_matrix(t)
    if not is_hermitian(m):
        raise ModelError("observable is not Hermitian")
    herm = (m + m.conj().T) / 2
    values, vectors = np.linalg.eigh(herm)

    clusters: list[list[int]] = []
    for i, lam in enumerate(values):
        if clusters and lam - values[clusters[-1][-1]] <= TOL_EIG:
            clusters[-1].append(i)
        else:
            clusters.append([i])

    eigenvalues = []
    projectors = []
    for idx in clusters:
        basis = _gram_schmidt(vectors[:, idx])
        eigenvalues.append(float(np.mean(values[idx])))
        projectors.append(ProjectionOp(basis @ basis.conj().T))

    n = m.shape[0]
    total = sum((p.matrix for p in projectors), np.zeros((n, n), dtype=complex))
    if _max_abs(total - np.eye(n)) > TOL_PROJ:
        raise NumericalError("spectral projectors do not sum to the identity")
    for p, q in itertools.combinations(projectors, 2):
        if _max_abs(p.matrix @ q.matrix) > TOL_PROJ:
            raise NumericalError("spectral projectors are not orthogonal")
    rebuilt = sum((lam * p.matrix for lam, p in zip(eigenvalues, projectors)), np.zeros((n, n), dtype=complex))
    if _max_abs(rebuilt - m) > TOL_RECONSTRUCT:
        raise NumericalError("spectral decomposition does not reconstruct the observable")
    m.setflags(write=False)
    return PVMDecomposition(m, tuple(eigenvalues), tuple(projectors))


@dataclass(frozen=True, eq=False)
class Party:
    """One laboratory: its local dimension and its projective measurements.

    ``measurements`` maps an identifier to one projector per outcome, in the
    outcome order of the scenario.
    """

    dimension: int
    measurements: Mapping[str, tuple[ProjectionOp, ...]]


@dataclass(frozen=True, eq=False)
class QuantumRealization:
    parties: tuple[Party, ...]
    state: StateVector
    scenario: MeasurementScenario

    def __post_init__(self) -> None:
        problems = realization_problems(self)
        if problems:
            raise ModelError("invalid quantum realization:\n  " + "\n  ".join(problems))

    def owner(self, measurement: str) -> int:
        for i, party in enumerate(self.parties):
            if measurement in party.measurements:
                return i
        raise ModelError(f"no party performs {measurement!r}")


def realization_problems(qr: QuantumRealization) -> list[str]:
    problems = []
    dims = [p.dimension for p in qr.parties]
    total = int(np.prod(dims)) if dims else 1
    if total != qr.state.dimension:
        problems.append(f"parties span dimension {total} but the state has dimension {qr.state.dimension}")
    owners: dict[str, int] = {}
    for i, party in enumerate(qr.parties):
        for mid, projs in party.measurements.items():
            if mid in owners:
                problems.append(f"measurement {mid!r} belongs to two parties")
            owners[mid] = i
            if any(p.dimension != party.dimension for p in projs):
                problems.append(f"{mid}: projector dimension differs from the party's {party.dimension}")
                continue
            total_proj = sum((p.matrix for p in projs), np.zeros((party.dimension,) * 2, dtype=complex))
            if _max_abs(total_proj - np.eye(party.dimension)) > TOL_PROJ:
                problems.append(f"{mid}: projectors do not sum to the identity")
            for a, b in itertools.combinations(projs, 2):
                if _max_abs(a.matrix @ b.matrix) > TOL_PROJ:
                    problems.append(f"{mid}: projectors are not mutually orthogonal")
                    break
    sc = qr.scenario
    for m in sc.measurements:
        if m not in owners:
            problems.append(f"no party performs {m!r}")
            continue
        n_proj = len(qr.parties[owners[m]].measurements[m])
        if n_proj != len(sc.outcomes[m]):
            problems.append(f"{m}: {n_proj} projectors for {len(sc.outcomes[m])} outcomes")
    for ctx in sc.contexts:
        parties = [owners.get(m) for m in ctx]
        if len(set(parties)) != len(parties):
            problems.append(f"context {list(ctx)} uses one party twice")
    return problems


def _local_operator(qr: QuantumRealization, choice: Mapping[str, str]) -> np.ndarray:
    """Tensor product of the chosen local projectors, identity elsewhere."""
    factors = [np.eye(p.dimension, dtype=complex) for p in qr.parties]
    for m, o in choice.items():
        i = qr.owner(m)
        factors[i] = qr.parties[i].measurements[m][qr.scenario.outcomes[m].index(o)].matrix
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def realization_probabilities(qr: QuantumRealization) -> dict[Context, dict[Result, float]]:
    """Floating Born probability for every context and joint result."""
    tables = {}
    for ctx in qr.scenario.contexts:
        tables[ctx] = {
            r: _probability(_inner(qr.state, _local_operator(qr, dict(zip(ctx, r)))))
            for r in qr.scenario.results(ctx)
        }
    return tables


def rationalize(x: float, cap: int = RATIONAL_DENOMINATOR_CAP) -> Fraction:
    return Fraction(x).limit_denominator(cap)


def realization_to_model(qr: QuantumRealization, cap: int = RATIONAL_DENOMINATOR_CAP) -> EmpiricalModel:
    """Compile a realization into an exact empirical model.

    Rounding happens on marginals, not cells: for every subset S of a
    context and every choice of non-final outcomes on S, the Born
    probability is rounded once to the nearest rational with denominator at
    most ``cap``.  Cells are then rebuilt by inclusion-exclusion over the
    final outcomes.  Shared marginals are shared rationals, so the result is
    exactly no-signalling, and each row sums to exactly one.
    """
    sc = qr.scenario
    cache: dict[tuple, Fraction] = {}

    def marginal(choice: tuple[tuple[str, str], ...]) -> Fraction:
        key = tuple(sorted(choice))
        if not key:
            return Fraction(1)
        if key not in cache:
            value = _probability(_inner(qr.state, _local_operator(qr, dict(key))))
            cache[key] = rationalize(value, cap)
        return cache[key]

    tables: dict[Context, dict[Result, Fraction]] = {}
    for ctx in sc.contexts:
        row = {}
        for r in sc.results(ctx):
            fixed = [(m, o) for m, o in zip(ctx, r) if o != sc.outcomes[m][-1]]
            last = [m for m, o in zip(ctx, r) if o == sc.outcomes[m][-1]]
            total = Fraction(0)
            for k in range(len(last) + 1):
                for subset in itertools.combinations(last, k):
                    options = [[(m, o) for o in sc.outcomes[m][:-1]] for m in subset]
                    for extra in itertools.product(*options):
                        total += (-1) ** k * marginal(tuple(fixed) + extra)
            row[r] = total
        if any(v < 0 for v in row.values()):
            log.warning("context %s: rounding produced negative cells; clamping and renormalizing", ctx)
            row = {r: max(v, Fraction(0)) for r, v in row.items()}
            s = sum(row.values())
            row = {r: v / s for r, v in row.items()}
        tables[ctx] = row
    return EmpiricalModel(sc, tables)


def real_plane_measurement(angle_degrees: float) -> tuple[ProjectionOp, ProjectionOp]:
    """Two-outcome measurement along (cos t, sin t) in the real qubit plane."""
    t = np.deg2rad(angle_degrees)
    v = np.array([np.cos(t), np.sin(t)])
    w = np.array([-np.sin(t), np.cos(t)])
    return ProjectionOp.onto(v), ProjectionOp.onto(w)


def bell_state() -> StateVector:
    return StateVector([1, 0, 0, 1])


def angle_realization(
    alice_angles: Sequence[float], bob_angles: Sequence[float], state: StateVector | None = None
) -> QuantumRealization:
    """Two qubits measured along real-plane angles, as in a CHSH experiment."""
    alice = Party(2, {f"A{i}": real_plane_measurement(a) for i, a in enumerate(alice_angles)})
    bob = Party(2, {f"B{i}": real_plane_measurement(b) for i, b in enumerate(bob_angles)})
    ms = list(alice.measurements) + list(bob.measurements)
    scenario = MeasurementScenario(
        ms, {m: ("0", "1") for m in ms}, [(a, b) for a in alice.measurements for b in bob.measurements]
    )
    return QuantumRealization((alice, bob), state or bell_state(), scenario)
