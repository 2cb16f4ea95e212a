"""Acceptance suite: one test per criterion, each with its runtime bound.

Run on its own with ``python3 tests/test_acceptance.py`` or ``pytest
tests/test_acceptance.py``; either way the terminal summary ends with one
``ACCEPTANCE n PASS|FAIL`` line per criterion.
"""

import io
import itertools
import random
import sys
import time
from contextlib import redirect_stdout
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest

import oracles
from contextuality import bell_models as bm
from contextuality.cli import main
from contextuality.io import loads as load_json
from contextuality.hidden import bell_functional_value, check_hidden_distribution, chsh_functional
from contextuality.pba import glue_valuations, pba_valuations
from contextuality.possibilistic import ChainStep, Level, classify, global_sections, non_extendability_chain
from contextuality.quantum import (
    ProjectionOp,
    StateVector,
    angle_realization,
    born_probability,
    pvm_from_observable,
    realization_probabilities,
    realization_to_model,
)
from contextuality.scenario import is_no_signalling, restrict_assignment, support_of
from contextuality.stone import (
    algebra_from_partition,
    isomorphism_problems,
    stone_double_dual,
    stone_spectrum,
)
from contextuality.vectors import VectorConfiguration, configuration_to_pba, ks_colorable, verify_coloring

import pba_factory


class Timer:
    def __init__(self, limit: float) -> None:
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s, limit {self.limit}s"


@pytest.mark.criterion(1, "golden-table classification")
def test_criterion_01_golden_tables():
    expected = {
        "deterministic": (Level.NONCONTEXTUAL, False),
        "fifty_fifty": (Level.NONCONTEXTUAL, False),
        "signalling": (Level.STRONG, True),
        "pr_box": (Level.STRONG, False),
        "chsh": (Level.WEAK, False),
        "hardy": (Level.LOGICAL, False),
    }
    with Timer(1.0):
        for name, (level, signalling) in expected.items():
            result = classify(bm.STANDARD_MODELS[name]())
            assert (result.level, result.signalling) == (level, signalling), name


@pytest.mark.criterion(2, "hidden-distribution witnesses")
def test_criterion_02_witnesses():
    with Timer(1.0):
        for model in (bm.deterministic(), bm.fifty_fifty()):
            cert = check_hidden_distribution(model)
            assert cert.feasible
            dist = cert.distribution
            for ctx, r, p in model.cells():
                assert dist.marginal(ctx).get(r, 0) == p
            assert sum(dist.weights.values()) == 1
        weights = {g.key(): w for g, w in check_hidden_distribution(bm.fifty_fifty()).distribution.weights.items()}
        assert weights == {"A0=0,A1=0,B0=0,B1=0": F(1, 2), "A0=1,A1=1,B0=1,B1=1": F(1, 2)}


@pytest.mark.criterion(3, "dual certificate on the CHSH table")
def test_criterion_03_dual_certificate():
    with Timer(1.0):
        model = bm.chsh()
        cert = check_hidden_distribution(model)
        assert not cert.feasible
        assert cert.value > cert.classical_bound
        recomputed = bell_functional_value(model, cert.functional)
        assert (recomputed.value, recomputed.classical_bound) == (cert.value, cert.classical_bound)
        chsh = bell_functional_value(model, chsh_functional())
        assert (chsh.value, chsh.classical_bound) == (F(5, 2), 2)


@pytest.mark.criterion(4, "liar's cycle on the PR box")
def test_criterion_04_liars_cycle():
    with Timer(1.0):
        chain = non_extendability_chain(bm.pr_box(), ("A0",), ("1",))
    assert chain == [
        ChainStep("B0", "1", ("A0", "B0")),
        ChainStep("A1", "1", ("A1", "B0")),
        ChainStep("B1", "0", ("A1", "B1")),
        ChainStep("A0", "0", ("A0", "B1")),
    ]


def _coherent(model, result) -> None:
    sections = global_sections(model)
    cert = result.certificate
    if result.level is Level.STRONG:
        assert not sections
    else:
        assert sections
    if result.level is Level.LOGICAL:
        ctx, r = tuple(result.witness["context"]), tuple(result.witness["result"])
        assert model.prob(ctx, r) > 0
        assert all(restrict_assignment(g, ctx) != r for g in sections)
    if result.level in (Level.WEAK, Level.NONCONTEXTUAL):
        reachable = {ctx: {restrict_assignment(g, ctx) for g in sections} for ctx in model.scenario.contexts}
        assert all(support_of(model)[ctx] <= reachable[ctx] for ctx in model.scenario.contexts)
        assert cert is not None and cert.feasible == (result.level is Level.NONCONTEXTUAL)
    if result.signalling:
        assert result.level is not Level.NONCONTEXTUAL


@pytest.mark.criterion(5, "LP agrees with the facet oracle on 500 random models")
def test_criterion_05_oracle_equivalence():
    rng = random.Random(20240501)
    with Timer(60.0):
        levels = set()
        for _ in range(500):
            model = oracles.random_bell_model(rng, denominator=8)
            feasible = check_hidden_distribution(model).feasible
            assert feasible == oracles.has_local_model(model)
            result = classify(model)
            assert (result.level is Level.NONCONTEXTUAL) == feasible
            _coherent(model, result)
            levels.add(result.level)
    assert levels == set(Level)


@pytest.mark.criterion(6, "quantum angles compile to the CHSH table")
def test_criterion_06_quantum_bridge():
    with Timer(1.0):
        alice, bob = (0.0, 30.0), (0.0, -30.0)
        qr = angle_realization(alice, bob)
        floats = realization_probabilities(qr)
        expected = bm.chsh()
        state = qr.state.amplitudes
        for (i, a), (j, b) in itertools.product(enumerate(alice), enumerate(bob)):
            ctx = (f"A{i}", f"B{j}")
            for x, y in itertools.product((0, 1), repeat=2):
                oracle = oracles.born_cell(state, oracles.plane_vector(a, x), oracles.plane_vector(b, y))
                assert abs(floats[ctx][(str(x), str(y))] - oracle) <= 1e-9
                assert abs(oracle - float(expected.prob(ctx, (str(x), str(y))))) <= 1e-9
        model = realization_to_model(qr)
        assert model == expected
        assert set(p for _, _, p in model.cells()) == {F(1, 2), F(3, 8), F(1, 8), F(0)}
        assert is_no_signalling(model).no_signalling


def _random_projection(rng: np.random.Generator, dim: int) -> ProjectionOp:
    rank = int(rng.integers(0, dim + 1))
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, _ = np.linalg.qr(z)
    basis = q[:, :rank]
    return ProjectionOp(basis @ basis.conj().T)


@pytest.mark.criterion(7, "Born-rule complement law and PVM reconstruction")
def test_criterion_07_born_numerics():
    rng = np.random.default_rng(7)
    with Timer(10.0):
        for k in range(100):
            dim = 2 + k % 5
            psi = StateVector(rng.normal(size=dim) + 1j * rng.normal(size=dim))
            p = _random_projection(rng, dim)
            assert abs(born_probability(psi, p) + born_probability(psi, p.complement()) - 1) <= 1e-12
        for k in range(100):
            dim = 2 + k % 5
            z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            t = z + z.conj().T
            if k % 4 == 0:  # force a degenerate spectrum
                w, v = np.linalg.eigh(t)
                w[: dim // 2 + 1] = w[0]
                t = (v * w) @ v.conj().T
            pvm = pvm_from_observable(t)
            rebuilt = sum(lam * proj.matrix for lam, proj in zip(pvm.eigenvalues, pvm.projectors))
            assert np.max(np.abs(rebuilt - t)) <= 1e-8


@pytest.mark.criterion(8, "finite Stone duality for 1 to 4 atoms")
def test_criterion_08_stone_duality():
    with Timer(5.0):
        for atoms in range(1, 5):
            b = algebra_from_partition([{f"p{i}"} for i in range(atoms)])
            assert len(stone_spectrum(b)) == len(b.atoms()) == atoms
            iso = stone_double_dual(b)
            assert not isomorphism_problems(b, iso.codomain, iso.mapping)
            assert len(set(iso.mapping.values())) == 2**atoms


@pytest.mark.criterion(9, "valuations equal glued compatible families")
def test_criterion_09_gluing():
    rng = random.Random(9)
    with Timer(30.0):
        pbas = [pba_factory.random_pasting(rng, cliques=1 + i % 3) for i in range(50)]
        for p in pbas:
            assert len(p.maximal_cliques) <= 3 and len(p.elements) <= 32
            direct = {v.key() for v in pba_valuations(p)}
            cliques = p.maximal_cliques
            local_options = [stone_spectrum(p.clique_algebra(c)) for c in cliques]
            glued = set()
            for family in itertools.product(*local_options):
                try:
                    v = glue_valuations(p, dict(zip(cliques, family)))
                except Exception as exc:
                    assert type(exc).__name__ == "GluingError"
                    continue
                glued.add(v.key())
            assert direct == glued
    assert {len(p.maximal_cliques) for p in pbas} == {1, 2, 3}


@pytest.mark.criterion(10, "KS search agrees with the valuation reduction")
def test_criterion_10_ks_consistency():
    rng = random.Random(10)
    pool = pba_factory.vector_pool()
    with Timer(30.0):
        checked = 0
        for _ in range(150):
            size = rng.randint(1, 12)
            vc = VectorConfiguration(rng.sample(pool, size))
            result = ks_colorable(vc)
            p = configuration_to_pba(vc)
            valuations = pba_valuations(p)
            assert result.colorable == bool(valuations)
            if result.colorable:
                assert not verify_coloring(vc, result.coloring)
                target = {f"v{i}": c for i, c in result.coloring.items()}
                assert any(all(v.values[k] == c for k, c in target.items()) for v in valuations)
            checked += 1
    assert checked == 150


@pytest.mark.criterion(11, "sampling determinism and convergence")
def test_criterion_11_sampling(tmp_path):
    path = Path(__file__).resolve().parent.parent / "data" / "fifty_fifty.json"

    def run(seed: int) -> str:
        buf = io.StringIO()
        with redirect_stdout(buf):
            assert main(["sample", str(path), "--rounds", "100000", "--seed", str(seed), "--quiet"]) == 0
        return buf.getvalue()

    with Timer(5.0):
        first, second = run(1), run(1)
        assert first == second
        tables = load_json(first)["tables"]
        for row in tables.values():
            for cell in ("0,0", "1,1"):
                assert abs(float(F(row[cell])) - 0.5) <= 0.02
            assert row["0,1"] == row["1,0"] == "0"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
