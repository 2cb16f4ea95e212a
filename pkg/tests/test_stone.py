import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles

from contextuality.errors import ModelError, SizeLimitError
from contextuality.stone import (
    FiniteBooleanAlgebra,
    algebra_from_partition,
    is_homomorphism,
    isomorphism_problems,
    pair,
    powerset_algebra,
    relabel,
    stone_double_dual,
    stone_spectrum,
    validate_boolean_algebra,
)


@st.composite
def partition_algebras(draw, max_atoms=4):
    points = draw(st.lists(st.integers(0, 9), min_size=1, max_size=8, unique=True))
    k = draw(st.integers(1, min(max_atoms, len(points))))
    labels = draw(st.lists(st.integers(0, k - 1), min_size=len(points), max_size=len(points)))
    blocks = [{p for p, lab in zip(points, labels) if lab == i} for i in range(k)]
    return algebra_from_partition([b for b in blocks if b])


def _tabled(b: FiniteBooleanAlgebra) -> FiniteBooleanAlgebra:
    names = {x: f"e{i}" for i, x in enumerate(b.elements)}
    return relabel(b, names)


def _with(b, meet=None, join=None, neg=None):
    return FiniteBooleanAlgebra(
        b.elements, meet or dict(b.meet_table), join or dict(b.join_table), neg or dict(b.neg_table), b.top, b.bottom
    )


class TestPowerset:
    def test_trivial(self):
        b = powerset_algebra(0)
        assert len(b) == 1 and b.top == b.bottom
        assert validate_boolean_algebra(b) == []

    def test_initial_algebra(self):
        b = powerset_algebra(1)
        assert len(b) == 2 and b.top != b.bottom

    def test_three_points(self):
        b = powerset_algebra(3)
        assert len(b) == 8 and len(b.atoms()) == 3
        assert validate_boolean_algebra(b) == []

    @pytest.mark.parametrize("n", [-1, 17, 2.0])
    def test_out_of_range(self, n):
        with pytest.raises(SizeLimitError):
            powerset_algebra(n)

    def test_lazy_tables_behave_like_mappings(self):
        b = powerset_algebra(2)
        assert len(b.meet_table) == 10 and len(list(b.meet_table)) == 10
        assert b.meet_table[pair(frozenset({0}), frozenset({1}))] == frozenset()
        with pytest.raises(KeyError):
            b.meet_table[frozenset({frozenset({5})})]


class TestValidate:
    @given(partition_algebras())
    def test_generated_algebras_are_valid(self, b):
        assert validate_boolean_algebra(_tabled(b)) == []

    def test_missing_meet(self):
        b = _tabled(powerset_algebra(2))
        meet = dict(b.meet_table)
        del meet[pair("e1", "e2")]
        assert [v.kind for v in validate_boolean_algebra(_with(b, meet=meet))] == ["completeness"]

    def test_wrong_complement(self):
        b = _tabled(powerset_algebra(2))
        neg = dict(b.neg_table)
        neg["e1"] = "e1"
        kinds = {v.kind for v in validate_boolean_algebra(_with(b, neg=neg))}
        assert kinds == {"complement"}

    def test_non_distributive_lattice(self):
        # the diamond M3 is a lattice but not distributive
        els = ("0", "a", "b", "c", "1")
        meet, join = {}, {}
        for x in els:
            for y in els:
                if x == y:
                    m = j = x
                elif "0" in (x, y):
                    m, j = "0", (y if x == "0" else x)
                elif "1" in (x, y):
                    m, j = (y if x == "1" else x), "1"
                else:
                    m, j = "0", "1"
                meet[pair(x, y)], join[pair(x, y)] = m, j
        neg = {"0": "1", "1": "0", "a": "b", "b": "c", "c": "a"}
        kinds = {v.kind for v in validate_boolean_algebra(FiniteBooleanAlgebra(els, meet, join, neg, "1", "0"))}
        assert {"size", "distributive"} <= kinds

    def test_unknown_top(self):
        b = powerset_algebra(1)
        bad = FiniteBooleanAlgebra(b.elements, b.meet_table, b.join_table, b.neg_table, "top", b.bottom)
        assert [v.kind for v in validate_boolean_algebra(bad)] == ["bounds"]


class TestSpectrum:
    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
    def test_matches_brute_force(self, n):
        b = powerset_algebra(n)
        spectrum = stone_spectrum(b)
        brute = oracles.brute_force_homomorphisms(b)
        assert len(spectrum) == n
        assert sorted(v.key() for v in spectrum) == sorted(tuple(h[x] for x in b.elements) for h in brute)

    @given(partition_algebras())
    def test_points_are_homomorphisms(self, b):
        spectrum = stone_spectrum(b)
        assert len(spectrum) == len(b.atoms())
        assert all(is_homomorphism(b, w.values) for w in spectrum)

    def test_non_boolean_input_is_detected(self):
        b = _tabled(powerset_algebra(2))
        neg = dict(b.neg_table)
        neg["e1"], neg["e2"] = "e1", "e2"
        with pytest.raises(ModelError):
            stone_spectrum(_with(b, neg=neg))


class TestDoubleDual:
    def test_four_element_algebra(self):
        b = algebra_from_partition([{"x"}, {"y"}])
        a = frozenset({"x"})
        iso = stone_double_dual(b)
        assert len(iso.spectrum) == 2
        assert len(iso.mapping[a]) == 1
        assert iso.mapping[b.neg(a)] == iso.codomain.neg(iso.mapping[a])

    def test_initial_algebra(self):
        b = powerset_algebra(1)
        iso = stone_double_dual(b)
        assert len(iso.spectrum) == 1
        assert iso.mapping[b.top] == frozenset({0}) and iso.mapping[b.bottom] == frozenset()

    def test_trivial_algebra_has_no_representation(self):
        with pytest.raises(ModelError):
            stone_double_dual(powerset_algebra(0))

    @given(partition_algebras())
    def test_verified_isomorphism(self, b):
        iso = stone_double_dual(_tabled(b))
        assert len(iso.codomain) == len(b)
        assert isomorphism_problems(iso.algebra, iso.codomain, iso.mapping) == []

    def test_problems_reported_for_a_broken_map(self):
        b = powerset_algebra(2)
        iso = stone_double_dual(b)
        swapped = dict(iso.mapping)
        swapped[b.top], swapped[b.bottom] = swapped[b.bottom], swapped[b.top]
        assert isomorphism_problems(b, iso.codomain, swapped)
