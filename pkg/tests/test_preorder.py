import itertools
import json

import numpy as np
import pytest

from mpdetect.detectors import np_power_exact
from mpdetect.preorder import (
    ORACLE,
    FinitePreorder,
    build_landscape_abstraction,
    check_mp,
    maximal_elements,
    sup_set,
    upper_bounds,
)
from oracles import brute_force_lemma, brute_force_mp, random_mp_instance


@pytest.fixture
def chain():
    return FinitePreorder.generated_by("abc", [("a", "b"), ("b", "c")])


@pytest.fixture
def diamond():
    return FinitePreorder.generated_by("abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])


class TestConstruction:
    def test_not_reflexive(self):
        with pytest.raises(ValueError, match="reflexive"):
            FinitePreorder("ab", [[1, 0], [0, 0]])

    def test_not_transitive(self):
        rel = np.eye(3, dtype=bool)
        rel[0, 1] = rel[1, 2] = True
        with pytest.raises(ValueError, match="transitive"):
            FinitePreorder("abc", rel)

    def test_closure(self, chain):
        assert chain.le("a", "c") and not chain.le("c", "a")

    def test_duplicate_labels(self):
        with pytest.raises(ValueError):
            FinitePreorder(["a", "a"], np.eye(2))

    def test_unknown_element(self, chain):
        with pytest.raises(KeyError):
            upper_bounds(chain, ["z"])
        with pytest.raises(KeyError):
            check_mp(chain, ["a"], ["z"])


class TestBounds:
    def test_chain_upper(self, chain):
        assert upper_bounds(chain, {"a"}) == {"a", "b", "c"}
        assert upper_bounds(chain, {"a", "c"}) == {"c"}

    def test_antichain_upper(self):
        P = FinitePreorder("xy", np.eye(2))
        assert upper_bounds(P, {"x", "y"}) == frozenset()

    def test_maximal(self, chain):
        assert maximal_elements(chain, "abc") == {"c"}
        assert maximal_elements(FinitePreorder("xy", np.eye(2)), "xy") == {"x", "y"}
        iso = FinitePreorder("xy", np.ones((2, 2)))
        assert maximal_elements(iso, "xy") == {"x", "y"}

    def test_sup(self, chain, diamond):
        assert sup_set(chain, "ab") == {"b"}
        assert sup_set(diamond, "bc") == {"d"}
        assert sup_set(FinitePreorder("xy", np.eye(2)), "xy") == frozenset()

    def test_sup_with_isomorphic_tops(self):
        P = FinitePreorder.generated_by("abst", [("a", "s"), ("b", "s"), ("s", "t"), ("t", "s")])
        assert sup_set(P, "ab") == {"s", "t"}


class TestCheckMP:
    def test_singletons_are_their_own_upper_bounds(self):
        # a <= a, so upper({a}) = {a, top} differs from upper({b}) = {b, top}
        P = FinitePreorder.generated_by(["a", "b", "top"], [("a", "top"), ("b", "top")])
        v = check_mp(P, ["a"], ["b"])
        assert not v.holds
        assert v.failure_reason == "different-upper-bounds"
        assert v.upper_a == {"a", "top"}

    def test_minimal_instance(self):
        labels = ["a1", "a2", "b1", "b2", "top"]
        P = FinitePreorder.generated_by(labels, [(x, "top") for x in labels[:4]])
        v = check_mp(P, ["a1", "a2"], ["b1", "b2"])
        assert v.holds
        assert v.witness_same_upper == {"top"}
        assert (v.witness_a, v.witness_b) == ("a1", "b1")
        assert v.lemma_condition

    def test_not_disjoint(self, chain):
        v = check_mp(chain, ["a"], ["a"])
        assert not v.holds and v.failure_reason == "not-disjoint"

    def test_different_upper(self, chain):
        v = check_mp(chain, ["a"], ["b"])
        assert not v.holds and v.failure_reason == "different-upper-bounds"


def test_check_mp_matches_brute_force_on_random_preorders():
    rng = np.random.default_rng(2026)
    labels = [f"e{i}" for i in range(8)]
    held = 0
    for _ in range(1000):
        rel, A, B = random_mp_instance(rng, 8)
        P = FinitePreorder(labels, rel)
        v = check_mp(P, [labels[i] for i in A], [labels[i] for i in B])
        assert v.holds == brute_force_mp(rel.tolist(), A, B)
        assert v.lemma_condition == brute_force_lemma(rel.tolist(), A, B)
        held += v.holds
    assert held > 0  # the sample actually exercises the positive branch


def _assert_preorder_axioms(P):
    k = len(P)
    rel = P.leq
    assert all(rel[i, i] for i in range(k))
    for i, j, m in itertools.product(range(k), repeat=3):
        if rel[i, j] and rel[j, m]:
            assert rel[i, m]


class TestLandscapeAbstraction:
    GRID = dict(gamma=0.05, tau=0.25, n_grid=(4, 16, 64, 256), q_grid=(0.0, 0.1, 0.2))

    def test_mp_holds(self):
        L = build_landscape_abstraction(**self.GRID)
        _assert_preorder_axioms(L.preorder)
        v = L.check()
        assert v.holds
        assert v.witness_same_upper == {ORACLE}
        assert v.cross_relation_empty and v.lemma_condition
        assert sup_set(L.preorder, L.np_family) == sup_set(L.preorder, L.rdt_family) == {ORACLE}

    def test_families_incomparable(self):
        P, A, B = build_landscape_abstraction(**self.GRID)
        for a, b in itertools.product(A, B):
            assert not P.le(a, b) and not P.le(b, a)

    def test_everything_below_oracle_only(self):
        P, A, B = build_landscape_abstraction(**self.GRID)
        for lab in A | B:
            assert P.le(lab, ORACLE) and not P.le(ORACLE, lab)

    def test_cross_dimension_ordering(self):
        L = build_landscape_abstraction(0.05, 0.25, (4, 16), (0.0, 0.1), same_dimension_only=False)
        assert np_power_exact(0.05, 4) < np_power_exact(0.05, 16)
        assert L.preorder.le("NP(4)", "NP(16)")
        assert not L.preorder.le("NP(16)", "NP(4)")
        _assert_preorder_axioms(L.preorder)

    def test_cross_dimension_truncation_has_family_tops(self):
        L = build_landscape_abstraction(**self.GRID, same_dimension_only=False)
        v = L.check()
        assert not v.holds
        assert v.failure_reason == "different-upper-bounds"
        assert v.upper_a == {"NP(256)", ORACLE}
        assert v.cross_relation_empty

    def test_same_dimension_default_separates_n(self):
        L = build_landscape_abstraction(0.05, 0.25, (4, 16), (0.0,))
        assert not L.preorder.le("NP(4)", "NP(16)")

    def test_degenerate_tau_zero(self):
        L = build_landscape_abstraction(0.05, 0.0, (4, 16), (0.0, 0.1))
        assert L.degenerate
        # equal selectivity: RDT(n, 0) is dominated by the optimal NP(n)
        assert L.preorder.le("RDT(4,0)", "NP(4)")
        v = L.check()
        assert not v.holds

    def test_mc_mode(self):
        L = build_landscape_abstraction(0.05, 0.25, (4, 16), (0.0, 0.2), mode="mc",
                                        trials=20_000, seed=5)
        _assert_preorder_axioms(L.preorder)
        assert L.check().holds
        el = L.elements["RDT(16,0.25)"]
        for q, (lo, hi) in el.power_band.items():
            assert lo <= el.power_profile[q] <= hi

    def test_mc_mode_cross_dimension_needs_separated_intervals(self):
        L = build_landscape_abstraction(0.05, 0.25, (4, 16, 64), (0.0,), mode="mc",
                                        trials=20_000, seed=5, same_dimension_only=False)
        _assert_preorder_axioms(L.preorder)
        assert L.preorder.le("NP(4)", "NP(16)")

    def test_profiles(self):
        L = build_landscape_abstraction(**self.GRID)
        assert set(L.elements["NP(4)"].power_profile) == {0.0}
        assert set(L.elements["RDT(4,0.25)"].power_profile) == {0.0, 0.1, 0.2}
        assert all(v == 1.0 for v in L.elements[ORACLE].power_profile.values())
        for lab in L.np_family | L.rdt_family:
            assert all(0 < p <= 1 for p in L.elements[lab].power_profile.values())

    @pytest.mark.parametrize("kwargs", [
        dict(n_grid=()), dict(q_grid=()), dict(q_grid=(0.3, 0.4)), dict(tau=0.5),
        dict(gamma=1.0), dict(mode="bogus"), dict(n_grid=(4, 4)), dict(q_grid=(0.0, 0.6)),
    ])
    def test_invalid(self, kwargs):
        args = {**self.GRID, **kwargs}
        with pytest.raises(ValueError):
            build_landscape_abstraction(**args)

    def test_verdict_json(self):
        L = build_landscape_abstraction(**self.GRID)
        rec = json.loads(L.verdict_json())
        assert list(rec)[:8] == ["holds", "mode", "gamma", "tau", "n_grid", "q_grid",
                                 "witnesses", "relation_matrix"]
        assert rec["holds"] is True and rec["mode"] == "analytic"
        assert rec["witnesses"]["same_upper_bounds"] == [ORACLE]
        k = len(rec["relation_matrix"]["labels"])
        assert len(rec["relation_matrix"]["leq"]) == k == 9
