import random
from fractions import Fraction as F

import pytest

from lrrc.adversary import (
    Witness,
    build_m_set_witness,
    dhs_newest_node_bound,
    explore_bhs,
    fhs_formula,
    fhs_upper_witness,
    find_m_set,
    find_triangle,
    m_set_size,
    node_sequence,
    shs_break_search,
    tree_witness,
)
from lrrc.errors import ConstructionError, ParamError
from lrrc.families import minimizing_permutation
from lrrc.ifg import structure_check
from lrrc.params import SystemParams, bhs_mincut_value
from lrrc.policies import (
    CliqueAvoidingPolicy,
    CA_ARTIFICIAL_PARENTS,
    MfhsPolicy,
    RandomDynamicPolicy,
    ShsTable,
    mfhs_build,
    random_shs_table,
)


def table_with(overrides, seed=0):
    base = random_shs_table(5, 2, 1, random.Random(seed))
    entries = dict(base.entries)
    for (f, u), h in overrides.items():
        entries[(f, frozenset({u}))] = tuple(sorted(h))
    return ShsTable(5, 2, 1, entries)


class TestMSet:
    def test_size(self):
        assert m_set_size(5, 2, 1) == 2
        assert m_set_size(8, 4, 1) == 3

    @pytest.mark.parametrize("seed", range(5))
    def test_any_policy_on_five(self, seed):
        p = SystemParams(5, 3, 2, 1, alpha=2, beta=1)
        w = build_m_set_witness(p, RandomDynamicPolicy(seed))
        assert len(w.nodes) == 2
        assert structure_check(w.graph(), w.nodes, "m-set")

    def test_mfhs_eight(self):
        p = SystemParams(8, 4, 4, 1, alpha=4, beta=1)
        w = build_m_set_witness(p, MfhsPolicy(mfhs_build(8, 4, 1)))
        assert len(w.nodes) == 3 and w.note == "m=3"
        assert w.cut <= bhs_mincut_value(p)

    def test_everyone_helps(self):
        p = SystemParams(5, 4, 4, 0, alpha=4, beta=1)
        w = build_m_set_witness(p, RandomDynamicPolicy(1))
        assert len(w.nodes) == 5

    def test_find_none(self):
        w = build_m_set_witness(SystemParams(5, 3, 2, 1, alpha=2, beta=1), RandomDynamicPolicy(0))
        assert find_m_set(w.graph(), [1], 2) is None


class TestShsSearch:
    def test_case_one_one(self):
        t = table_with({(1, 4): (2, 3), (2, 1): (3, 4)})
        w = shs_break_search(t)
        assert w.note == "case 1.1"
        assert w.nodes == (3, 2, 1)
        assert [(r.failed, set(r.unavailable)) for r in w.records][1:] == [(2, {1}), (1, {4})]
        assert w.cut == 3

    def test_case_two_two(self):
        t = table_with({(1, 4): (2, 3), (2, 1): (4, 5), (2, 4): (1, 5), (1, 3): (4, 5)})
        w = shs_break_search(t)
        assert w.note == "case 2.2"
        assert w.nodes == (5, 1, 2)
        assert w.cut == 3

    @pytest.mark.parametrize("seed", range(20))
    def test_random_tables_rational_points(self, seed):
        t = random_shs_table(5, 2, 1, random.Random(seed))
        for a, b in [(2, 1), (F(3, 2), 1), (1, 1), (3, F(1, 2))]:
            w = shs_break_search(t, alpha=a, beta=b)
            assert w.cut == min(2 * F(b), F(a)) + min(F(b), F(a))
            assert find_triangle(w.graph()) is not None

    def test_k4(self):
        t = random_shs_table(5, 2, 1, random.Random(3))
        w = shs_break_search(t, k=4)
        assert len(w.collector) == 4
        assert w.cut <= 4

    def test_wrong_params(self):
        with pytest.raises(ParamError):
            shs_break_search(random_shs_table(6, 2, 1, random.Random(0)))


class TestNewestNode:
    @pytest.mark.parametrize("k", [3, 4])
    def test_clique_avoiding_is_tight(self, k):
        p = SystemParams(5, k, 2, 1, alpha=2, beta=1)
        w = dhs_newest_node_bound(CliqueAvoidingPolicy(CA_ARTIFICIAL_PARENTS), p)
        assert w.cut == 4

    @pytest.mark.parametrize("seed", range(20))
    def test_random_policies(self, seed):
        p = SystemParams(5, 3, 2, 1, alpha=1, beta=1)
        assert dhs_newest_node_bound(RandomDynamicPolicy(seed), p).cut <= 2

    def test_wrong_params(self):
        with pytest.raises(ParamError):
            dhs_newest_node_bound(RandomDynamicPolicy(0), SystemParams(6, 3, 2, 1, alpha=2, beta=1))


class TestTrees:
    @pytest.mark.parametrize("seed", range(10))
    def test_three_tree(self, seed):
        p = SystemParams(7, 3, 1, 1, alpha=1, beta=1)
        w = tree_witness(RandomDynamicPolicy(seed), p, 3)
        assert structure_check(w.graph(), w.nodes, "m-tree")
        assert w.cut <= 1

    @pytest.mark.parametrize("n", [7, 8, 10])
    def test_four_tree(self, n):
        p = SystemParams(n, 4, 1, 1, alpha=1, beta=1)
        for seed in range(10):
            w = tree_witness(RandomDynamicPolicy(seed), p, 4)
            assert len(w.nodes) == 4
            assert w.cut <= 1

    def test_four_tree_excluded(self):
        with pytest.raises(ConstructionError):
            tree_witness(RandomDynamicPolicy(0), SystemParams(6, 4, 1, 1, alpha=1, beta=1), 4)

    def test_needs_d1(self):
        with pytest.raises(ParamError):
            tree_witness(RandomDynamicPolicy(0), SystemParams(7, 3, 2, 1, alpha=1, beta=1), 3)

    def test_r0_odd(self):
        w = tree_witness(RandomDynamicPolicy(0), SystemParams(7, 3, 1, 0, alpha=1, beta=1), 3)
        assert w.cut <= 1
        with pytest.raises(ConstructionError):
            tree_witness(RandomDynamicPolicy(0), SystemParams(6, 3, 1, 0, alpha=1, beta=1), 3)


class TestFhs:
    PI = (1, 2, 1, -2, 0, 0, 1, 2)
    P = SystemParams(8, 4, 4, 1, beta=1)

    def test_node_sequence(self):
        assert node_sequence(8, 4, 1, self.PI) == (1, 4, 2, 6, 7, 8, 3, 5)

    def test_logged_repairs(self):
        w = fhs_upper_witness(self.P, self.PI)
        by_node = {r.failed: r for r in w.records}
        assert by_node[6].unavailable == {3} and by_node[6].helpers == (1, 2, 7, 8)
        assert by_node[8].unavailable == {5} and by_node[8].helpers == (1, 2, 3, 4)

    def test_cut_equals_formula(self):
        w = fhs_upper_witness(self.P, self.PI)
        assert w.cut == fhs_formula(self.P, self.PI, w.alpha, 1) == 12

    def test_minimizer_attains_formula(self):
        for a, b in [(4, 1), (2, 1), (1, F(1, 2))]:
            p = self.P.with_point(a, b)
            pi = minimizing_permutation(p)
            assert fhs_upper_witness(p, pi).cut == fhs_formula(p, pi, a, b)

    def test_never_above_formula(self):
        rng = random.Random(0)
        fi = [1, 1, 1, 2, 2, -2, 0, 0]
        for _ in range(30):
            pi = rng.sample(fi, len(fi))
            assert fhs_upper_witness(self.P, pi, alpha=2).cut <= fhs_formula(self.P, pi, 2, 1)

    def test_not_a_permutation(self):
        with pytest.raises(ConstructionError):
            node_sequence(8, 4, 1, (1,) * 8)


def test_witness_round_trip():
    w = fhs_upper_witness(SystemParams(8, 4, 4, 1, beta=1), (1, 2, 1, -2, 0, 0, 1, 2))
    back = Witness.loads(w.dumps())
    assert back.records == w.records and back.note == w.note
    assert back.replay_cut() == w.cut


class TestExploreBhs:
    def test_attains_closed_form(self):
        res = explore_bhs(SystemParams(4, 2, 2, 0), [(2, 1), (1, 1)])
        assert res.attains()

    def test_full_depth_two(self):
        res = explore_bhs(SystemParams(4, 3, 1, 0), [(1, 1), (2, 1)], max_depth=2,
                          stop_when_attained=False, budget=10**6)
        assert res.complete
        assert res.below == []
