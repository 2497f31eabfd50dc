from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings

from conftest import all_graphs, brute_contains, graphs
from purepairs.graph import (
    ABSENT, FOUND, Graph, complement, complete_bipartite, complete_graph, contains, count_induced_copies,
    cycle_graph, empty_graph, find_anticomplete_pair, find_pure_pair, gnp, is_sparse, parse_edgelist,
    path_graph, petersen_graph,
)


def isomorphic(g, h):
    return nx.is_isomorphic(g.to_networkx(), h.to_networkx())


class TestComplement:
    def test_complete_becomes_edgeless(self):
        assert complement(complete_graph(4)) == empty_graph(4)

    def test_involution(self):
        assert complement(complement(cycle_graph(5))) == cycle_graph(5)

    def test_c5_self_complementary(self):
        assert isomorphic(complement(cycle_graph(5)), cycle_graph(5))

    @given(graphs())
    def test_edge_counts_add_up(self, g):
        assert g.m + complement(g).m == g.n * (g.n - 1) // 2


class TestContains:
    def test_c5_has_p4(self):
        emb = contains(cycle_graph(5), path_graph(4))
        assert emb is not None and emb.is_induced(cycle_graph(5), path_graph(4))

    def test_c5_triangle_free(self):
        assert contains(cycle_graph(5), complete_graph(3)) is None

    def test_petersen_has_c5(self):
        emb = contains(petersen_graph(), cycle_graph(5))
        assert emb is not None and emb.is_induced(petersen_graph(), cycle_graph(5))

    def test_complement_invariance_exhaustive(self):
        patterns = [h for n in range(1, 5) for h in all_graphs(n)]
        hosts = [g for g in all_graphs(5)][::7] + [g for g in all_graphs(6)][::401]
        for g in hosts:
            cg = complement(g)
            for h in patterns:
                assert (contains(g, h) is None) == (contains(cg, complement(h)) is None)

    @settings(max_examples=150, deadline=None)
    @given(graphs(max_n=6), graphs(max_n=4))
    def test_agrees_with_permutation_oracle(self, g, h):
        emb = contains(g, h)
        assert (emb is not None) == brute_contains(g, h)
        if emb is not None:
            assert emb.is_induced(g, h)

    def test_copy_count_matches_networkx(self):
        h = path_graph(3)
        for seed in range(5):
            g = gnp(9, 0.4, seed)
            gm = nx.algorithms.isomorphism.GraphMatcher(g.to_networkx(), h.to_networkx())
            images = {frozenset(m) for m in gm.subgraph_isomorphisms_iter()}
            assert count_induced_copies(g, h) == len(images)


class TestSparse:
    def test_examples(self):
        assert is_sparse(empty_graph(5), 0.1)
        assert not is_sparse(complete_graph(4), 0.5)
        assert is_sparse(cycle_graph(10), 0.25)


class TestPairs:
    def test_edgeless_anticomplete(self):
        out = find_anticomplete_pair(empty_graph(4), 2, 2)
        assert out.verdict == FOUND and out.pair.is_valid(empty_graph(4))

    def test_complete_has_none(self):
        assert find_anticomplete_pair(complete_graph(5), 1, 1).verdict == ABSENT

    def test_c5_no_2_2(self):
        assert find_anticomplete_pair(cycle_graph(5), 2, 2).verdict == ABSENT
        assert find_pure_pair(cycle_graph(5), 2).verdict == ABSENT

    def test_k33_complete_pair(self):
        g = complete_bipartite(3, 3)
        out = find_pure_pair(g, 3)
        assert out.found and out.pair.is_valid(g) and len(out.pair.a) >= 3 and len(out.pair.b) >= 3

    def test_edgeless_pure(self):
        out = find_pure_pair(empty_graph(4), 2)
        assert out.found and out.pair.kind == "anticomplete"

    def test_zero_budget_rejected(self):
        with pytest.raises(ValueError):
            find_anticomplete_pair(cycle_graph(5), 1, 1, budget=0)

    @settings(max_examples=100, deadline=None)
    @given(graphs(max_n=7))
    def test_pure_pair_symmetric_under_complement(self, g):
        for t in (1, 2, 3):
            a, b = find_pure_pair(g, t), find_pure_pair(complement(g), t)
            assert a.verdict == b.verdict
            if a.found:
                assert a.pair.is_valid(g)
                assert b.pair.is_valid(complement(g))

    @settings(max_examples=100, deadline=None)
    @given(graphs(max_n=7))
    def test_anticomplete_matches_enumeration(self, g):
        for a_min, b_min in ((1, 1), (2, 2), (1, 3)):
            expect = any(
                g.is_anticomplete_to(sum(1 << v for v in a), sum(1 << v for v in b))
                for a in combinations(range(g.n), a_min)
                for b in combinations(sorted(set(range(g.n)) - set(a)), b_min)
            )
            assert find_anticomplete_pair(g, a_min, b_min).found == expect


class TestGnp:
    def test_extremes(self):
        assert gnp(5, 0, 3) == empty_graph(5)
        assert gnp(5, 1, 3) == complete_graph(5)

    def test_deterministic(self):
        assert gnp(30, 0.3, 99) == gnp(30, 0.3, 99)

    def test_concentration(self):
        n, p = 1000, 0.3
        pairs = n * (n - 1) // 2
        sd = np.sqrt(pairs * p * (1 - p))
        for seed in range(100):
            assert abs(gnp(n, p, seed).m - p * pairs) <= 4 * sd

    def test_bad_p(self):
        with pytest.raises(ValueError):
            gnp(4, 1.5, 0)


def test_edgelist_round_trip():
    g = petersen_graph()
    assert parse_edgelist(g.to_edgelist()) == g


def test_graph6_parse():
    from purepairs.graph import parse_graph6
    g = parse_graph6(nx.to_graph6_bytes(nx.petersen_graph(), header=False).decode())
    assert isomorphic(g, petersen_graph())


def test_graph_equality_by_edges():
    assert Graph(3, [(0, 1)]) == Graph(3, [(1, 0)])
