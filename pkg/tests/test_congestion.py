import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings

from conftest import brute_congestion, brute_density, graphs
from purepairs.congestion import LimitExceeded, congestion, max_density
from purepairs.graph import Graph, complete_graph, cycle_graph, disjoint_union, empty_graph, gnp, path_graph


def test_trees_are_zero():
    for seed in range(30):
        t = nx.random_labeled_tree(random.Random(seed).randint(1, 15), seed=seed)
        g = Graph(t.number_of_nodes(), t.edges())
        for method in ("exhaustive", "parametric-cut"):
            assert congestion(g, method).value == 0


def test_c5():
    res = congestion(cycle_graph(5))
    assert res.value == Fraction(1, 5)
    assert res.witness == (0, 1, 2, 3, 4)
    assert res.check(cycle_graph(5))


def test_k4():
    assert congestion(complete_graph(4)).value == Fraction(1, 2)


def test_density_examples():
    assert max_density(path_graph(2))[0] == 1
    assert max_density(complete_graph(4))[0] == 2
    gamma, witness = max_density(disjoint_union(complete_graph(3), complete_graph(3)))
    assert gamma == Fraction(3, 2) and witness == (0, 1, 2)


def test_density_needs_an_edge():
    with pytest.raises(ValueError):
        max_density(empty_graph(3))


def test_exhaustive_limit():
    with pytest.raises(LimitExceeded):
        congestion(cycle_graph(20), "exhaustive", limit=16)
    assert congestion(cycle_graph(20), "parametric-cut").value == Fraction(1, 20)


@pytest.mark.parametrize("k", range(3, 13))
def test_cycles(k):
    assert congestion(cycle_graph(k)).value == Fraction(1, k)


@settings(max_examples=200, deadline=None)
@given(graphs(max_n=7))
def test_methods_agree_with_enumeration(g):
    expect = brute_congestion(g)
    a, b = congestion(g, "exhaustive"), congestion(g, "parametric-cut")
    assert a.value == b.value == expect
    assert a.check(g) and b.check(g)
    if g.m:
        assert max_density(g)[0] == brute_density(g)
        assert a.value == max(Fraction(0), 1 - 1 / max_density(g)[0])


@settings(max_examples=100, deadline=None)
@given(graphs(min_n=2, max_n=8))
def test_monotone_under_subgraphs(g):
    edges = g.edges()
    rng = random.Random(g.n * 1000 + g.m)
    sub = Graph(g.n, [e for e in edges if rng.random() < 0.6])
    assert congestion(sub, "parametric-cut").value <= congestion(g, "parametric-cut").value


def test_forest_iff_zero_random():
    for seed in range(60):
        g = gnp(10, 0.2, seed)
        assert (congestion(g, "parametric-cut").value == 0) == nx.is_forest(g.to_networkx())
