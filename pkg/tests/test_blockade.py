import random
from fractions import Fraction
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings, strategies as st

from conftest import graphs
from purepairs.blockade import (
    Blockade, equipartition, find_rainbow_copy, is_divergent, linkage, metrics,
)
from purepairs.graph import (
    ABSENT, FOUND, INCONCLUSIVE, complete_bipartite, cycle_graph, empty_graph, gnp, path_graph,
)


def brute_rainbow(b, h, first=None, last=None):
    where = b.block_of()
    pool = sorted(where)
    for image in permutations(pool, h.n):
        blocks = [where[v] for v in image]
        if len(set(blocks)) != h.n:
            continue
        if first is not None and blocks[first] != min(blocks):
            continue
        if last is not None and blocks[last] != max(blocks):
            continue
        if all(b.host.has_edge(image[u], image[v]) == h.has_edge(u, v) for u, v in combinations(range(h.n), 2)):
            return True
    return False


def brute_divergent(b, gamma, delta):
    import math
    for i, ai in b.blocks:
        for j, aj in b.blocks:
            if i == j:
                continue
            xs, ys = math.ceil(gamma * len(ai)), math.ceil(delta * len(aj))
            for x in combinations(ai, xs):
                free = [y for y in aj if not any(b.host.has_edge(u, y) for u in x)]
                if len(free) >= ys:
                    return True
    return False


def test_metrics_width_and_shrinkage():
    b = Blockade.from_sets(empty_graph(100), [range(10), range(10, 20)])
    m = metrics(b)
    assert m.width == 10 and m.linkage == 0
    assert abs(m.shrinkage.sigma - 0.5) < 1e-12
    assert m.shrinkage.at_most(Fraction(1, 2)) and not m.shrinkage.at_most(Fraction(49, 100))


def test_linkage_on_c4():
    c4 = cycle_graph(4)
    assert linkage(Blockade.from_sets(c4, [[0], [2]])) == 0
    assert linkage(Blockade.from_sets(c4, [[0], [1]])) == 1


def test_metrics_reject_tiny_host():
    with pytest.raises(ValueError):
        metrics(Blockade.from_sets(empty_graph(1), [[0]]))


def test_divergence_examples():
    anti = Blockade.from_sets(empty_graph(4), [[0, 1], [2, 3]])
    assert is_divergent(anti, 1, 1).verdict == FOUND
    full = Blockade.from_sets(complete_bipartite(2, 2), [[0, 1], [2, 3]])
    assert is_divergent(full, Fraction(1, 2), Fraction(1, 2)).verdict == ABSENT
    c5 = Blockade.from_sets(cycle_graph(5), [[0, 1], [2, 3]])
    out = is_divergent(c5, Fraction(1, 2), Fraction(1, 2))
    assert out.divergent
    assert cycle_graph(5).is_anticomplete_to(sum(1 << v for v in out.x), sum(1 << v for v in out.y))


def test_divergence_budget():
    b = Blockade.from_sets(empty_graph(4), [[0, 1], [2, 3]])
    with pytest.raises(ValueError):
        is_divergent(b, 1, 1, budget=0)
    wide = equipartition(gnp(40, 0.5, 1), 2)
    assert is_divergent(wide, Fraction(1, 2), Fraction(1, 2), budget=3).verdict in (INCONCLUSIVE, FOUND, ABSENT)


@settings(max_examples=80, deadline=None)
@given(graphs(min_n=4, max_n=8), st.integers(2, 4), st.sampled_from([Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)]))
def test_divergence_matches_enumeration_and_is_monotone(g, k, gamma):
    b = equipartition(g, min(k, g.n))
    out = is_divergent(b, gamma, gamma)
    assert out.divergent == brute_divergent(b, gamma, gamma)
    if out.verdict == ABSENT:
        assert is_divergent(b, min(1, gamma * 2), min(1, gamma * 3 / 2)).verdict == ABSENT


def test_equipartition_examples():
    assert [len(vs) for _, vs in equipartition(empty_graph(10), 3).blocks] == [4, 3, 3]
    assert all(len(vs) == 1 for _, vs in equipartition(empty_graph(6), 6).blocks)
    b = equipartition(empty_graph(100), 7)
    assert b.width == 14 and b.width >= Fraction(100, 14)
    with pytest.raises(ValueError):
        equipartition(empty_graph(3), 4)


def test_rainbow_examples():
    c5 = cycle_graph(5)
    singles = Blockade.from_sets(c5, [[v] for v in range(5)])
    found = find_rainbow_copy(singles, c5)
    assert found is not None and found.is_valid(singles, c5)
    assert find_rainbow_copy(Blockade.from_sets(c5, [[0, 1], [2, 3]]), path_graph(3)) is None
    b = equipartition(cycle_graph(6), 3)
    out = find_rainbow_copy(b, path_graph(3))
    assert (out is not None) == brute_rainbow(b, path_graph(3))


@settings(max_examples=120, deadline=None)
@given(graphs(min_n=2, max_n=8), graphs(max_n=4), st.integers(1, 6), st.booleans())
def test_rainbow_matches_enumeration(g, h, k, constrained):
    b = equipartition(g, min(k, g.n))
    first, last = (0, h.n - 1) if constrained and h.n >= 2 else (None, None)
    out = find_rainbow_copy(b, h, first, last)
    assert (out is not None) == brute_rainbow(b, h, first, last)
    if out is not None:
        assert out.is_valid(b, h, first, last)


@settings(max_examples=60, deadline=None)
@given(graphs(min_n=4, max_n=9), st.integers(2, 4), st.randoms())
def test_metrics_invariant_under_reindexing(g, k, rnd):
    b = equipartition(g, min(k, g.n))
    order = list(b.indices)
    rnd.shuffle(order)
    r = b.reindex(order)
    m1, m2 = metrics(b), metrics(r)
    assert (m1.length, m1.width, m1.shrinkage, m1.linkage) == (m2.length, m2.width, m2.shrinkage, m2.linkage)


def test_blockade_json_round_trip():
    g = gnp(12, 0.3, 5)
    b = equipartition(g, 3)
    assert Blockade.from_json(g, b.to_json()) == b
    with pytest.raises(ValueError):
        Blockade.from_json(gnp(12, 0.3, 6), b.to_json())


def test_blockade_rejects_overlap():
    with pytest.raises(ValueError):
        Blockade.from_sets(empty_graph(3), [[0, 1], [1, 2]])
