"""Shared brute-force oracles. None of these reuse the library's search code."""

from fractions import Fraction
from itertools import combinations, permutations

import pytest
from hypothesis import strategies as st

from purepairs.graph import Graph


def all_graphs(n):
    pairs = list(combinations(range(n), 2))
    for code in range(1 << len(pairs)):
        yield Graph(n, [p for i, p in enumerate(pairs) if code >> i & 1])


def brute_density(g):
    """max |E(J)| / (|J| - 1) over vertex subsets spanning an edge, by enumeration."""
    best = None
    edges = g.edges()
    for r in range(2, g.n + 1):
        for s in combinations(range(g.n), r):
            ss = set(s)
            e = sum(u in ss and v in ss for u, v in edges)
            if e and (best is None or Fraction(e, r - 1) > best):
                best = Fraction(e, r - 1)
    return best


def brute_congestion(g):
    gamma = brute_density(g)
    return Fraction(0) if gamma is None else max(Fraction(0), 1 - 1 / gamma)


def brute_contains(g, h):
    for image in permutations(range(g.n), h.n):
        if all(g.has_edge(image[u], image[v]) == h.has_edge(u, v) for u, v in combinations(range(h.n), 2)):
            return True
    return False


@st.composite
def graphs(draw, min_n=1, max_n=7):
    n = draw(st.integers(min_n, max_n))
    pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, [p for p, keep in zip(pairs, chosen) if keep])


@pytest.fixture(scope="session")
def small_graphs():
    return [g for n in range(1, 6) for g in all_graphs(n)]


# -- structure checkers on plain sets, sharing nothing with the constructors --

def nbrs(g, v):
    return {u for u in range(g.n) if g.has_edge(u, v)}


def covers(g, a, b):
    return all(nbrs(g, y) & set(a) for y in b)


def anticomplete(g, a, b):
    return not any(g.has_edge(x, y) for x in a for y in b)


def levelling_problems(g, layers):
    out = []
    if len(layers[0]) != 1:
        out.append("apex layer is not a singleton")
    flat = [v for layer in layers for v in layer]
    if len(flat) != len(set(flat)):
        out.append("layers overlap")
    for i in range(1, len(layers)):
        if not covers(g, layers[i - 1], layers[i]):
            out.append(f"layer {i - 1} does not cover layer {i}")
        lower = [v for layer in layers[: i - 1] for v in layer]
        if i >= 2 and not anticomplete(g, lower, layers[i]):
            out.append(f"layer {i} touches layers below {i - 1}")
    return out


def bilevelling_problems(bl):
    g = bl.C.host
    out = levelling_problems(g, bl.L.layers) + levelling_problems(g, bl.M.layers)
    if bl.L.apex != bl.M.apex:
        out.append("apexes differ")
    l_rest = [v for layer in bl.L.layers[1:] for v in layer]
    m_rest = [v for layer in bl.M.layers[1:] for v in layer]
    if set(l_rest) & set(m_rest) or not anticomplete(g, l_rest, m_rest):
        out.append("L and M not disjoint and anticomplete")
    blocks = [set(vs) for _, vs in bl.C.blocks]
    for blk in blocks:
        if not covers(g, bl.M.base, blk):
            out.append("M base misses a C block")
    # forwards grading by L: some subset of L's base covers later blocks and misses earlier ones
    for p in range(len(blocks)):
        earlier = set().union(*blocks[:p])
        wit = [y for y in bl.L.base if not nbrs(g, y) & earlier]
        if not all(covers(g, wit, blk) for blk in blocks[p:]):
            out.append(f"L does not grade position {p}")
    if bl.bigrading:
        for p in range(len(blocks)):
            later = set().union(*blocks[p + 1:])
            wit = [y for y in bl.M.base if not nbrs(g, y) & later]
            if not all(covers(g, wit, blk) for blk in blocks[: p + 1]):
                out.append(f"M does not grade position {p} backwards")
    inner = set(v for layer in bl.L.layers[:-1] + bl.M.layers[:-1] for v in layer)
    if any(nbrs(g, v) & set().union(*blocks) for v in inner):
        out.append("non-base layer touches C")
    if bl.ambient is not None:
        where = bl.ambient.block_of()
        groups = [set(layer) for layer in bl.L.layers[1:] + bl.M.layers[1:]] + blocks
        owners = [{where.get(v) for v in grp} for grp in groups]
        if any(len(o) != 1 or None in o for o in owners) or len(set.union(*owners)) != len(groups):
            out.append("not rainbow against the ambient blockade")
    return out


def is_induced_path(g, path):
    if len(set(path)) != len(path):
        return False
    for i, j in combinations(range(len(path)), 2):
        if g.has_edge(path[i], path[j]) != (j == i + 1):
            return False
    return True


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
