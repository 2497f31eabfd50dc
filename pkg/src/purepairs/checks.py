"""Independent invariant checkers for the machinery structures.

Written against plain Python sets and ``Graph.has_edge`` only, so a bug in the
bitmask-based constructors cannot hide itself here.  Each checker returns a
list of violation strings; empty means the structure is valid.
"""

from __future__ import annotations

from itertools import combinations


def _nbrs(g, v):
    return {u for u in range(g.n) if g.has_edge(u, v)}


def _covers(g, a, b):
    return all(any(g.has_edge(x, y) for x in a) for y in b)


def _anticomplete(g, a, b):
    return not any(g.has_edge(x, y) for x in a for y in b)


def levelling_violations(g, layers, min_height: int = 1) -> list[str]:
    out = []
    layers = [set(layer) for layer in layers]
    k = len(layers) - 1
    if k < min_height:
        out.append(f"height {k} below {min_height}")
    if not layers or len(layers[0]) != 1:
        out.append("L0 must be a single vertex")
    for a, b in combinations(range(len(layers)), 2):
        if layers[a] & layers[b]:
            out.append(f"layers {a} and {b} overlap")
    for i in range(1, len(layers)):
        if not layers[i]:
            out.append(f"layer {i} is empty")
        if not _covers(g, layers[i - 1], layers[i]):
            out.append(f"layer {i - 1} does not cover layer {i}")
        if i >= 2:
            below = set().union(*layers[: i - 1])
            if not _anticomplete(g, below, layers[i]):
                out.append(f"layers 0..{i - 2} not anticomplete to layer {i}")
    return out


def reaches_violations(g, layers, target) -> list[str]:
    return levelling_violations(g, list(layers) + [set(target)], min_height=1)


def grading_violations(g, layers, blocks, direction: str, order=None) -> list[str]:
    """``blocks`` is a list of vertex sets in index order.

    forwards: for each j some subset of the base covers blocks >= j and misses
    blocks < j.  backwards: covers blocks <= j and misses blocks > j.  With an
    explicit ``order`` (a permutation of block positions) the general grading
    condition is checked instead.
    """
    out = reaches_violations(g, layers, set().union(*blocks) if blocks else set())
    base = set(layers[-1])
    n = len(blocks)
    if order is None:
        order = list(range(n)) if direction == "forwards" else list(range(n - 1, -1, -1))
    for gpos in range(n):
        later = set().union(*(blocks[order[h]] for h in range(gpos, n)))
        earlier = set().union(*(blocks[order[h]] for h in range(gpos)))
        # the largest admissible witness is every base vertex missing the earlier blocks
        witness = {y for y in base if not (_nbrs(g, y) & earlier)}
        if not _covers(g, witness, later):
            out.append(f"no witness for grading position {gpos}")
    return out


def bilevelling_violations(g, L, M, C, bigrading: bool = False, ambient=None) -> list[str]:
    """``L``/``M`` are layer lists, ``C`` a list of vertex sets in forward order,
    ``ambient`` an optional list of vertex sets for the rainbow condition."""
    out = []
    out += ["L: " + s for s in levelling_violations(g, L, min_height=0)]
    out += ["M: " + s for s in levelling_violations(g, M, min_height=0)]
    if len(L) + len(M) - 2 < 1:
        out.append("height must be at least 1")
    if set(L[0]) != set(M[0]):
        out.append("L and M do not share the apex")
    lrest = set().union(*map(set, L[1:])) if len(L) > 1 else set()
    mrest = set().union(*map(set, M[1:])) if len(M) > 1 else set()
    if lrest & mrest:
        out.append("L and M layers intersect")
    if not _anticomplete(g, lrest, mrest):
        out.append("L and M layers are not anticomplete")
    if not C or any(not c for c in C):
        out.append("C has an empty block or no blocks")
    cs = [set(c) for c in C]
    for a, b in combinations(range(len(cs)), 2):
        if cs[a] & cs[b]:
            out.append(f"C blocks {a} and {b} overlap")
    out += ["L grading: " + s for s in grading_violations(g, L, cs, "forwards")]
    if bigrading:
        out += ["M grading: " + s for s in grading_violations(g, M, cs, "backwards")]
    else:
        out += ["M reach: " + s for s in reaches_violations(g, M, set().union(*cs) if cs else set())]
    if ambient is not None:
        sets = [set(x) for x in cs] + [set(x) for x in L] + [set(x) for x in M[1:]]
        owners = []
        for s in sets:
            own = [i for i, blk in enumerate(ambient) if s and s <= set(blk)]
            if len(own) != 1:
                out.append("a set is not inside exactly one ambient block")
            owners += own
        if len(owners) != len(set(owners)):
            out.append("an ambient block includes two of the sets")
    return out


def induced_path_violations(g, path, length: int | None = None) -> list[str]:
    out = []
    if len(set(path)) != len(path):
        out.append("repeated vertex")
    if length is not None and len(path) - 1 != length:
        out.append(f"length {len(path) - 1} != {length}")
    for a, b in combinations(range(len(path)), 2):
        adj = g.has_edge(path[a], path[b])
        if adj != (b == a + 1):
            out.append(f"path positions {a},{b} adjacency wrong")
    return out


def induced_cycle_violations(g, cycle, length: int) -> list[str]:
    out = []
    n = len(cycle)
    if n != length or len(set(cycle)) != n:
        out.append("wrong length or repeated vertex")
    for a, b in combinations(range(n), 2):
        adj = g.has_edge(cycle[a], cycle[b])
        if adj != ((b - a) % n in (1, n - 1)):
            out.append(f"cycle positions {a},{b} adjacency wrong")
    return out


def expansion_violation(g, blocks, tau, subsets):
    """First ``(i, j, X)`` among the given candidate subsets that breaks tau-expansion."""
    from fractions import Fraction

    tau = Fraction(tau)
    for i, bi in blocks.items():
        for j, bj in blocks.items():
            if i == j:
                continue
            for x in subsets(bi):
                hit = {y for y in bj if any(g.has_edge(y, u) for u in x)}
                if Fraction(len(hit), len(bj)) < min(tau * len(x) / len(bi), Fraction(1, 4)):
                    return i, j, tuple(sorted(x))
    return None
