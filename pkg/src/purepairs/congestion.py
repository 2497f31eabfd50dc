"""Exact congestion of a graph by two independent routes.

Congestion is ``1 - 1/gamma`` where ``gamma`` is the largest ratio
``e(S) / (|S| - 1)`` over vertex sets S with at least two vertices.  On a fixed
vertex set the densest subgraph keeps every induced edge, so both routes work
with vertex subsets only.

* ``exhaustive`` walks all ``2^n`` subsets with an incremental edge count.
* ``parametric-cut`` binary-searches ``q`` with an edge-node min-cut oracle and
  snaps the final cut to the exact ratio.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .graph import Graph, bits, popcount, to_mask

EXHAUSTIVE_LIMIT = 16


class LimitExceeded(ValueError):
    pass


@dataclass(frozen=True)
class CongestionResult:
    value: Fraction
    witness: tuple[int, ...] | None
    witness_edges: tuple[tuple[int, int], ...] | None
    gamma: Fraction | None

    def check(self, g: Graph) -> bool:
        """Recompute the value from the witness and check the stated invariants."""
        if self.witness is None:
            return self.value == 0 and g.m == 0
        mask = to_mask(self.witness)
        e = g.edges_within(mask)
        if e != len(self.witness_edges) or e == 0:
            return False
        if not all(g.has_edge(u, v) and mask >> u & 1 and mask >> v & 1 for u, v in self.witness_edges):
            return False
        ratio = Fraction(e, len(self.witness) - 1)
        return ratio == self.gamma and self.value == max(Fraction(0), 1 - 1 / ratio) and 0 <= self.value < 1


def _result(g: Graph, gamma: Fraction, mask: int) -> CongestionResult:
    witness = tuple(bits(mask))
    edges = tuple((u, v) for u, v in g.edges() if mask >> u & 1 and mask >> v & 1)
    return CongestionResult(max(Fraction(0), 1 - 1 / gamma), witness, edges, gamma)


def _lex_key(mask: int) -> tuple[int, ...]:
    return tuple(bits(mask))


def max_density_exhaustive(g: Graph, limit: int = EXHAUSTIVE_LIMIT) -> tuple[Fraction, int]:
    if g.n > limit:
        raise LimitExceeded(f"exhaustive method limited to n <= {limit}, got {g.n}")
    if g.m == 0:
        raise ValueError("graph has no edges")
    n = g.n
    adj = g.masks
    edges = [0] * (1 << n)
    best, best_mask = Fraction(0), 0
    for s in range(1, 1 << n):
        low = (s & -s).bit_length() - 1
        rest = s & (s - 1)
        edges[s] = edges[rest] + popcount(adj[low] & rest)
        size = popcount(s)
        if size < 2 or edges[s] == 0:
            continue
        r = Fraction(edges[s], size - 1)
        if r > best or (r == best and _lex_key(s) < _lex_key(best_mask)):
            best, best_mask = r, s
    return best, best_mask


# -- min-cut oracle -------------------------------------------------------

def _max_flow_source_side(cap: list[dict[int, int]], source: int, sink: int) -> int:
    """Edmonds-Karp on an integer network; returns the source side as a bitmask."""
    flow = [dict.fromkeys(row, 0) for row in cap]
    for u, row in enumerate(cap):
        for v in row:
            flow[v].setdefault(u, 0)
            cap[v].setdefault(u, 0)
    while True:
        parent = {source: source}
        dq = deque([source])
        while dq and sink not in parent:
            u = dq.popleft()
            for v, c in cap[u].items():
                if v not in parent and c - flow[u][v] > 0:
                    parent[v] = u
                    dq.append(v)
        if sink not in parent:
            return to_mask(parent)
        push, v = None, sink
        while v != source:
            u = parent[v]
            r = cap[u][v] - flow[u][v]
            push = r if push is None else min(push, r)
            v = u
        v = sink
        while v != source:
            u = parent[v]
            flow[u][v] += push
            flow[v][u] -= push
            v = u


def _dense_set_with_anchor(g: Graph, q: Fraction, anchor: int) -> int:
    """Vertex set S maximising ``e(S) - q * |S - {anchor}|`` (anchor always kept).

    Edge-node construction scaled by q's denominator: source -> edge node
    with capacity ``den``; edge node -> both ends uncapped; vertex -> sink with
    capacity ``num`` (zero for the anchor).  Returns the vertex part of the
    source side of a minimum cut.
    """
    num, den = q.numerator, q.denominator
    es = g.edges()
    n, m = g.n, len(es)
    source, sink = n + m, n + m + 1
    big = den * m + num * n + 1
    cap: list[dict[int, int]] = [dict() for _ in range(n + m + 2)]
    for i, (u, v) in enumerate(es):
        node = n + i
        cap[source][node] = den
        cap[node][u] = big
        cap[node][v] = big
    for v in range(n):
        cap[v][sink] = 0 if v == anchor else num
    side = _max_flow_source_side(cap, source, sink)
    return (side & ((1 << n) - 1)) | 1 << anchor


def _beats(g: Graph, q: Fraction) -> int:
    """A vertex set with ``e(S) > q (|S| - 1)``, or 0 if none exists."""
    for anchor in range(g.n):
        if not g.adj_mask(anchor):
            continue
        s = _dense_set_with_anchor(g, q, anchor)
        if g.edges_within(s) > q * (popcount(s) - 1):
            return s
    return 0


def max_density_parametric(g: Graph) -> tuple[Fraction, int]:
    if g.m == 0:
        raise ValueError("graph has no edges")
    u, v = g.edges()[0]
    witness = 1 << u | 1 << v
    # Dinkelbach: query at the best ratio so far; each hit strictly improves it.
    while True:
        best = Fraction(g.edges_within(witness), popcount(witness) - 1)
        s = _beats(g, best)
        if not s:
            return best, witness
        witness = s


def max_density(g: Graph, method: str = "exhaustive") -> tuple[Fraction, tuple[int, ...]]:
    """``(gamma, witness)`` with gamma the largest ``e(S)/(|S|-1)``."""
    if method == "exhaustive":
        gamma, mask = max_density_exhaustive(g)
    elif method == "parametric-cut":
        gamma, mask = max_density_parametric(g)
    else:
        raise ValueError(f"unknown method {method!r}")
    return gamma, tuple(bits(mask))


def congestion(g: Graph, method: str = "exhaustive", limit: int = EXHAUSTIVE_LIMIT) -> CongestionResult:
    if g.m == 0:
        return CongestionResult(Fraction(0), None, None, None)
    if method == "exhaustive":
        gamma, mask = max_density_exhaustive(g, limit)
    elif method == "parametric-cut":
        gamma, mask = max_density_parametric(g)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _result(g, gamma, mask)
