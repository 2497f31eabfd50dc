"""Finite simple graphs, generators, induced containment and pure-pair search.

Vertices are the integers ``0..n-1``.  Adjacency is stored as one Python int
bitmask per vertex, which keeps subset arithmetic cheap for the small hosts
the rest of the package works with.  Graphs are immutable and hashable.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np


def bits(mask: int) -> Iterator[int]:
    """Yield the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ("n", "_adj", "_hash")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self._adj = tuple(adj)
        self._hash = None

    @classmethod
    def from_masks(cls, masks: Sequence[int]) -> "Graph":
        g = cls.__new__(cls)
        g.n = len(masks)
        g._adj = tuple(masks)
        g._hash = None
        for v, m in enumerate(g._adj):
            if m >> v & 1:
                raise ValueError(f"loop at vertex {v}")
            for u in bits(m):
                if not g._adj[u] >> v & 1:
                    raise ValueError("adjacency is not symmetric")
        return g

    # -- basic queries -------------------------------------------------

    def adj_mask(self, v: int) -> int:
        return self._adj[v]

    @property
    def masks(self) -> tuple[int, ...]:
        return self._adj

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    def vertices(self) -> range:
        return range(self.n)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self._adj[u] >> v & 1)

    def neighbors(self, v: int) -> list[int]:
        return list(bits(self._adj[v]))

    def degree(self, v: int) -> int:
        return popcount(self._adj[v])

    def max_degree(self) -> int:
        return max((self.degree(v) for v in range(self.n)), default=0)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self._adj[u] >> (u + 1) << (u + 1))]

    @property
    def m(self) -> int:
        return sum(popcount(a) for a in self._adj) // 2

    def edges_within(self, mask: int) -> int:
        """Number of edges with both ends in the vertex set ``mask``."""
        return sum(popcount(self._adj[v] & mask) for v in bits(mask)) // 2

    def neighborhood(self, mask: int) -> int:
        """Vertices outside ``mask`` with a neighbour in ``mask``."""
        out = 0
        for v in bits(mask):
            out |= self._adj[v]
        return out & ~mask

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph, relabelled so ``vertices[i]`` becomes ``i``."""
        index = {v: i for i, v in enumerate(vertices)}
        edges = [(index[u], index[v]) for u, v in combinations(vertices, 2) if self.has_edge(u, v)]
        return Graph(len(vertices), edges)

    def is_complete_to(self, a: int, b: int) -> bool:
        return all(self._adj[v] & b == b for v in bits(a))

    def is_anticomplete_to(self, a: int, b: int) -> bool:
        return all(self._adj[v] & b == 0 for v in bits(a))

    def is_connected_set(self, mask: int) -> bool:
        if not mask:
            return True
        seen = mask & -mask
        frontier = seen
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= self._adj[v]
            nxt &= mask & ~seen
            seen |= nxt
            frontier = nxt
        return seen == mask

    # -- equality, hashing, serialisation -------------------------------

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self._adj == other._adj

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self._adj))
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def to_edgelist(self) -> str:
        es = self.edges()
        lines = [f"{self.n} {len(es)}"] + [f"{u} {v}" for u, v in es]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        """Stable content hash used to tie blockades to their host."""
        return hashlib.sha256(self.to_edgelist().encode()).hexdigest()[:16]

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g


def complement(g: Graph) -> Graph:
    full = g.all_mask
    return Graph.from_masks([full & ~g.adj_mask(v) & ~(1 << v) for v in range(g.n)])


def disjoint_union(*graphs: Graph) -> Graph:
    edges, offset = [], 0
    for h in graphs:
        edges += [(u + offset, v + offset) for u, v in h.edges()]
        offset += h.n
    return Graph(offset, edges)


# -- named constructors ---------------------------------------------------

def empty_graph(n: int) -> Graph:
    return Graph(n)


def path_graph(n: int) -> Graph:
    """Path on ``n`` vertices (length ``n - 1``)."""
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, combinations(range(n), 2))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


NAMED = {
    "path": path_graph,
    "cycle": cycle_graph,
    "complete": complete_graph,
    "empty": empty_graph,
    "complete-bipartite": complete_bipartite,
    "petersen": petersen_graph,
}


def named_graph(spec: str) -> Graph:
    """Parse ``name:arg[,arg]`` such as ``cycle:5`` or ``complete-bipartite:3,3``."""
    name, _, args = spec.partition(":")
    if name not in NAMED:
        raise ValueError(f"unknown graph name {name!r}")
    params = [int(a) for a in args.split(",") if a]
    return NAMED[name](*params)


# -- text formats ---------------------------------------------------------

def parse_edgelist(text: str) -> Graph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise ValueError("edge list must start with a line 'n m'")
    n, m = int(rows[0][0]), int(rows[0][1])
    edges = [(int(r[0]), int(r[1])) for r in rows[1:]]
    if len(edges) != m:
        raise ValueError(f"header promises {m} edges, found {len(edges)}")
    if len(set(frozenset(e) for e in edges)) != m:
        raise ValueError("duplicate edge in edge list")
    return Graph(n, edges)


def parse_graph6(text: str) -> Graph:
    import networkx as nx

    h = nx.from_graph6_bytes(text.strip().encode())
    order = sorted(h.nodes())
    index = {v: i for i, v in enumerate(order)}
    return Graph(len(order), [(index[u], index[v]) for u, v in h.edges()])


def load_graph(path: str) -> Graph:
    """Read a graph file: edge list by default, graph6 for ``.g6`` files."""
    with open(path) as fh:
        text = fh.read()
    if path.endswith(".g6") or text.startswith(">>graph6<<"):
        return parse_graph6(text.replace(">>graph6<<", ""))
    return parse_edgelist(text)


# -- random graphs --------------------------------------------------------

def gnp(n: int, p: float, seed: int) -> Graph:
    """G(n, p) with a counter-based generator keyed on ``seed``.

    Pair ``(u, v)`` with ``u < v`` has a fixed index in lexicographic order and
    its coin is the uniform at that counter position, so the outcome for a pair
    does not depend on how the others are visited.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    total = n * (n - 1) // 2
    bitgen = np.random.Philox(key=seed & (2**64 - 1))
    draws = np.random.Generator(bitgen).random(total)
    iu, iv = np.triu_indices(n, k=1)
    keep = draws < p
    return Graph(n, zip(iu[keep].tolist(), iv[keep].tolist()))


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Independent numpy generator for a (seed, stream...) key."""
    return np.random.default_rng([seed & (2**64 - 1), *stream])


# -- induced containment --------------------------------------------------

@dataclass(frozen=True)
class Embedding:
    """Injective map from pattern vertices to host vertices (``map[i]`` is the image of ``i``)."""

    map: tuple[int, ...]

    def is_induced(self, host: Graph, pattern: Graph) -> bool:
        if len(self.map) != pattern.n or len(set(self.map)) != pattern.n:
            return False
        return all(
            host.has_edge(self.map[u], self.map[v]) == pattern.has_edge(u, v)
            for u, v in combinations(range(pattern.n), 2)
        )


def _search_order(h: Graph) -> list[int]:
    # Grow the order so each new vertex has as many placed neighbours as possible.
    order, placed = [], 0
    remaining = set(range(h.n))
    while remaining:
        v = max(sorted(remaining), key=lambda x: (popcount(h.adj_mask(x) & placed), h.degree(x)))
        order.append(v)
        placed |= 1 << v
        remaining.discard(v)
    return order


def contains(g: Graph, h: Graph, allowed: Sequence[int] | None = None) -> Embedding | None:
    """Induced embedding of ``h`` in ``g`` or ``None``.

    ``allowed`` optionally restricts, per pattern vertex, which host vertices
    it may map to (a bitmask per pattern vertex).
    """
    if h.n > g.n:
        return None
    order = _search_order(h)
    image = [-1] * h.n
    full = g.all_mask
    dom = list(allowed) if allowed is not None else [full] * h.n

    def extend(depth: int, used: int) -> bool:
        if depth == h.n:
            return True
        x = order[depth]
        cand = dom[x] & ~used
        for y in order[:depth]:
            gy = g.adj_mask(image[y])
            cand &= gy if h.has_edge(x, y) else ~gy
            if not cand:
                return False
        for v in bits(cand):
            image[x] = v
            if extend(depth + 1, used | 1 << v):
                return True
        image[x] = -1
        return False

    if extend(0, 0):
        return Embedding(tuple(image))
    return None


def induced_embeddings(g: Graph, h: Graph) -> Iterator[Embedding]:
    """Every induced embedding of ``h`` in ``g``, in a fixed order."""
    if h.n > g.n:
        return
    order = _search_order(h)
    image = [-1] * h.n

    def extend(depth: int, used: int):
        if depth == h.n:
            yield Embedding(tuple(image))
            return
        x = order[depth]
        cand = g.all_mask & ~used
        for y in order[:depth]:
            gy = g.adj_mask(image[y])
            cand &= gy if h.has_edge(x, y) else ~gy
        for v in bits(cand):
            image[x] = v
            yield from extend(depth + 1, used | 1 << v)
        image[x] = -1

    yield from extend(0, 0)


def count_induced_copies(g: Graph, h: Graph) -> int:
    """Number of induced subgraphs of ``g`` isomorphic to ``h`` (embeddings over automorphisms)."""
    if h.n == 0:
        return 1
    autos = sum(1 for _ in induced_embeddings(h, h))
    return sum(1 for _ in induced_embeddings(g, h)) // autos


# -- pure pairs -----------------------------------------------------------

@dataclass(frozen=True)
class PurePair:
    a: tuple[int, ...]
    b: tuple[int, ...]
    kind: str  # "complete" or "anticomplete"

    def is_valid(self, g: Graph) -> bool:
        if not self.a or not self.b or set(self.a) & set(self.b):
            return False
        am, bm = to_mask(self.a), to_mask(self.b)
        if self.kind == "complete":
            return g.is_complete_to(am, bm)
        if self.kind == "anticomplete":
            return g.is_anticomplete_to(am, bm)
        return False


FOUND, ABSENT, INCONCLUSIVE = "found", "verified-absent", "inconclusive"


@dataclass(frozen=True)
class PairSearch:
    """Outcome of a budgeted pure-pair search."""

    verdict: str
    pair: PurePair | None = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.verdict == FOUND


class BudgetExhausted(Exception):
    pass


def anticomplete_search(g: Graph, a_min: int, b_min: int, budget: int, a_within: int, b_within: int):
    """Branch and bound over ``a_min``-subsets A of ``a_within``.

    The best partner for a fixed A is its whole common non-neighbourhood in
    ``b_within``, so only A is enumerated; a branch dies as soon as that set is
    too small to host B.  Returns ``((A, B) or None, nodes, completed)``.
    """
    nodes = 0
    order = list(bits(a_within))

    def rec(start: int, depth: int, a: int, free: int):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExhausted
        if depth == a_min:
            return (a, free) if popcount(free) >= b_min else None
        for i in range(start, len(order) - (a_min - depth) + 1):
            v = order[i]
            nfree = free & ~g.adj_mask(v) & ~(1 << v)
            if popcount(nfree) < b_min:
                continue
            hit = rec(i + 1, depth + 1, a | 1 << v, nfree)
            if hit:
                return hit
        return None

    try:
        return rec(0, 0, 0, b_within), nodes, True
    except BudgetExhausted:
        return None, nodes, False


def find_anticomplete_pair(g: Graph, a_min: int, b_min: int, budget: int = 1_000_000) -> PairSearch:
    """Anticomplete pair with ``|A| >= a_min`` and ``|B| >= b_min``."""
    if a_min < 1 or b_min < 1:
        raise ValueError("a_min and b_min must be at least 1")
    if budget <= 0:
        raise ValueError("budget must be positive")
    hit, nodes, complete = anticomplete_search(g, a_min, b_min, budget, g.all_mask, g.all_mask)
    if hit:
        a, b = hit
        return PairSearch(FOUND, PurePair(tuple(bits(a)), tuple(bits(b)), "anticomplete"), nodes)
    return PairSearch(ABSENT if complete else INCONCLUSIVE, None, nodes)


def find_pure_pair(g: Graph, t: int, budget: int = 1_000_000) -> PairSearch:
    """Pure pair with both sides of size at least ``t`` (anticomplete tried first)."""
    if t < 1:
        raise ValueError("t must be at least 1")
    first = find_anticomplete_pair(g, t, t, budget)
    if first.found:
        return first
    second = find_anticomplete_pair(complement(g), t, t, budget)
    nodes = first.nodes + second.nodes
    if second.found:
        return PairSearch(FOUND, PurePair(second.pair.a, second.pair.b, "complete"), nodes)
    if first.verdict == ABSENT and second.verdict == ABSENT:
        return PairSearch(ABSENT, None, nodes)
    return PairSearch(INCONCLUSIVE, None, nodes)


def is_sparse(g: Graph, eps) -> bool:
    """Every degree is strictly below ``eps * n``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return all(g.degree(v) < eps * g.n for v in range(g.n))


def is_coherent(g: Graph, gamma_size: int, delta_size: int, budget: int = 1_000_000) -> PairSearch:
    """Coherence check: a verified-absent verdict means g is coherent at these sizes."""
    return find_anticomplete_pair(g, gamma_size, delta_size, budget)
