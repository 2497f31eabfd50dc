"""Branches, subleaf/handle construction certificates and their replay.

A weak certificate builds a graph from nothing by adding subleaves (a vertex
with at most one neighbour) and handles (an induced path whose internal
vertices are new and have degree two).  A strong certificate starts from two
isolated vertices and only adds handles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from .congestion import congestion
from .graph import Embedding, Graph, bits, popcount, to_mask

WEAK_SEARCH_LIMIT = 16


@dataclass(frozen=True)
class Branch:
    kind: str  # "path" or "cycle"
    vertices: tuple[int, ...]  # path: p1..p2; cycle: each vertex once, hub (if any) first

    @property
    def length(self) -> int:
        return len(self.vertices) - 1 if self.kind == "path" else len(self.vertices)

    def edges(self) -> list[frozenset]:
        vs = self.vertices
        es = [frozenset(e) for e in zip(vs, vs[1:])]
        if self.kind == "cycle":
            es.append(frozenset((vs[-1], vs[0])))
        return es


def branches(g: Graph) -> list[Branch]:
    """Partition of E(g) into branches, sorted by vertex sequence."""
    deg = [g.degree(v) for v in range(g.n)]
    out: list[Branch] = []
    seen_edges: set[frozenset] = set()

    def walk(start: int, first: int) -> list[int]:
        seq, prev, cur = [start], start, first
        while deg[cur] == 2 and cur != start:
            seq.append(cur)
            nxt = [u for u in g.neighbors(cur) if u != prev]
            prev, cur = cur, nxt[0]
        seq.append(cur)
        return seq

    for u in range(g.n):
        if deg[u] == 2:
            continue
        for x in g.neighbors(u):
            if frozenset((u, x)) in seen_edges:
                continue
            seq = walk(u, x)
            if seq[-1] == u:
                cyc = seq[:-1]
                if cyc[-1] < cyc[1]:
                    cyc = [cyc[0]] + cyc[:0:-1]
                br = Branch("cycle", tuple(cyc))
            else:
                if seq[-1] < seq[0]:
                    seq.reverse()
                br = Branch("path", tuple(seq))
            seen_edges.update(br.edges())
            out.append(br)
    # components that are cycles with every vertex of degree two
    for u in range(g.n):
        if deg[u] != 2:
            continue
        x = g.neighbors(u)[0]
        if frozenset((u, x)) in seen_edges:
            continue
        seq = walk(u, x)[:-1]
        # walk stops on returning to u; rotate to the smallest vertex and orient
        i = seq.index(min(seq))
        cyc = seq[i:] + seq[:i]
        if cyc[-1] < cyc[1]:
            cyc = [cyc[0]] + cyc[:0:-1]
        br = Branch("cycle", tuple(cyc))
        seen_edges.update(br.edges())
        out.append(br)
    return sorted(out, key=lambda b: (b.kind, b.vertices))


# -- certificates ---------------------------------------------------------

@dataclass(frozen=True)
class BuildStep:
    op: str  # "subleaf" or "handle"
    vertex: int | None = None
    attach: int | None = None
    ends: tuple[int, int] | None = None
    length: int | None = None
    internal: tuple[int, ...] | None = None  # labels of the new vertices, end1 side first

    def to_json(self) -> dict:
        if self.op == "subleaf":
            return {"op": "subleaf", "vertex": self.vertex, "attach": self.attach}
        return {"op": "handle", "ends": list(self.ends), "length": self.length,
                "internal": None if self.internal is None else list(self.internal)}

    @classmethod
    def from_json(cls, d: dict) -> "BuildStep":
        if d["op"] == "subleaf":
            return cls("subleaf", vertex=d["vertex"], attach=d.get("attach"))
        internal = d.get("internal")
        return cls("handle", ends=tuple(d["ends"]), length=d["length"],
                   internal=None if internal is None else tuple(internal))


@dataclass(frozen=True)
class BuildCertificate:
    beta: int
    mode: str  # "weak" or "strong"
    steps: tuple[BuildStep, ...] = field(default_factory=tuple)

    def to_json(self) -> str:
        return json.dumps({"beta": self.beta, "mode": self.mode,
                           "steps": [s.to_json() for s in self.steps]}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "BuildCertificate":
        d = json.loads(text)
        return cls(d["beta"], d["mode"], tuple(BuildStep.from_json(s) for s in d["steps"]))


class ReplayError(ValueError):
    pass


def replay(cert: BuildCertificate) -> Graph:
    """Rebuild the certified graph, checking every step as it is applied.

    Labels may be given explicitly; missing handle labels are allocated as the
    next unused integers.  The final label set must be ``0..n-1``.
    """
    if cert.beta < 2:
        raise ReplayError("beta must be at least 2")
    adj: dict[int, set[int]] = {}
    if cert.mode == "strong":
        adj = {0: set(), 1: set()}
    elif cert.mode != "weak":
        raise ReplayError(f"unknown mode {cert.mode!r}")
    for i, st in enumerate(cert.steps):
        if st.op == "subleaf":
            if cert.mode == "strong":
                raise ReplayError(f"step {i}: subleaf in a strong certificate")
            v = st.vertex
            if v is None or v in adj:
                raise ReplayError(f"step {i}: subleaf vertex {v} missing or already present")
            adj[v] = set()
            if st.attach is not None:
                if st.attach not in adj or st.attach == v:
                    raise ReplayError(f"step {i}: attach vertex {st.attach} not present")
                adj[v].add(st.attach)
                adj[st.attach].add(v)
        elif st.op == "handle":
            x, y = st.ends
            if x not in adj or y not in adj or x == y:
                raise ReplayError(f"step {i}: handle ends {st.ends} invalid")
            if st.length < cert.beta:
                raise ReplayError(f"step {i}: handle length {st.length} below beta={cert.beta}")
            if st.length < 2:
                raise ReplayError(f"step {i}: handle length must be at least 2")
            if y in adj[x]:
                raise ReplayError(f"step {i}: handle ends adjacent, path not induced")
            if st.internal is None:
                nxt = max(adj, default=-1) + 1
                internal = tuple(range(nxt, nxt + st.length - 1))
            else:
                internal = st.internal
            if len(internal) != st.length - 1 or len(set(internal)) != len(internal):
                raise ReplayError(f"step {i}: handle needs {st.length - 1} distinct new vertices")
            if any(v in adj for v in internal):
                raise ReplayError(f"step {i}: handle vertex already present")
            path = [x, *internal, y]
            for v in internal:
                adj[v] = set()
            for a, b in zip(path, path[1:]):
                adj[a].add(b)
                adj[b].add(a)
        else:
            raise ReplayError(f"step {i}: unknown op {st.op!r}")
    n = len(adj)
    if set(adj) != set(range(n)):
        raise ReplayError("final vertex labels are not 0..n-1")
    return Graph(n, [(u, v) for u in adj for v in adj[u] if u < v])


# -- peeling helpers ------------------------------------------------------

def _deg_in(g: Graph, v: int, s: int) -> int:
    return popcount(g.adj_mask(v) & s)


def _handles_in(g: Graph, s: int, min_len: int) -> list[tuple[int, tuple[int, ...], int]]:
    """Removable handles of the induced subgraph on ``s``.

    Each is ``(end1, internal, end2)`` with ``end1 < end2``, the internal
    vertices of degree two inside ``s``, and nonadjacent ends.
    """
    found = {}
    for p in bits(s):
        for x in bits(g.adj_mask(p) & s):
            seq, prev, cur = [], p, x
            while _deg_in(g, cur, s) == 2 and cur != p and cur not in seq:
                seq.append(cur)
                nxt = [u for u in bits(g.adj_mask(cur) & s) if u != prev]
                prev, cur = cur, nxt[0]
                if cur == p or cur in seq:
                    break
                if len(seq) + 1 >= min_len and not g.has_edge(p, cur):
                    internal = tuple(seq)
                    a, b = p, cur
                    if b < a:
                        a, b, internal = b, a, internal[::-1]
                    found.setdefault((a, internal, b), None)
    return sorted(found, key=lambda h: (-len(h[1]), h[1], h[0], h[2]))


def _steps_from_peel(peel: list[tuple]) -> tuple[BuildStep, ...]:
    steps = []
    for item in reversed(peel):
        if item[0] == "subleaf":
            steps.append(BuildStep("subleaf", vertex=item[1], attach=item[2]))
        else:
            _, a, internal, b = item
            steps.append(BuildStep("handle", ends=(a, b), length=len(internal) + 1, internal=internal))
    return tuple(steps)


class SearchLimitExceeded(ValueError):
    pass


def weak_certificate(h: Graph, beta: int, limit: int = WEAK_SEARCH_LIMIT) -> BuildCertificate | None:
    """Weak certificate for ``h`` at ``beta``, or ``None`` when none exists.

    Exhaustive search over peel sequences, memoised on the remaining vertex
    set; lowest-index subleaves are tried first, then handles longest first.
    """
    if beta < 2:
        raise ValueError("beta must be at least 2")
    if h.n > limit:
        raise SearchLimitExceeded(f"peel search limited to n <= {limit}, got {h.n}")
    dead: set[int] = set()

    def peel(s: int) -> list | None:
        if s == 0:
            return []
        if s in dead:
            return None
        for v in bits(s):
            nb = h.adj_mask(v) & s
            if popcount(nb) <= 1:
                rest = peel(s & ~(1 << v))
                if rest is not None:
                    attach = nb.bit_length() - 1 if nb else None
                    return [("subleaf", v, attach)] + rest
        for a, internal, b in _handles_in(h, s, beta):
            rest = peel(s & ~sum(1 << x for x in internal))
            if rest is not None:
                return [("handle", a, internal, b)] + rest
        dead.add(s)
        return None

    order = peel(h.all_mask)
    if order is None:
        return None
    return BuildCertificate(beta, "weak", _steps_from_peel(order))


class CongestionTooLarge(ValueError):
    def __init__(self, value, witness):
        super().__init__(f"congestion {value} exceeds xi; witness vertices {witness}")
        self.value = value
        self.witness = witness


class PeelStuck(ValueError):
    """The greedy peel found no handle of length beta and the exhaustive search found no certificate."""


def beta_for(xi: Fraction) -> int:
    return floor(1 / (3 * Fraction(xi))) + 1


def _longest_branch_handle(g: Graph, s: int, beta: int):
    """Longest removable handle lying inside one branch of ``g[s]``.

    A branch whose path is not induced (a cycle, or a path with adjacent ends)
    contributes its longest induced sub-path that still starts at the branch's
    first vertex.
    """
    verts = list(bits(s))
    sub = g.induced(verts)
    best = None
    for br in branches(sub):
        vs = [verts[i] for i in br.vertices]
        if br.kind == "path":
            cand = vs if not g.has_edge(vs[0], vs[-1]) or len(vs) == 2 else vs[:-1]
        else:
            cand = vs[:-1]
        if len(cand) < 3 or g.has_edge(cand[0], cand[-1]):
            continue
        a, internal, b = cand[0], tuple(cand[1:-1]), cand[-1]
        if b < a:
            a, b, internal = b, a, internal[::-1]
        key = (-len(internal), internal)
        if best is None or key < best[0]:
            best = (key, (a, internal, b))
    if best is None or len(best[1][1]) + 1 < beta:
        return None
    return best[1]


def longbranch_witness(h: Graph, xi, allow_search: bool = True) -> BuildCertificate:
    """Weak certificate at ``beta = floor(1/(3 xi)) + 1`` by greedy peeling.

    Peel the lowest-index vertex of degree at most one; otherwise peel the
    longest branch as a handle.  If the greedy peel stalls (only possible at
    the ``xi = 1/3`` boundary, where a triangle branch has no induced handle of
    length two) the exhaustive peel search is consulted before giving up.
    """
    xi = Fraction(xi)
    if h.n == 0:
        raise ValueError("graph must be non-null")
    if xi > Fraction(1, 3) or xi <= 0:
        raise ValueError("xi must lie in (0, 1/3]")
    res = congestion(h, "exhaustive" if h.n <= 16 else "parametric-cut")
    if res.value > xi:
        raise CongestionTooLarge(res.value, res.witness)
    beta = beta_for(xi)
    s, peel = h.all_mask, []
    while s:
        low = [v for v in bits(s) if _deg_in(h, v, s) <= 1]
        if low:
            v = low[0]
            nb = h.adj_mask(v) & s & ~(1 << v)
            peel.append(("subleaf", v, nb.bit_length() - 1 if nb else None))
            s &= ~(1 << v)
            continue
        hd = _longest_branch_handle(h, s, beta)
        if hd is None:
            if allow_search:
                cert = weak_certificate(h, beta)
                if cert is not None:
                    return cert
            raise PeelStuck(f"no handle of length >= {beta} in remaining set {list(bits(s))}")
        peel.append(("handle", *hd))
        s &= ~sum(1 << x for x in hd[1])
    return BuildCertificate(beta, "weak", _steps_from_peel(peel))


# -- embedding a weakly buildable graph in a strongly buildable one --------

def embed_in_buildable(h: Graph, beta: int, cert: BuildCertificate | None = None):
    """Strongly buildable host containing ``h`` induced.

    Handles of the weak certificate are copied.  Each subleaf ``v`` becomes an
    internal vertex of a fresh handle of length ``max(4, beta)``: next to its
    attachment when it has one, otherwise two steps in from an end.  A
    certificate that opens with two unattached subleaves maps them onto the
    two starting vertices.
    """
    if cert is None:
        cert = weak_certificate(h, beta)
        if cert is None:
            raise ValueError(f"graph is not weakly {beta}-buildable")
    if cert.mode != "weak":
        raise ValueError("expected a weak certificate")
    image: dict[int, int] = {}
    adj: dict[int, set[int]] = {0: set(), 1: set()}
    steps: list[BuildStep] = []
    sub_len = max(4, beta)
    todo = list(cert.steps)
    if (len(todo) >= 2 and todo[0].op == todo[1].op == "subleaf"
            and todo[0].attach is None and todo[1].attach is None):
        image[todo[0].vertex], image[todo[1].vertex] = 0, 1
        todo = todo[2:]

    def add_handle(x: int, y: int, length: int) -> list[int]:
        nxt = len(adj)
        internal = list(range(nxt, nxt + length - 1))
        path = [x, *internal, y]
        for v in internal:
            adj[v] = set()
        for a, b in zip(path, path[1:]):
            adj[a].add(b)
            adj[b].add(a)
        steps.append(BuildStep("handle", ends=(x, y), length=length, internal=tuple(internal)))
        return internal

    def far_end(x: int) -> int:
        for y in sorted(adj):
            if y != x and y not in adj[x]:
                return y
        raise ValueError(f"host vertex {x} is adjacent to every other vertex")

    for st in todo:
        if st.op == "handle":
            a, b = st.ends
            internal = add_handle(image[a], image[b], st.length)
            for hv, jv in zip(st.internal, internal):
                image[hv] = jv
        elif st.attach is not None:
            x = image[st.attach]
            internal = add_handle(x, far_end(x), sub_len)
            image[st.vertex] = internal[0]
        else:
            x = min(adj)
            internal = add_handle(x, far_end(x), sub_len)
            image[st.vertex] = internal[1]
    strong = BuildCertificate(beta, "strong", tuple(steps))
    host = replay(strong)
    emb = Embedding(tuple(image[v] for v in range(h.n)))
    return host, strong, emb


def random_strong_certificate(beta: int, max_vertices: int, rng) -> BuildCertificate:
    """Random strong certificate with at most ``max_vertices`` vertices.

    ``rng`` is a ``random.Random``.  Handle lengths are drawn from
    ``beta..beta+3`` and ends uniformly among nonadjacent pairs.
    """
    adj = {0: set(), 1: set()}
    steps = []
    while True:
        length = rng.randint(beta, beta + 3)
        if len(adj) + length - 1 > max_vertices:
            break
        pairs = [(x, y) for x in sorted(adj) for y in sorted(adj) if x < y and y not in adj[x]]
        x, y = rng.choice(pairs)
        nxt = len(adj)
        internal = list(range(nxt, nxt + length - 1))
        path = [x, *internal, y]
        for v in internal:
            adj[v] = set()
        for a, b in zip(path, path[1:]):
            adj[a].add(b)
            adj[b].add(a)
        steps.append(BuildStep("handle", ends=(x, y), length=length, internal=tuple(internal)))
        if rng.random() < 0.15:
            break
    return BuildCertificate(beta, "strong", tuple(steps))


def strong_certificate(h: Graph, beta: int, limit: int = WEAK_SEARCH_LIMIT):
    """Strong certificate for a relabelling of ``h``, or ``None``.

    Peels handles only, down to two nonadjacent vertices.  Returns
    ``(cert, relabel)`` where ``relabel[v]`` is the label of ``h``'s vertex
    ``v`` in ``replay(cert)``.
    """
    if beta < 2:
        raise ValueError("beta must be at least 2")
    if h.n > limit:
        raise SearchLimitExceeded(f"peel search limited to n <= {limit}, got {h.n}")
    dead: set[int] = set()

    def peel(s: int) -> list | None:
        if popcount(s) == 2:
            a, b = bits(s)
            return [] if not h.has_edge(a, b) else None
        if s in dead or popcount(s) < 2:
            return None
        for a, internal, b in _handles_in(h, s, beta):
            rest = peel(s & ~to_mask(internal))
            if rest is not None:
                return rest + [(a, internal, b)]
        dead.add(s)
        return None

    order = peel(h.all_mask)
    if order is None:
        return None
    kept = h.all_mask
    for _, internal, _ in order:
        kept &= ~to_mask(internal)
    relabel = {v: i for i, v in enumerate(bits(kept))}
    steps = []
    for a, internal, b in order:
        for v in internal:
            relabel[v] = len(relabel)
        steps.append(BuildStep("handle", ends=(relabel[a], relabel[b]), length=len(internal) + 1,
                               internal=tuple(relabel[v] for v in internal)))
    return BuildCertificate(beta, "strong", tuple(steps)), relabel
