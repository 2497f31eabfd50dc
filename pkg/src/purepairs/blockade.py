"""Blockades: indexed families of disjoint vertex blocks in a host graph."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from .graph import ABSENT, FOUND, INCONCLUSIVE, Embedding, Graph, anticomplete_search, bits, popcount, to_mask


@dataclass(frozen=True)
class Blockade:
    host: Graph
    blocks: tuple[tuple[int, tuple[int, ...]], ...]
    parents: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        seen = 0
        prev = None
        for idx, vs in self.blocks:
            if prev is not None and idx <= prev:
                raise ValueError("block indices must be strictly increasing")
            prev = idx
            if not vs:
                raise ValueError(f"block {idx} is empty")
            m = to_mask(vs)
            if m & seen:
                raise ValueError(f"block {idx} overlaps an earlier block")
            if any(not 0 <= v < self.host.n for v in vs):
                raise ValueError(f"block {idx} has a vertex outside the host")
            seen |= m

    @classmethod
    def from_sets(cls, host: Graph, sets, indices=None, parents=None) -> "Blockade":
        indices = range(len(sets)) if indices is None else indices
        return cls(host, tuple((i, tuple(sorted(s))) for i, s in zip(indices, sets)),
                   None if parents is None else tuple(parents))

    @property
    def indices(self) -> list[int]:
        return [i for i, _ in self.blocks]

    def block(self, i: int) -> tuple[int, ...]:
        for idx, vs in self.blocks:
            if idx == i:
                return vs
        raise KeyError(i)

    def mask(self, i: int) -> int:
        return to_mask(self.block(i))

    def masks(self) -> dict[int, int]:
        return {i: to_mask(vs) for i, vs in self.blocks}

    def block_of(self) -> dict[int, int]:
        return {v: i for i, vs in self.blocks for v in vs}

    @property
    def length(self) -> int:
        return len(self.blocks)

    @property
    def width(self) -> int:
        return min(len(vs) for _, vs in self.blocks)

    def union(self) -> int:
        return to_mask(v for _, vs in self.blocks for v in vs)

    def restrict(self, sets: dict[int, int]) -> "Blockade":
        """Sub-blockade keeping the given masks inside each surviving block."""
        keep = [(i, tuple(bits(sets[i]))) for i in self.indices if sets.get(i)]
        return Blockade(self.host, tuple(keep), tuple(i for i, _ in keep))

    def reindex(self, order: list[int]) -> "Blockade":
        """Blocks taken in ``order`` (a sequence of current indices) and renumbered 0.."""
        return Blockade(self.host, tuple((k, self.block(i)) for k, i in enumerate(order)), tuple(order))

    def to_json(self) -> str:
        return json.dumps({"host": self.host.digest(),
                           "blocks": [{"index": i, "vertices": list(vs)} for i, vs in self.blocks]},
                          sort_keys=True)

    @classmethod
    def from_json(cls, host: Graph, text: str) -> "Blockade":
        d = json.loads(text)
        if d["host"] != host.digest():
            raise ValueError("blockade was recorded for a different host graph")
        return cls(host, tuple((b["index"], tuple(b["vertices"])) for b in d["blocks"]))


# -- metrics --------------------------------------------------------------

@dataclass(frozen=True)
class Shrinkage:
    """Shrinkage kept as the exact pair (width, n); ``sigma`` is for display."""

    width: int
    n: int

    @property
    def sigma(self) -> float:
        return 1 - math.log(self.width) / math.log(self.n)

    def at_most(self, sigma0) -> bool:
        """``sigma <= sigma0`` decided as ``width >= n^(1 - sigma0)`` in integers."""
        e = 1 - Fraction(sigma0)
        p, q = e.numerator, e.denominator
        # width^q >= n^p, with negative p moved across
        if p >= 0:
            return self.width ** q >= self.n ** p
        return self.width ** q * self.n ** (-p) >= 1


@dataclass(frozen=True)
class BlockadeMetrics:
    length: int
    width: int
    shrinkage: Shrinkage
    linkage: Fraction


def max_degree_between(g: Graph, a: int, b: int) -> int:
    return max((popcount(g.adj_mask(v) & b) for v in bits(a)), default=0)


def linkage(b: Blockade) -> Fraction:
    masks = b.masks()
    best = Fraction(0)
    for i, mi in masks.items():
        for j, mj in masks.items():
            if i != j:
                best = max(best, Fraction(max_degree_between(b.host, mi, mj), popcount(mj)))
    return best


def metrics(b: Blockade) -> BlockadeMetrics:
    if b.host.n <= 1:
        raise ValueError("shrinkage is undefined for hosts with fewer than 2 vertices")
    return BlockadeMetrics(b.length, b.width, Shrinkage(b.width, b.host.n), linkage(b))


# -- divergence -----------------------------------------------------------

@dataclass(frozen=True)
class Divergence:
    verdict: str
    i: int | None = None
    j: int | None = None
    x: tuple[int, ...] | None = None
    y: tuple[int, ...] | None = None
    nodes: int = 0

    @property
    def divergent(self) -> bool:
        return self.verdict == FOUND


def is_divergent(b: Blockade, gamma, delta, budget: int = 1_000_000) -> Divergence:
    """Search for X in A_i, Y in A_j (i != j) anticomplete, |X| >= gamma|A_i|, |Y| >= delta|A_j|."""
    gamma, delta = Fraction(gamma), Fraction(delta)
    if not (0 < gamma <= 1 and 0 < delta <= 1):
        raise ValueError("gamma and delta must lie in (0, 1]")
    if budget <= 0:
        raise ValueError("budget must be positive")
    masks = b.masks()
    used, complete = 0, True
    for i, mi in masks.items():
        for j, mj in masks.items():
            if i == j:
                continue
            xs, ys = ceil(gamma * popcount(mi)), ceil(delta * popcount(mj))
            hit, nodes, done = anticomplete_search(b.host, xs, ys, budget - used, mi, mj)
            used += nodes
            if hit:
                return Divergence(FOUND, i, j, tuple(bits(hit[0])), tuple(bits(hit[1])), used)
            if not done:
                complete = False
                if used >= budget:
                    return Divergence(INCONCLUSIVE, nodes=used)
    return Divergence(ABSENT if complete else INCONCLUSIVE, nodes=used)


def equipartition(g: Graph, k: int) -> Blockade:
    """``k`` consecutive blocks of sizes ceil(n/k) then floor(n/k), indices ``0..k-1``."""
    if not 1 <= k <= g.n:
        raise ValueError("need 1 <= k <= n")
    q, r = divmod(g.n, k)
    sets, start = [], 0
    for i in range(k):
        size = q + (1 if i < r else 0)
        sets.append(range(start, start + size))
        start += size
    return Blockade.from_sets(g, sets)


# -- rainbow copies -------------------------------------------------------

@dataclass(frozen=True)
class RainbowEmbedding:
    emb: Embedding
    block_of: tuple[int, ...]  # pattern vertex -> block index

    @property
    def first(self) -> int:
        return min(range(len(self.block_of)), key=lambda v: self.block_of[v])

    @property
    def last(self) -> int:
        return max(range(len(self.block_of)), key=lambda v: self.block_of[v])

    def is_valid(self, b: Blockade, h: Graph, first: int | None = None, last: int | None = None) -> bool:
        where = b.block_of()
        if not self.emb.is_induced(b.host, h):
            return False
        if any(where.get(x) != bi for x, bi in zip(self.emb.map, self.block_of)):
            return False
        if len(set(self.block_of)) != len(self.block_of):
            return False
        if first is not None and self.block_of[first] != min(self.block_of):
            return False
        if last is not None and self.block_of[last] != max(self.block_of):
            return False
        return True


def find_rainbow_copy(b: Blockade, h: Graph, first: int | None = None,
                      last: int | None = None) -> RainbowEmbedding | None:
    """Exact backtracking search for a rainbow induced copy of ``h``.

    ``first``/``last`` name pattern vertices that must sit in the smallest /
    largest used block index.
    """
    if h.n == 0:
        return RainbowEmbedding(Embedding(()), ())
    if h.n > b.length:
        return None
    if first is not None and last is not None and first == last and h.n > 1:
        return None
    where = b.block_of()
    g = b.host
    union = b.union()
    order = [v for v in (first, last) if v is not None]
    rest = sorted((v for v in range(h.n) if v not in order),
                  key=lambda v: (-popcount(h.adj_mask(v)), v))
    # greedy connectivity-first order for the remaining pattern vertices
    while rest:
        placed = to_mask(order)
        v = max(rest, key=lambda x: (popcount(h.adj_mask(x) & placed), -rest.index(x)))
        order.append(v)
        rest.remove(v)
    image = [-1] * h.n

    def ok_block(x: int, blk: int) -> bool:
        if first is not None and image[first] >= 0 and x != first and blk <= where[image[first]]:
            return False
        if last is not None and image[last] >= 0 and x != last and blk >= where[image[last]]:
            return False
        return True

    def extend(depth: int, used_blocks: frozenset) -> bool:
        if depth == h.n:
            return True
        x = order[depth]
        cand = union
        for y in order[:depth]:
            gy = g.adj_mask(image[y])
            cand &= gy if h.has_edge(x, y) else ~gy
            cand &= ~(1 << image[y])
        for v in bits(cand):
            blk = where[v]
            if blk in used_blocks or not ok_block(x, blk):
                continue
            if x == last and first is not None and image[first] >= 0 and blk <= where[image[first]]:
                continue
            image[x] = v
            if extend(depth + 1, used_blocks | {blk}):
                return True
            image[x] = -1
        return False

    if extend(0, frozenset()):
        return RainbowEmbedding(Embedding(tuple(image)), tuple(where[v] for v in image))
    return None
