"""Seeded desk-scale instances on which the relaxed constructions usually succeed.

The asymptotic hypotheses can never hold at this scale, so these generators
plant the shape the constructions look for: a sparse random graph between
blocks, plus an apex block whose vertices reach widely into block 1 and only
sparsely elsewhere, so the first levelling has a genuine middle layer.
"""

from __future__ import annotations

from ..blockade import Blockade
from ..graph import Graph, rng_for


def synthetic_blockade(seed: int, blocks: int = 16, width: int = 16, degree: float = 2.0,
                       fanout: int = 6, stray: float = 0.5) -> Blockade:
    """``blocks`` blocks of ``width`` vertices.

    Between blocks 1.. each pair of vertices is an edge with probability
    ``degree/width``.  Each apex-block vertex gets ``fanout`` neighbours in
    block 1 and, in every other block, one neighbour with probability ``stray``.
    """
    rng = rng_for(seed, 1)
    n = blocks * width
    edges = set()
    p = degree / width
    for u in range(width, n):
        for v in range(u + 1, n):
            if u // width != v // width and rng.random() < p:
                edges.add((u, v))
    for u in range(width):
        for v in rng.choice(range(width, 2 * width), size=min(fanout, width), replace=False):
            edges.add((u, int(v)))
        for b in range(2, blocks):
            if rng.random() < stray:
                edges.add((u, b * width + int(rng.integers(width))))
    g = Graph(n, sorted(edges))
    return Blockade.from_sets(g, [range(i * width, (i + 1) * width) for i in range(blocks)])


def synthetic_bilevelling(seed: int, l_height: int = 2, m_height: int = 2, length: int = 4, width: int = 12,
                          c_density: float = 0.3, m_density: float = 0.15):
    """A planted bi-levelling and the blockade it is rainbow in.

    Every layer and every C block gets its own ambient block (the apex block
    is padded with isolated vertices).  L's base grades C forwards by giving
    each base vertex a threshold block and only edges into blocks at or past
    it; M's base reaches C at random, and C blocks see each other at random
    with probability ``c_density``.
    """
    from .structures import BiLevelling, Levelling

    rng = rng_for(seed, 2)
    sets, nxt = [], 0
    for _ in range(1 + l_height + m_height + length):
        sets.append(list(range(nxt, nxt + width)))
        nxt += width
    apex = sets[0][0]
    l_layers = [[apex]] + sets[1:1 + l_height]
    m_layers = [[apex]] + sets[1 + l_height:1 + l_height + m_height]
    c_blocks = sets[1 + l_height + m_height:]
    edges = set()

    def add(u, v):
        edges.add((min(u, v), max(u, v)))

    for layers in (l_layers, m_layers):
        for v in layers[1]:
            add(apex, v)
        for up, down in zip(layers[1:], layers[2:]):
            for v in down:
                for u in rng.choice(up, size=int(rng.integers(1, 3)), replace=False):
                    add(int(u), v)
    base = l_layers[-1]
    threshold = {y: i % length for i, y in enumerate(base)}
    for j, blk in enumerate(c_blocks):
        own = [y for y in base if threshold[y] == j]
        allowed = [y for y in base if threshold[y] <= j]
        for x in blk:
            add(int(rng.choice(own)), x)
            for y in allowed:
                if rng.random() < 0.1:
                    add(y, x)
            add(int(rng.choice(m_layers[-1])), x)
            for y in m_layers[-1]:
                if rng.random() < m_density:
                    add(y, x)
    for a_i, blk_a in enumerate(c_blocks):
        for blk_b in c_blocks[a_i + 1:]:
            for x in blk_a:
                for y in blk_b:
                    if rng.random() < c_density:
                        add(x, y)
    g = Graph(nxt, sorted(edges))
    amb = Blockade.from_sets(g, sets)
    c = Blockade.from_sets(g, c_blocks, parents=range(1 + l_height + m_height, len(sets)))
    bl = BiLevelling(Levelling.of([sum(1 << v for v in s) for s in l_layers]),
                     Levelling.of([sum(1 << v for v in s) for s in m_layers]), c, False, amb,
                     {"stage": "planted", "seed": seed})
    return amb, bl
