"""Expanding contractions, the expansion checker, and short rainbow paths."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from ..blockade import Blockade, is_divergent
from ..graph import INCONCLUSIVE, bits, popcount, to_mask
from .structures import (
    CertificationError, DivergenceInconclusive, HypothesisViolation, StageFailure, frac, reach,
)

EXHAUSTIVE_LIMIT = 12

PASS, FAIL, SAMPLED_PASS = "pass", "fail", "sampled-pass"


@dataclass(frozen=True)
class ExpansionCheck:
    verdict: str
    witness: tuple[int, int, tuple[int, ...]] | None = None
    checked: int = 0
    sampled: bool = False

    @property
    def ok(self) -> bool:
        return self.verdict != FAIL


def _nbr_table(g, members: list[int]) -> list[int]:
    """Neighbourhood union for every subset of ``members`` (indexed by local bitmask)."""
    size = 1 << len(members)
    table = [0] * size
    for s in range(1, size):
        low = s & -s
        table[s] = table[s ^ low] | g.adj_mask(members[low.bit_length() - 1])
    return table


def _local_to_global(members: list[int], s: int) -> tuple[int, ...]:
    return tuple(members[k] for k in range(len(members)) if s >> k & 1)


def _subset_order(width: int):
    """Local subset masks ordered by size, then lexicographically by members."""
    out = []
    for s in range(1, 1 << width):
        out.append((popcount(s), [k for k in range(width) if s >> k & 1], s))
    out.sort()
    return [s for _, _, s in out]


_ORDER_CACHE: dict[int, list[int]] = {}


def _ordered_subsets(width: int) -> list[int]:
    if width not in _ORDER_CACHE:
        _ORDER_CACHE[width] = _subset_order(width)
    return _ORDER_CACHE[width]


def _expands(hit: int, size_j: int, x: int, size_i: int, tau: Fraction) -> bool:
    # hit/|B_j| >= min(tau |X|/|B_i|, 1/4), in integers
    if 4 * hit >= size_j:
        return True
    return hit * size_i * tau.denominator >= tau.numerator * x * size_j


def check_expanding(b: Blockade, tau, exhaustive_limit: int = EXHAUSTIVE_LIMIT,
                    samples: int = 4000, seed: int = 0) -> ExpansionCheck:
    """Test whether ``b`` is tau-expanding.

    Blocks no larger than ``exhaustive_limit`` are checked over every subset;
    larger ones get all singletons plus ``samples`` random subsets per ordered
    pair, and a clean run is reported as ``sampled-pass``.
    """
    tau = frac(tau)
    g = b.host
    masks = b.masks()
    rng = random.Random(seed)
    checked, sampled = 0, False
    for i, mi in masks.items():
        members = list(bits(mi))
        wi = len(members)
        if wi <= exhaustive_limit:
            table = _nbr_table(g, members)
            for j, mj in masks.items():
                if i == j:
                    continue
                wj = popcount(mj)
                for s in _ordered_subsets(wi):
                    checked += 1
                    if not _expands(popcount(table[s] & mj), wj, popcount(s), wi, tau):
                        return ExpansionCheck(FAIL, (i, j, _local_to_global(members, s)), checked, sampled)
        else:
            sampled = True
            cands = [(v,) for v in members]
            for _ in range(samples):
                size = rng.randint(1, wi)
                cands.append(tuple(sorted(rng.sample(members, size))))
            for j, mj in masks.items():
                if i == j:
                    continue
                wj = popcount(mj)
                for x in cands:
                    checked += 1
                    hit = popcount(reach(g, to_mask(x)) & mj)
                    if not _expands(hit, wj, len(x), wi, tau):
                        return ExpansionCheck(FAIL, (i, j, x), checked, sampled)
    return ExpansionCheck(SAMPLED_PASS if sampled else PASS, None, checked, sampled)


def _require_not_divergent(a: Blockade, gamma, delta, budget: int) -> None:
    verdict = is_divergent(a, gamma, delta, budget)
    if verdict.divergent:
        raise HypothesisViolation(
            f"blockade is ({gamma}, {delta})-divergent", f"blocks {verdict.i},{verdict.j}",
            witness=(verdict.i, verdict.j, verdict.x, verdict.y))
    if verdict.verdict == INCONCLUSIVE:
        raise DivergenceInconclusive(f"divergence search exhausted its budget after {verdict.nodes} nodes")


def expanding_contraction(a: Blockade, delta, strict: bool = True, budget: int = 2_000_000,
                          search_limit: int = 14) -> tuple[Blockade, Fraction]:
    """Shrink each block so the result is (1/(4 delta))-expanding.

    Grows the removal sets ``Z[i][j]`` by repeatedly adding a violating ``X``
    (smallest first) while the additions stay good; stops at a fixpoint.  In
    relaxed mode a pair whose next violating X cannot be added is left alone.
    """
    delta = frac(delta)
    k = a.length
    if k < 2:
        raise HypothesisViolation("length >= 2", f"length is {k}")
    if delta <= 0 or delta * k > Fraction(1, 4):
        raise HypothesisViolation("delta*K <= 1/4", f"delta*K = {delta * k}")
    if strict:
        _require_not_divergent(a, delta, Fraction(1, 8), budget)
    g = a.host
    full = a.masks()
    size = {i: popcount(m) for i, m in full.items()}
    idx = a.indices
    z = {(i, j): 0 for i in idx for j in idx if i != j}
    stuck: set[tuple[int, int]] = set()

    def removed(i: int) -> int:
        out = 0
        for j in idx:
            if j != i:
                out |= z[i, j]
        return out

    def good(i: int, j: int, zij: int) -> bool:
        if popcount(zij) >= delta * size[i]:
            return False
        y = popcount(reach(g, zij) & full[j] & ~removed(j))
        # |Y|/|A_j| <= |Z|/(3 delta |A_i|)
        return 3 * delta * size[i] * y <= popcount(zij) * size[j]

    def violator(i: int, j: int) -> int | None:
        free_i = full[i] & ~removed(i)
        target = full[j] & ~removed(j)
        members = list(bits(free_i))
        if not members:
            return None

        def bad(x_mask: int, x_size: int) -> bool:
            y = popcount(reach(g, x_mask) & target)
            # |Y|/|A_j| < min(|X|/(3 delta |A_i|), 1/4)
            return 4 * y < size[j] and 3 * delta * size[i] * y < x_size * size[j]

        if len(members) <= search_limit:
            table = _nbr_table(g, members)
            for s in _ordered_subsets(len(members)):
                y = popcount(table[s] & target)
                if 4 * y < size[j] and 3 * delta * size[i] * y < popcount(s) * size[j]:
                    return to_mask(_local_to_global(members, s))
            return None
        # large blocks: singletons, then greedy growth by fewest new neighbours
        for v in members:
            if bad(1 << v, 1):
                return 1 << v
        x = 0
        for _ in members:
            best = min((v for v in members if not x >> v & 1),
                       key=lambda v: (popcount(reach(g, x | 1 << v) & target), v), default=None)
            if best is None:
                break
            x |= 1 << best
            if bad(x, popcount(x)):
                return x
        return None

    changed = True
    while changed:
        changed = False
        for i in idx:
            for j in idx:
                if i == j or (i, j) in stuck:
                    continue
                x = violator(i, j)
                if x is None:
                    continue
                grown = z[i, j] | x
                if good(i, j, grown):
                    z[i, j] = grown
                    changed = True
                elif strict:
                    raise CertificationError(
                        f"violating set for ({i},{j}) cannot be added although the blockade is not divergent")
                else:
                    stuck.add((i, j))
    sets = {}
    for i in idx:
        left = full[i] & ~removed(i)
        if not left:
            raise StageFailure("contraction", f"block {i} emptied")
        sets[i] = left
    contraction = a.restrict(sets)
    if strict:
        for i in idx:
            if Fraction(popcount(sets[i]), size[i]) < 1 - delta * k:
                raise CertificationError(f"block {i} lost more than delta*K of its vertices")
        tau = 1 / (4 * delta)
        if all(s <= EXHAUSTIVE_LIMIT for s in map(popcount, sets.values())):
            verdict = check_expanding(contraction, tau)
            if not verdict.ok:
                raise CertificationError(f"contraction is not expanding: {verdict.witness}")
    return contraction, 1 / (4 * delta)


def rainbow_path(a: Blockade, contraction: Blockade, i1: int, v: int, i2: int, y,
                 gamma=None, delta=None, strict: bool = False, budget: int = 2_000_000) -> list[int]:
    """Induced rainbow path from ``v`` (in block ``i1``) to a vertex of ``y`` (in block ``i2``).

    Grows reachable sets block by block: ``i1`` first, the other blocks in index
    order, ``i2`` last; then takes a shortest path inside the traced vertices.
    """
    g = a.host
    if i1 == i2:
        raise HypothesisViolation("distinct end blocks", f"i1 = i2 = {i1}")
    b = contraction.masks()
    if i1 not in b or i2 not in b:
        raise HypothesisViolation("end blocks exist", f"{i1}, {i2}")
    if not b[i1] >> v & 1:
        raise HypothesisViolation("v lies in the contracted start block", f"v={v}")
    ymask = to_mask(y)
    if not ymask or ymask & ~b[i2]:
        raise HypothesisViolation("Y is a nonempty subset of the contracted end block")
    if strict:
        gamma, delta = frac(gamma), frac(delta)
        rho = contraction.length
        n = g.n
        if gamma > Fraction(1, 8):
            raise HypothesisViolation("gamma <= 1/8", f"gamma = {gamma}")
        if popcount(ymask) < gamma * len(a.block(i2)):
            raise HypothesisViolation("|Y| >= gamma |A_i2|")
        if (4 * delta) ** rho * n > 3:
            raise HypothesisViolation("(4 delta)^rho |G| <= 3", f"value {(4 * delta) ** rho * n}")
        if delta * rho > Fraction(1, 4):
            raise HypothesisViolation("delta*rho <= 1/4")
        _require_not_divergent(a, gamma, delta, budget)
    order = [i1] + [i for i in contraction.indices if i not in (i1, i2)] + [i2]
    parent = {v: None}
    seen = 1 << v
    for step, blk in enumerate(order[1:], start=1):
        layer = reach(g, seen) & b[blk]
        if blk == i2:
            layer &= ymask
        if not layer:
            if blk == i2 or step == 1:
                raise StageFailure("rainbow-path", f"layer {step} (block {blk}) is unreachable")
            continue
        for u in bits(layer):
            parent[u] = min(w for w in bits(g.adj_mask(u) & seen))
        seen |= layer
    end = min(bits(seen & b[i2] & ymask))
    chain = 0
    x = end
    while x is not None:
        chain |= 1 << x
        x = parent[x]
    # shortest path inside the traced chain: rainbow because the chain is, induced because shortest
    frontier, prev = [v], {v: None}
    while frontier and end not in prev:
        nxt = []
        for x in frontier:
            for u in bits(g.adj_mask(x) & chain):
                if u not in prev:
                    prev[u] = x
                    nxt.append(u)
        frontier = sorted(nxt)
    path = [end]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    path.reverse()
    where = contraction.block_of()
    if len({where[x] for x in path}) != len(path):
        raise CertificationError("rainbow path repeats a block")
    return path

