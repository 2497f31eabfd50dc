"""Levellings grown from a single apex, and gradings built on top of them."""

from __future__ import annotations

from fractions import Fraction
from math import ceil

from ..blockade import Blockade, linkage
from ..graph import bits, popcount, to_mask
from .expansion import check_expanding
from .structures import (
    CertificationError, Grading, HypothesisViolation, Levelling, StageFailure, certify, frac, reach,
)


def _expanding_or_raise(b: Blockade, tau, what: str) -> None:
    verdict = check_expanding(b, tau)
    if not verdict.ok:
        raise HypothesisViolation(f"{what} is {tau}-expanding", witness=verdict.witness)


def _common_hypotheses(b: Blockade, h_set, h0, v, rho, tau, strict: bool):
    h_set = sorted(set(h_set))
    if h0 not in h_set:
        raise HypothesisViolation("h0 in H")
    if len(h_set) != rho:
        raise HypothesisViolation("|H| = rho", f"|H| = {len(h_set)}, rho = {rho}")
    if any(h not in b.indices for h in h_set):
        raise HypothesisViolation("H indexes blocks of the blockade")
    masks = b.masks()
    if not masks[h0] >> v & 1:
        raise HypothesisViolation("v in B_h0", f"v={v}")
    others = 0
    for h in h_set:
        if h != h0:
            others |= masks[h]
    if not b.host.adj_mask(v) & others:
        raise HypothesisViolation("v has a neighbour in the other H blocks", f"v={v}")
    if strict:
        tau = frac(tau)
        if tau < 6:
            raise HypothesisViolation("tau >= 6", f"tau = {tau}")
        if (tau / 2) ** (rho - 1) < b.host.n:
            raise HypothesisViolation("(tau/2)^(rho-1) >= |G|", f"{(tau / 2) ** (rho - 1)} < {b.host.n}")
    return h_set, masks


def build_levelling(b: Blockade, h_set, h0: int, v: int, rho: int, tau=6, strict: bool = True):
    """Greedy max-ratio layers from ``v`` through the H blocks, then one spread layer.

    Returns ``(j_set, levelling, info)``; the base of the levelling meets every
    block of ``j_set`` in at least a 1/(4 rho) fraction.
    """
    g = b.host
    h_set, masks = _common_hypotheses(b, h_set, h0, v, rho, tau, strict)
    if strict:
        _expanding_or_raise(b.restrict({i: m for i, m in masks.items() if i != h0}), tau,
                            "(B_i : i != h0)")
    size = {i: popcount(m) for i, m in masks.items()}
    x = Fraction(2) / frac(tau)
    layers = [1 << v]
    hs = [h0]
    ratios: list[Fraction] = []

    def best_block(source: int):
        pool = [h for h in h_set if h not in hs]
        hit = reach(g, source)
        # max ratio, ties to the smallest index
        return max(pool, key=lambda h: (Fraction(popcount(hit & masks[h]), size[h]), -h), default=None)

    h1 = best_block(layers[0])
    hs.append(h1)
    ratios.append(Fraction(popcount(g.adj_mask(v) & masks[h1]), size[h1]))
    layers.append(g.adj_mask(v) & masks[h1])
    while Fraction(popcount(layers[-1]), size[hs[-1]]) < x / 2:
        h = best_block(layers[-1])
        if h is None:
            if strict:
                raise CertificationError("ran out of H blocks before the last layer became large")
            break
        hit = reach(g, layers[-1]) & masks[h]
        below = 0
        for layer in layers[:-1]:
            below |= layer
        new = hit & ~reach(g, below)
        if not new:
            raise StageFailure("levelling", f"layer {len(layers)} is empty")
        hs.append(h)
        ratios.append(Fraction(popcount(hit), size[h]))
        layers.append(new)
    t = len(layers) - 1
    if strict:
        for gi in range(1, t + 1):
            m = ratios[gi - 1]
            if x * m < sum(ratios[: gi - 1]) or popcount(layers[gi]) < (1 - x) * m * size[hs[gi]]:
                raise CertificationError(f"layer bookkeeping fails at step {gi}")
    rest = [i for i in b.indices if i not in h_set]
    if not rest:
        raise StageFailure("levelling", "no blocks outside H")
    # reached[i][j]: vertices of B_j with a neighbour in L_0..L_i
    reached = []
    acc = 0
    for layer in layers:
        acc |= layer
        hit = reach(g, acc)
        reached.append({j: popcount(hit & masks[j]) for j in rest})
    counts = [sum(1 for j in rest if 4 * (t + 1) * reached[i][j] >= (i + 1) * size[j]) for i in range(t + 1)]
    k = next((k for k in range(1, t + 2) if counts[k - 1] * (t + 1) >= k * len(rest)), None)
    if k is None:
        raise StageFailure("levelling", "no level meets the spreading count")
    j_set = [j for j in rest
             if 4 * (t + 1) * reached[k - 1][j] >= k * size[j]
             and (k == 1 or 4 * (t + 1) * reached[k - 2][j] <= (k - 1) * size[j])]
    if not j_set:
        raise StageFailure("levelling", "spreading level selects no block")
    upto = 0
    for layer in layers[: k - 1]:
        upto |= layer
    fresh = reach(g, upto | layers[k - 1]) & ~reach(g, upto)
    base = 0
    for j in j_set:
        base |= fresh & masks[j]
    lev = Levelling.of(layers[:k] + [base])
    certify("levelling", lev.violations(g))
    for j in j_set:
        if 4 * rho * popcount(base & masks[j]) < size[j]:
            raise CertificationError(f"base meets block {j} too thinly")
    if strict and len(j_set) * rho < len(b.indices) - rho:
        raise CertificationError("fewer spread blocks than guaranteed")
    info = {"h_sequence": hs[:k], "t": t, "k": k, "ratios": [str(r) for r in ratios]}
    return tuple(j_set), lev, info


def build_grading(b: Blockade, h_set, h0: int, v: int, rho: int, tau=6, strict: bool = True):
    """Grading of sub-blocks ``C_j`` (``j`` in the returned set) by a levelling with apex ``v``.

    Nested witness sets ``Y_1 <= ... <= Y_n`` inside the second-to-last layer
    are grown greedily and then trimmed to be inclusion-minimal.
    """
    g = b.host
    if strict:
        _common_hypotheses(b, h_set, h0, v, rho, tau, strict)
        lk = linkage(b)
        if lk * 8 * b.length > 1:
            raise HypothesisViolation("linkage <= 1/(8|I|)", f"linkage {lk}")
        _expanding_or_raise(b, tau, "B")
    j_all, lev, info = build_levelling(b, h_set, h0, v, rho, tau, strict)
    masks = b.masks()
    size = {i: popcount(m) for i, m in masks.items()}
    n = ceil(Fraction(b.length, rho)) - 1
    if len(j_all) < n:
        if strict:
            raise CertificationError("levelling returned too few blocks")
        n = len(j_all)
    if n <= 0:
        raise StageFailure("grading", "no block to grade")
    j_set = list(j_all[:n])
    k = lev.height
    source = to_mask(lev.layers[k - 1])
    base = to_mask(lev.base)

    def best_hit(y: int, pool, i) -> int | None:
        hit = reach(g, y) & base
        ok = [j for j in pool if 4 * rho * n * popcount(hit & masks[j]) >= i * size[j]]
        if not ok:
            return None
        # any qualifying block will do; prefer the most freshly covered one
        fresh = hit & ~reach(g, ys[-1])
        return max(ok, key=lambda j: (popcount(fresh & masks[j]), -j))

    ys = [0]
    order_js: list[int] = []
    for i in range(1, n + 1):
        pool = [j for j in j_set if j not in order_js]
        y = ys[-1]
        added = []
        while best_hit(y, pool, i) is None:
            cand = [u for u in bits(source & ~y)]
            if not cand:
                raise StageFailure("grading", f"witness {i} cannot reach its threshold")

            def progress(u):
                hit = reach(g, y | 1 << u) & base
                return max(Fraction(4 * rho * n * popcount(hit & masks[j]), i * size[j]) for j in pool)

            u = max(cand, key=lambda u: (progress(u), -u))
            y |= 1 << u
            added.append(u)
        for u in sorted(added, reverse=True):
            if best_hit(y & ~(1 << u), pool, i) is not None:
                y &= ~(1 << u)
        if y == ys[-1] and not strict:
            # at desk scale the threshold is often met already; add the vertex
            # with the least fresh reach that still opens a new block
            old = reach(g, y)
            best = None
            for u in bits(source & ~y):
                fresh = g.adj_mask(u) & base & ~old
                per = {j: popcount(fresh & masks[j]) for j in pool}
                top = max(per, key=lambda j: (per[j], -j))
                if per[top] and (best is None or sum(per.values()) < best[0]):
                    best = (sum(per.values()), u, top)
            if best is None:
                break
            y |= 1 << best[1]
            order_js.append(best[2])
            ys.append(y)
            continue
        order_js.append(best_hit(y, pool, i))
        ys.append(y)
    blocks = {}
    for i, j in enumerate(order_js, start=1):
        c = masks[j] & base & reach(g, ys[i]) & ~reach(g, ys[i - 1])
        if not c:
            if strict:
                raise CertificationError(f"graded block {j} came out empty")
            # relaxed: dropping a block keeps the remaining ones graded
            continue
        if strict and 8 * b.length * popcount(c) < size[j]:
            raise CertificationError(f"graded block {j} is too small")
        blocks[j] = tuple(bits(c))
    if not blocks:
        raise StageFailure("grading", "every graded block came out empty")
    kept = [i for i, j in enumerate(order_js, start=1) if j in blocks]
    order = tuple(order_js[i - 1] for i in reversed(kept))
    witnesses = tuple(tuple(bits(ys[i])) for i in reversed(kept))
    grading_lev = Levelling(lev.layers[:k])
    grading = Grading(grading_lev, tuple(sorted(blocks.items())), order, witnesses)
    certify("grading", grading.violations(g))
    info["base_layer"] = list(lev.base)
    return tuple(sorted(blocks)), grading, info
