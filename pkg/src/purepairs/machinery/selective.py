"""Selective covering: a subset of a covering set that hits some blocks moderately."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from ..blockade import Blockade, max_degree_between
from ..graph import bits, popcount, to_mask
from .structures import CertificationError, HypothesisViolation, StageFailure, frac, pow_ge, reach

PARTITION, PAIR = "partition", "pair"


def _at_least_scaled(r: Fraction, s: Fraction, n: int, c: Fraction) -> bool:
    """Exact test of ``r >= n^(-c) * s`` for rationals r, s >= 0 and c = p/q > 0."""
    if s == 0:
        return True
    p, q = c.numerator, c.denominator
    return r ** q * Fraction(n) ** p >= s ** q


@dataclass(frozen=True)
class SelectiveCoverOutcome:
    kind: str
    parts: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = ()
    x: tuple[int, ...] = ()
    j: tuple[int, ...] = ()
    ratios: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        if self.kind == PARTITION:
            return {"kind": self.kind, "parts": [{"x": list(x), "j": list(j)} for x, j in self.parts]}
        return {"kind": self.kind, "x": list(self.x), "j": list(self.j),
                "ratios": {str(i): str(r) for i, r in self.ratios.items()}}


def verify_outcome(out: SelectiveCoverOutcome, b: Blockade, k: int, c, alpha, eps) -> list[str]:
    """Re-check the inequalities the outcome claims, with exact rationals."""
    g = b.host
    c, alpha, eps = frac(c), frac(alpha), frac(eps)
    big = b.length ** k
    masks = b.masks()
    problems = []
    if out.kind == PARTITION:
        for x, j_set in out.parts:
            if len(j_set) != k:
                problems.append(f"part {x} names {len(j_set)} blocks")
            hit = reach(g, to_mask(x))
            for j in j_set:
                if Fraction(popcount(hit & masks[j]), popcount(masks[j])) >= big * alpha:
                    problems.append(f"part {x} reaches block {j} too much")
        return problems
    if len(out.j) != k:
        problems.append("pair names the wrong number of blocks")
    hit = reach(g, to_mask(out.x))
    for i in out.j:
        r = Fraction(popcount(hit & masks[i]), popcount(masks[i]))
        if not _at_least_scaled(r, alpha, g.n, c):
            problems.append(f"block {i}: ratio {r} below |G|^-c alpha")
        if not r < big * alpha + eps:
            problems.append(f"block {i}: ratio {r} not below K^k alpha + eps")
    return problems


def selective_cover(a_set, b: Blockade, k: int, c, alpha, eps, strict: bool = True) -> SelectiveCoverOutcome:
    """Grow disjoint ``X(J)``, ``Y(J)`` one vertex of ``a_set`` at a time.

    Returns the partition variant if every vertex is absorbed, else the pair
    ``(X, J)`` found when absorbing a vertex would overfill ``Y(J)``.  The
    length condition only serves to keep the chosen window of k blocks inside
    the blockade, so relaxed mode skips it and clamps the window instead.
    """
    g = b.host
    c, alpha, eps = frac(c), frac(alpha), frac(eps)
    amask = to_mask(a_set)
    masks = b.masks()
    idx = b.indices
    kk = len(idx)
    if not 1 <= k <= kk:
        raise HypothesisViolation("K >= k >= 1", f"K={kk}, k={k}")
    if c <= 0 or alpha <= 0 or eps <= 0:
        raise HypothesisViolation("c, alpha, eps > 0")
    if strict and kk < (2 + 1 / c) * (k - 1):
        raise HypothesisViolation("K >= (2 + 1/c)(k - 1)", f"K={kk}")
    if amask & b.union():
        raise HypothesisViolation("A is disjoint from the blockade")
    uncovered = b.union() & ~reach(g, amask)
    if uncovered:
        raise HypothesisViolation("A covers V(B)", witness=tuple(bits(uncovered)))
    for i in idx:
        deg = max_degree_between(g, amask, masks[i])
        if deg >= eps * popcount(masks[i]):
            raise HypothesisViolation("max-degree from A to each block < eps |block|", f"block {i}: {deg}")
    size = {i: popcount(masks[i]) for i in idx}
    n = g.n
    families = list(combinations(idx, k))
    xs = {fam: 0 for fam in families}
    ys = {fam: 0 for fam in families}
    y_all = 0
    for a in bits(amask):
        nbrs = {i: g.adj_mask(a) & masks[i] & ~y_all for i in idx}
        ranked = sorted(idx, key=lambda i: (Fraction(popcount(nbrs[i]), size[i]), i))
        ratio = [Fraction(popcount(nbrs[i]), size[i]) for i in ranked]
        if ratio[k - 1] == 0:
            fam = tuple(sorted(ranked[:k]))
            xs[fam] |= 1 << a
            continue
        capped = False
        if k == 1:
            lo = 0
        else:
            t = max(t for t in range(1, kk + 1) if t * (k - 1) + 1 <= kk
                    and pow_ge(ratio[t * (k - 1)], n, -1 + (t - 1) * c))
            lo = t * (k - 1)
            if lo + k > kk:
                if strict:
                    raise CertificationError("selected window runs past the last block")
                lo, capped = kk - k, True
        fam = tuple(sorted(ranked[lo:lo + k]))
        grown = ys[fam]
        for i in fam:
            grown |= nbrs[i]
        for i, j in combinations(fam, 2):
            ri = Fraction(popcount(grown & masks[i]), size[i])
            rj = Fraction(popcount(grown & masks[j]), size[j])
            if not (_at_least_scaled(ri, rj, n, c) and _at_least_scaled(rj, ri, n, c)):
                if capped:
                    raise StageFailure("selective", f"capped window unbalanced at blocks {i},{j}")
                raise CertificationError(f"balance condition broke for blocks {i},{j}")
        if all(Fraction(popcount(grown & masks[i]), size[i]) < alpha for i in fam):
            xs[fam] |= 1 << a
            ys[fam] = grown
            y_all |= grown
            continue
        x = xs[fam] | 1 << a
        hit = reach(g, x)
        out = SelectiveCoverOutcome(PAIR, x=tuple(bits(x)), j=fam,
                                    ratios={i: Fraction(popcount(hit & masks[i]), size[i]) for i in fam})
        problems = verify_outcome(out, b, k, c, alpha, eps)
        if problems:
            raise CertificationError(f"pair bounds fail: {problems}")
        return out
    parts = tuple((tuple(bits(x)), fam) for fam, x in xs.items() if x)
    out = SelectiveCoverOutcome(PARTITION, parts=parts)
    problems = verify_outcome(out, b, k, c, alpha, eps)
    if problems:
        raise CertificationError(f"partition bounds fail: {problems}")
    return out

