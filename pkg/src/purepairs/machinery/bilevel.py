"""Bi-levellings: two parallel levellings from one apex, and paths through them."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from math import ceil

from .. import checks
from ..blockade import Blockade, linkage
from ..graph import bits, popcount, to_mask
from .expansion import _require_not_divergent, expanding_contraction
from .levelling import build_grading, build_levelling
from .structures import (
    BiLevelling, CertificationError, HypothesisViolation, Levelling, StageFailure, certify, frac, reach,
)


def rho_for(c) -> int:
    return ceil(1 + 1 / frac(c))


def connecting_path(bl: BiLevelling, x: int, y: int) -> list[int]:
    """Induced path from ``x`` (base of M) through the apex to ``y`` (base of L)."""
    problems = bl.violations()
    if problems:
        raise HypothesisViolation("input is a valid bi-levelling", "; ".join(problems[:3]))
    g = bl.C.host
    if x not in bl.M.base or y not in bl.L.base:
        raise HypothesisViolation("x in base(M) and y in base(L)")

    def climb(layers, start):
        out = [start]
        for layer in reversed(layers[:-1]):
            out.append(min(u for u in layer if g.has_edge(u, out[-1])))
        return out

    up_m = climb(bl.M.layers, x)
    up_l = climb(bl.L.layers, y)
    path = up_m + list(reversed(up_l[:-1]))
    certify("connecting path", checks.induced_path_violations(g, path, bl.height))
    cmask = bl.C.union()
    if any(g.adj_mask(u) & cmask for u in path[1:-1]):
        raise CertificationError("connecting path interior touches a block of C")
    return path


def _shortest_rainbow_path(g, start: int, blocks: dict[int, int], target: int) -> list[int] | None:
    """Minimum-length induced path from ``start`` using each block at most once,
    whose last vertex has a neighbour in ``target``; ties broken lexicographically."""
    for length in range(1, len(blocks) + 1):
        found = []

        def grow(path, used, inside):
            if found:
                return
            if len(path) == length + 1:
                if g.adj_mask(path[-1]) & target:
                    found.append(list(path))
                return
            last = path[-1]
            cand = g.adj_mask(last)
            for u in path[:-1]:
                cand &= ~g.adj_mask(u)
            for h, m in sorted(blocks.items()):
                if h in used:
                    continue
                for w in bits(cand & m & ~inside):
                    grow(path + [w], used | {h}, inside | 1 << w)
                    if found:
                        return

        grow([start], frozenset(), 1 << start)
        if found:
            return found[0]
    return None


def _strict_constants(a: Blockade, k: int, rho: int, params: dict) -> None:
    kk = a.length
    if kk < k * rho ** 4:
        raise HypothesisViolation("K >= k rho^4", f"length {kk}, k rho^4 = {k * rho ** 4}")
    for key in ("gamma", "delta", "lam"):
        if key not in params:
            raise HypothesisViolation(f"parameter {key} supplied")
    gamma, delta, lam = (frac(params[key]) for key in ("gamma", "delta", "lam"))
    if lam > Fraction(1, 512 * rho ** 2 * kk):
        raise HypothesisViolation("lambda <= 1/(512 rho^2 K)", f"lambda = {lam}")
    if gamma > Fraction(3, 256 * kk):
        raise HypothesisViolation("gamma <= 3/(256 K)", f"gamma = {gamma}")
    if delta > Fraction(3 * rho, 128 * kk ** 2):
        raise HypothesisViolation("delta <= 3 rho/(128 K^2)", f"delta = {delta}")
    if (256 * kk * delta / 3) ** (rho - 1) * a.host.n > 1:
        raise HypothesisViolation("(256 K delta/3)^(rho-1) |G| <= 1")
    if linkage(a) > lam:
        raise HypothesisViolation("linkage <= lambda", f"linkage {linkage(a)}")
    _require_not_divergent(a, gamma, delta, params.get("budget", 2_000_000))


def build_bilevelling(a: Blockade, k: int | None, c, ell: int | None = None, strict: bool = True,
                      params: dict | None = None) -> BiLevelling:
    """A-rainbow bi-levelling of length ``k`` (all available blocks when ``k`` is None, relaxed only).

    Relaxed ``params``: ``delta`` / ``delta2`` for the two optional contractions
    (omitted means no contraction), ``tau`` for the levelling steps (default 6),
    ``apex_attempts`` bounding how many apex vertices are tried, ``h2_size``
    for the number of blocks the short path may use (at least 1 when relaxed,
    so that rho = 2 still leaves room for a path).
    """
    return next(iter_bilevellings(a, k, c, strict, params))


def iter_bilevellings(a: Blockade, k: int | None, c, strict: bool = True, params: dict | None = None):
    """Yield one bi-levelling per apex vertex that succeeds, in apex order.

    Raises the last stage failure once the apexes run out.
    """
    params = dict(params or {})
    rho = params.get("rho", rho_for(c))
    if rho < 2:
        raise HypothesisViolation("rho >= 2")
    if strict:
        if k is None:
            raise HypothesisViolation("k given in strict mode")
        _strict_constants(a, k, rho, params)
        delta = frac(params["delta"])
        kk = a.length
        b, tau = expanding_contraction(a, delta, strict=True)
        delta2, tau2 = 32 * kk * delta / 3, Fraction(3, 128 * kk) / delta
    else:
        if params.get("delta") is not None:
            b, tau = expanding_contraction(a, params["delta"], strict=False)
        else:
            b, tau = a, frac(params.get("tau", 6))
        delta2 = params.get("delta2")
        tau2 = frac(params.get("tau2", params.get("tau", 6)))
    idx = a.indices
    if len(idx) < 2 * rho:
        raise HypothesisViolation("length at least 2 rho", f"length {len(idx)}")
    h1_set = idx[:rho]
    attempts = params.get("apex_attempts", 64)
    last_error: StageFailure | None = None
    tried = 0
    for h0 in h1_set:
        for u in b.block(h0):
            if tried >= attempts:
                break
            tried += 1
            try:
                bl = _bilevel_from_apex(a, b, k, rho, h1_set, h0, u, tau, tau2, delta2, strict, params)
            except (StageFailure, HypothesisViolation) as err:
                if strict:
                    raise
                last_error = err if isinstance(err, StageFailure) else StageFailure("grading", str(err))
                continue
            yield bl
    raise last_error or StageFailure("apex", "no apex vertex available")


def _bilevel_from_apex(a, b, k, rho, h1_set, h1, u, tau, tau2, delta2, strict, params) -> BiLevelling:
    g = a.host
    j1, grading, ginfo = build_grading(b, h1_set, h1, u, rho, tau, strict)
    lev_l = grading.levelling
    t = lev_l.height
    forward = list(grading.order)
    c_blk = Blockade.from_sets(g, [grading.block(j) for j in forward], indices=range(len(forward)),
                               parents=forward)
    # contraction of the graded blocks, positions keep the forward order
    if delta2 is not None and c_blk.length >= 2:
        d_blk, _ = expanding_contraction(c_blk, delta2, strict=strict)
    else:
        d_blk = c_blk
    dmask = {forward[p]: m for p, m in d_blk.masks().items()}
    if len(dmask) < rho:
        raise StageFailure("grading", f"only {len(dmask)} graded blocks, need at least rho")
    order = [j for j in forward if j in dmask]
    h3 = order[: rho - 1]
    rest_order = order[rho - 1:]
    d_h3 = 0
    for j in h3:
        d_h3 |= dmask[j]
    pool = [i for i in a.indices if i not in j1 and i not in h1_set]
    h2 = pool[: params.get("h2_size", rho - 2 if strict else len(pool))]
    bmasks = b.masks()
    path = _shortest_rainbow_path(g, u, {h: bmasks[h] for h in h2 + [h1] if h != h1}, d_h3)
    if path is None:
        raise StageFailure("shortpath", "no rainbow path from the apex reaches the first graded blocks")
    v = path[-1]
    where_b = b.block_of()
    h2_blk = where_b[v]
    # levelling from v over (D_j : j in H3) together with B_h2
    sub_sets = {h2_blk: bmasks[h2_blk], **{j: dmask[j] for j in order}}
    sub_idx = sorted(sub_sets)
    sub = Blockade.from_sets(g, [tuple(bits(sub_sets[i])) for i in sub_idx], indices=sub_idx)
    j2, lev2, _ = build_levelling(sub, h3 + [h2_blk], h2_blk, v, rho, tau2, strict)
    m_layers = [to_mask(x) for x in lev2.layers[:-1]]
    if len(m_layers) < 2:
        raise StageFailure("levelling", "second levelling has height 0 below its base")
    e_base = to_mask(lev2.base)
    p_mask = to_mask(path)
    f_sets = {j: e_base & dmask[j] & ~reach(g, p_mask) for j in j2}
    f_sets = {j: m for j, m in f_sets.items() if m}
    if not f_sets:
        raise StageFailure("linkage-trim", "every spread block touches the short path")
    l_layers = lev_l.masks()
    pos = {j: p for p, j in enumerate(order)}
    p_rest = p_mask & ~(1 << u)

    def witness(j: int) -> int:
        earlier = 0
        for i in order[: pos[j]]:
            earlier |= dmask[i]
        return l_layers[t] & ~reach(g, earlier)

    def type_of(f: int, j: int) -> tuple[int, int]:
        y = min(bits(g.adj_mask(f) & witness(j)))
        q_path = [f, y]
        for level in range(t - 1, -1, -1):
            q_path.append(min(bits(g.adj_mask(q_path[-1]) & l_layers[level])))
        q_idx = next(i for i, z in enumerate(q_path) if g.adj_mask(z) & p_rest)
        q = q_path[q_idx]
        p_idx = max(i for i, z in enumerate(path) if i > 0 and g.has_edge(q, z))
        return len(path) - p_idx, q_idx + 1

    buckets: dict[int, Counter] = {}
    members: dict[tuple[int, tuple[int, int]], int] = {}
    for j, fm in f_sets.items():
        cnt = Counter()
        for f in bits(fm):
            ty = type_of(f, j)
            cnt[ty] += 1
            members[j, ty] = members.get((j, ty), 0) | 1 << f
        buckets[j] = cnt
    # most common type per block, ties to the smaller type
    block_type = {j: min(cnt.items(), key=lambda kv: (-kv[1], kv[0]))[0] for j, cnt in buckets.items()}
    tally = Counter(block_type.values())
    ta, tb = min(tally.items(), key=lambda kv: (-kv[1], kv[0]))[0]
    j3 = [j for j in order if block_type.get(j) == (ta, tb)]
    g_sets = {j: members[j, (ta, tb)] for j in j3}
    p_prime = path[len(path) - ta:]
    w = p_prime[0]
    pp_mask = to_mask(p_prime)
    n_layers = [1 << w]
    first = g.adj_mask(w) & l_layers[t - tb + 2] & ~reach(g, pp_mask & ~(1 << w))
    n_layers.append(first)
    for i in range(2, tb):
        n_layers.append(l_layers[t - tb + i + 1] & ~reach(g, pp_mask) & reach(g, n_layers[i - 1]))
    # parallel to M': no contact with p_2..p_a or M_1..M_m; base avoids the first graded blocks
    m_prime = [1 << p for p in p_prime] + m_layers[1:]
    m_rest = 0
    for m in m_prime[1:]:
        m_rest |= m
    block_out = m_rest | reach(g, m_rest)
    for i in range(1, tb):
        n_layers[i] &= ~block_out
        if i >= 2:
            n_layers[i] &= reach(g, n_layers[i - 1])
    n_layers[-1] &= ~reach(g, d_h3)
    n_lower = 0
    for m in n_layers[:-1]:
        n_lower |= m
    for j in j3:
        g_sets[j] &= reach(g, n_layers[-1]) & ~reach(g, n_lower) & reach(g, m_prime[-1])
        for m in m_prime[:-1]:
            g_sets[j] &= ~reach(g, m)
    # forward grading by N: trim blocks not covered by the witness of their position
    changed = True
    while changed:
        changed = False
        live = [j for j in j3 if g_sets[j]]
        seen = 0
        for p, j in enumerate(live):
            wit = n_layers[-1] & ~reach(g, seen)
            for later in live[p:]:
                keep = g_sets[later] & reach(g, wit)
                if keep != g_sets[later]:
                    g_sets[later] = keep
                    changed = True
            seen |= g_sets[j]
    live = [j for j in j3 if g_sets[j]]
    if any(not m for m in n_layers[1:]):
        raise StageFailure("type-bucketing", "a layer of the new levelling emptied")
    if k is not None:
        if len(live) < k:
            raise StageFailure("type-bucketing", f"{len(live)} blocks survive, need {k}")
        live = live[:k]
    if not live:
        raise StageFailure("type-bucketing", "no block survives")
    c_out = Blockade.from_sets(g, [tuple(bits(g_sets[j])) for j in live], parents=live)
    bl = BiLevelling(Levelling.of(n_layers), Levelling.of(m_prime), c_out, False, a,
                     {"stage": "bilevel", "apex": u, "type": [ta, tb], "path": path,
                      "rho": rho, "h1": h1, "forward": order})
    certify("bi-levelling", bl.violations())
    if strict:
        if bl.height > 3 * rho - 3:
            raise CertificationError("height exceeds 3 rho - 3")
        if bl.a_size() < Fraction(1, 64 * rho ** 3 * a.length):
            raise CertificationError("A-size below 1/(64 rho^3 K)")
    return bl
