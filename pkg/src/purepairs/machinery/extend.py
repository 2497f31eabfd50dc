"""Growing a bi-levelling by one level, exact heights, and induced cycles through them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor

from .. import checks
from ..blockade import Blockade, equipartition, linkage, max_degree_between
from ..graph import Graph, bits, popcount, to_mask
from .bilevel import connecting_path, iter_bilevellings, rho_for
from .expansion import _require_not_divergent
from .selective import PARTITION, selective_cover
from .structures import (
    BiLevelling, CertificationError, HypothesisViolation, Levelling, StageFailure, certify, frac, pow_ge,
    reach,
)


def power_ceil(n: int, c) -> int:
    """Smallest integer ``r`` with ``r >= n ** c``, computed exactly."""
    c = frac(c)
    p, q = c.numerator, c.denominator
    target = n ** p
    r = max(1, round(target ** (1 / q)))
    while r ** q < target:
        r += 1
    while r > 1 and (r - 1) ** q >= target:
        r -= 1
    return r


def _lower_bound_holds(eta, kk: int, k: int, delta, lam, gamma, n: int, c) -> bool:
    """Exact ``eta/2 >= K^(k+1) delta n^c + lambda + gamma``."""
    room = eta / 2 - lam - gamma
    if room <= 0:
        return False
    # K^(k+1) delta n^c <= room  <=>  room / (K^(k+1) delta) >= n^c
    return pow_ge(room / (kk ** (k + 1) * delta), n, c)


def extend_bilevelling(a: Blockade, bl: BiLevelling, k: int, c, delta=None, lam=None, gamma=None,
                       eta=None, strict: bool = True, params: dict | None = None) -> BiLevelling:
    """Bi-levelling of length ``k`` and height one more than ``bl``.

    Runs the selective cover of M's base against C with ``k + 1`` blocks.  One
    block ``C_i`` is sacrificed: its part ``M`` reached from the chosen ``X``
    becomes the new base of M, and the other blocks keep only the vertices
    missing ``X`` but seen from ``M``.  L drops its base to the vertices that
    miss ``C_1..C_i``.

    Relaxed ``params``: ``alpha`` (default ``1/(4 K^(k+1))``) and ``eps``
    (default: just above the largest relative degree from M's base into C).
    """
    params = dict(params or {})
    g = a.host
    c = frac(c)
    kk = bl.length
    n = g.n
    if not 1 <= k < kk:
        raise HypothesisViolation("K > k >= 1", f"K={kk}, k={k}")
    problems = bl.violations()
    if problems:
        raise HypothesisViolation("input is a valid bi-levelling", "; ".join(problems[:3]))
    if bl.ambient is None:
        raise HypothesisViolation("input is rainbow against a declared blockade")
    c_masks = [to_mask(vs) for vs in bl.c_sets()]
    if strict:
        for name, val in (("delta", delta), ("lambda", lam), ("gamma", gamma), ("eta", eta)):
            if val is None:
                raise HypothesisViolation(f"parameter {name} supplied")
        delta, lam, gamma, eta = frac(delta), frac(lam), frac(gamma), frac(eta)
        if kk < (2 + 1 / c) * k:
            raise HypothesisViolation("K >= (2 + 1/c) k", f"K={kk}, k={k}")
        if not _lower_bound_holds(eta, kk, k, delta, lam, gamma, n, c):
            raise HypothesisViolation("eta/2 >= K^(k+1) delta |G|^c + lambda + gamma")
        if linkage(a) > lam:
            raise HypothesisViolation("linkage <= lambda", f"linkage {linkage(a)}")
        if bl.a_size() < eta:
            raise HypothesisViolation("A-size >= eta", f"A-size {bl.a_size()}")
        _require_not_divergent(a, gamma, delta, params.get("budget", 2_000_000))
        alpha = delta * power_ceil(n, c) / eta
        eps = lam / eta
    else:
        alpha = frac(params.get("alpha", Fraction(1, 4 * kk ** (k + 1))))
        base_m = to_mask(bl.M.base)
        eps = params.get("eps")
        if eps is None:
            eps = max(Fraction(max_degree_between(g, base_m, cm) + 1, popcount(cm)) for cm in c_masks)
        eps = frac(eps)
    positions = list(range(kk))
    c_pos = Blockade.from_sets(g, bl.c_sets(), indices=positions)
    try:
        out = selective_cover(bl.M.base, c_pos, k + 1, c, alpha, eps, strict)
    except HypothesisViolation as err:
        if strict:
            raise
        raise StageFailure("selective", str(err)) from err
    if out.kind == PARTITION:
        first = c_masks[0]
        x_tuple, j_prime = max(out.parts, key=lambda part: (popcount(reach(g, to_mask(part[0])) & first),
                                                             [-v for v in part[0]]))
        i = 0
        j_set = [j for j in j_prime if j != 0][:k]
    else:
        x_tuple, j_prime = out.x, out.j
        i = min(j_prime)
        j_set = [j for j in j_prime if j != i]
    x_mask = to_mask(x_tuple)
    m_new = reach(g, x_mask) & c_masks[i]
    if not m_new:
        raise StageFailure("extend", f"chosen X reaches nothing in block {i}")
    new_sets, new_parents, ratios = [], [], {}
    for j in sorted(j_set):
        d_j = c_masks[j] & ~reach(g, x_mask)
        c_new = d_j & reach(g, m_new)
        ratios[j] = Fraction(popcount(c_new), popcount(c_masks[j]))
        if not c_new:
            if strict:
                raise CertificationError(f"block {j} emptied although the hypotheses hold")
            raise StageFailure("extend", f"block {j} has nothing left that misses X and sees M")
        new_sets.append(tuple(bits(c_new)))
        new_parents.append(a.block_of()[c_pos.block(j)[0]])
    # the largest base subset covering the later blocks and missing C_0..C_i
    earlier = 0
    for p in range(i + 1):
        earlier |= c_masks[p]
    y_base = to_mask(bl.L.base) & ~reach(g, earlier)
    if not y_base:
        raise StageFailure("extend", "no base vertex of L misses the sacrificed blocks")
    l_layers = bl.L.masks()[:-1] + [y_base]
    m_layers = bl.M.masks()[:-1] + [x_mask, m_new]
    c_new_blk = Blockade.from_sets(g, new_sets, parents=new_parents)
    c_size = min(ratios.values())
    prov = {"stage": "extend", "variant": out.kind, "sacrificed": i, "kept": sorted(j_set),
            "c_size": str(c_size), "previous": bl.provenance}
    result = BiLevelling(Levelling.of(l_layers), Levelling.of(m_layers), c_new_blk, False, bl.ambient, prov)
    certify("extended bi-levelling", result.violations())
    if result.height != bl.height + 1 or result.length != k:
        raise CertificationError("extension changed height or length incorrectly")
    if strict and c_size < Fraction(1, 2):
        raise CertificationError(f"C-size {c_size} below 1/2")
    return result


# -- exact heights --------------------------------------------------------

@dataclass(frozen=True)
class ExactConstants:
    rho: int
    length: int
    build_length: int
    bound: Fraction
    a_size: Fraction
    min_ell: int

    def to_json(self) -> dict:
        return {"rho": self.rho, "K": self.length, "build_length": self.build_length,
                "lambda_gamma_max": str(self.bound), "a_size": str(self.a_size), "min_ell": self.min_ell}


def exact_constants(k: int, c, ell: int) -> ExactConstants:
    """Required blockade length and parameter bounds for height ``ell`` and length ``k``."""
    c = frac(c)
    rho = rho_for(c)
    base = 3 + 1 / c
    kk = ceil(k * base ** (ell + 2))
    return ExactConstants(rho, kk, floor(k * base ** (ell - 2)), Fraction(1, 2 ** (8 + ell) * rho ** 3 * kk),
                          Fraction(2) ** (4 - ell) / (rho ** 3 * kk), 3 * rho - 2)


def length_ladder(k: int, t: int, c, rule: str = "proof") -> list[int]:
    """``K_0 = k`` and ``K_s`` for ``s = 1..t``.

    ``proof`` multiplies by ``2 + 1/c`` and rounds up; ``plus-one`` adds one
    block per level, the least an extension can consume.
    """
    c = frac(c)
    out = [k]
    for _ in range(t):
        out.append(ceil((2 + 1 / c) * out[-1]) if rule == "proof" else out[-1] + 1)
    return out


def exact_bilevelling(a: Blockade, k: int, c, ell: int, strict: bool = True,
                      params: dict | None = None) -> BiLevelling:
    """A-rainbow bi-levelling of length ``k`` and height exactly ``ell``.

    Builds a short bi-levelling, then extends it one level at a time down a
    ladder of lengths.  Relaxed ``params``: ``build`` (passed to the builder),
    ``ladder`` (``plus-one`` by default), ``alpha`` / ``eps`` for each
    extension, ``attempts`` bounding how many built candidates are tried,
    ``start`` to extend a given bi-levelling instead of building one.
    """
    params = dict(params or {})
    c = frac(c)
    consts = exact_constants(k, c, ell)
    rho = consts.rho
    if ell < consts.min_ell:
        raise HypothesisViolation("ell >= 3 rho - 2", f"ell={ell}, rho={rho}")
    if k < 1:
        raise HypothesisViolation("k >= 1")
    if strict:
        return _exact_strict(a, k, c, ell, consts, params)
    rule = params.get("ladder", "plus-one")
    if params.get("start") is not None:
        return _extend_to_height(a, params["start"], k, c, ell, rule, params)
    attempts = params.get("attempts", 16)
    last: StageFailure | None = None
    candidates = iter_bilevellings(a, None, c, False, params.get("build"))
    for _ in range(attempts):
        try:
            bl = next(candidates)
        except StageFailure as err:
            raise last or err
        except StopIteration:
            break
        try:
            return _extend_to_height(a, bl, k, c, ell, rule, params)
        except StageFailure as err:
            last = err
    raise last or StageFailure("apex", "no candidate bi-levelling")


def _extend_to_height(a, bl, k, c, ell, rule, params, etas=None, strict=False, extras=None):
    t = ell - bl.height
    if t < 0:
        raise StageFailure("height", f"built height {bl.height} already exceeds {ell}")
    ladder = length_ladder(k, t, c, rule)
    if bl.length < ladder[t]:
        raise StageFailure("ladder", f"built length {bl.length} below K_{t} = {ladder[t]}")
    bl = bl.with_blocks(list(range(ladder[t])))
    for s in range(t, 0, -1):
        kw = dict(extras or {})
        if etas is not None:
            kw["eta"] = etas[s]
        bl = extend_bilevelling(a, bl, ladder[s - 1], c, strict=strict,
                                params={key: params[key] for key in ("alpha", "eps") if key in params},
                                **kw)
    if bl.height != ell or bl.length != k:
        raise CertificationError(f"ladder ended at height {bl.height}, length {bl.length}")
    bl.provenance["ladder"] = ladder
    return bl


def _exact_strict(a, k, c, ell, consts, params):
    kk = consts.length
    if a.length != kk:
        raise HypothesisViolation("blockade length K", f"length {a.length}, K = {kk}")
    for key in ("lam", "gamma"):
        if key not in params:
            raise HypothesisViolation(f"parameter {key} supplied")
    lam, gamma = frac(params["lam"]), frac(params["gamma"])
    if lam > consts.bound or gamma > consts.bound:
        raise HypothesisViolation("lambda, gamma <= 2^(-8-ell)/(rho^3 K)")
    n = a.host.n
    # the exact delta is K^-K |G|^-c; the rational below is no larger
    delta = Fraction(1, kk ** kk * power_ceil(n, c))
    build = {"gamma": gamma, "delta": delta, "lam": lam, "budget": params.get("budget", 2_000_000)}
    bl = next(iter_bilevellings(a, consts.build_length, c, True, build))
    t = ell - bl.height
    etas = [Fraction(2) ** (s - t - 6) / (consts.rho ** 3 * kk) for s in range(t + 1)]
    out = _extend_to_height(a, bl, k, c, ell, "proof", {}, etas, True,
                            {"delta": delta, "lam": lam, "gamma": gamma})
    if out.a_size() < consts.a_size:
        raise CertificationError("A-size below 2^(4-ell)/(rho^3 K)")
    return out


# -- induced cycles -------------------------------------------------------

@dataclass(frozen=True)
class CycleResult:
    cycle: tuple[int, ...] | None
    method: str
    stage: str
    detail: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.cycle is not None

    def to_json(self) -> dict:
        return {"cycle": None if self.cycle is None else list(self.cycle), "method": self.method,
                "stage": self.stage, "detail": self.detail}


def exhaustive_induced_cycle(g: Graph, length: int) -> tuple[int, ...] | None:
    """Lexicographically first induced cycle of the given length, rooted at its smallest vertex."""
    if length < 3:
        return None
    for s in g.vertices():
        above = g.all_mask & ~((2 << s) - 1)
        s_nbrs = g.adj_mask(s)

        def grow(path: list[int], blocked: int) -> tuple[int, ...] | None:
            last = path[-1]
            cand = g.adj_mask(last) & above & ~blocked
            if len(path) == length - 1:
                cand &= s_nbrs
            elif len(path) > 1:
                cand &= ~s_nbrs
            for w in bits(cand):
                if len(path) == length - 1:
                    if w > path[1]:
                        return tuple(path + [w])
                    continue
                # everything adjacent to the path so far, except through w, is off limits
                found = grow(path + [w], blocked | 1 << w | g.adj_mask(last))
                if found:
                    return found
            return None

        for x1 in bits(s_nbrs & above):
            found = grow([s, x1], 1 << s | 1 << x1)
            if found:
                return found
    return None


def find_induced_cycle(g: Graph, ell: int, c, eps=None, strict: bool = False,
                       params: dict | None = None, fallback_limit: int = 64) -> CycleResult:
    """Induced cycle of length ``ell``: the bi-levelling pipeline first, exhaustive search second.

    The pipeline splits ``g`` into equal blocks, builds a length-1 bi-levelling
    of height ``ell - 2`` and closes the connecting path through a vertex of
    its single block.  Relaxed ``params``: ``blocks`` overrides the number of
    blocks, everything else goes to the exact builder.
    """
    params = dict(params or {})
    c = frac(c)
    inv = 1 / c
    if inv.denominator != 1:
        raise HypothesisViolation("1/c is an integer", f"c = {c}")
    if ell < 3 / c + 3:
        raise HypothesisViolation("ell >= 3/c + 3", f"ell={ell}")
    blocks = (3 + inv) ** ell
    if not strict:
        blocks = params.pop("blocks", blocks)
    detail: dict = {"blocks": int(blocks)}
    stage = "pipeline"
    if 2 <= blocks <= g.n:
        a = equipartition(g, int(blocks))
        try:
            bl = exact_bilevelling(a, 1, c, ell - 2, strict=strict, params=params)
            cycle = _close_cycle(g, bl)
            certify("induced cycle", checks.induced_cycle_violations(g, cycle, ell))
            return CycleResult(tuple(cycle), "pipeline", "closed", {**detail, "bilevelling": bl.to_json()})
        except StageFailure as err:
            stage = f"pipeline failed at {err.stage}"
            detail["error"] = str(err)
        except HypothesisViolation as err:
            stage = "pipeline hypothesis unmet"
            detail["error"] = str(err)
    else:
        stage = "pipeline skipped: fewer vertices than blocks"
    if g.n <= fallback_limit:
        cycle = exhaustive_induced_cycle(g, ell)
        if cycle is not None:
            certify("induced cycle", checks.induced_cycle_violations(g, cycle, ell))
            return CycleResult(cycle, "exhaustive", stage, detail)
        return CycleResult(None, "exhaustive", stage + "; exhaustive search found none", detail)
    return CycleResult(None, "none", stage, detail)


def _close_cycle(g: Graph, bl: BiLevelling) -> list[int]:
    (block,) = bl.c_sets()
    l_base, m_base = to_mask(bl.L.base), to_mask(bl.M.base)
    for w in block:
        us, vs = list(bits(g.adj_mask(w) & l_base)), list(bits(g.adj_mask(w) & m_base))
        if us and vs:
            return connecting_path(bl, vs[0], us[0]) + [w]
    raise CertificationError("no block vertex sees both bases")
