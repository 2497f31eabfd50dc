"""Bi-gradings: bi-levellings whose second levelling grades the blocks backwards."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from ..blockade import Blockade, linkage, max_degree_between
from ..graph import bits, popcount, to_mask
from .bilevel import rho_for
from .expansion import _require_not_divergent
from .extend import exact_bilevelling, power_ceil
from .selective import PARTITION, selective_cover
from .structures import (
    BiLevelling, CertificationError, HypothesisViolation, StageFailure, certify, frac, pow_ge, reach,
)

BULLETS = {
    1: "index sets shrink to the ladder length and stay above the chosen index",
    2: "surviving blocks keep at least half their vertices",
    3: "the chosen D block is large enough",
    4: "some X covers D and misses the surviving blocks",
    5: "max-degree from the new D to earlier D blocks is small",
    6: "max-degree from surviving blocks to the new D is small",
}


@dataclass(frozen=True)
class BigradeConstants:
    ladder: tuple[int, ...]
    length: int
    eta: Fraction
    lam: Fraction
    gamma: Fraction
    rho: int

    @property
    def kappa(self) -> Fraction:
        # K^-K has millions of digits for realistic K; only strict mode asks for it
        return Fraction(1, self.length ** self.length)

    def to_json(self) -> dict:
        return {"ladder": list(self.ladder), "K": self.length, "kappa": f"{self.length}^-{self.length}",
                "eta": str(self.eta), "lambda": str(self.lam), "gamma": str(self.gamma), "rho": self.rho}


def bigrade_ladder(k: int, d, rule: str = "proof") -> tuple[int, ...]:
    """``(K_0, ..., K_k)`` with ``K_k = 1``; ``plus-one`` steps by one block instead."""
    d = frac(d)
    out = [1]
    for _ in range(k):
        out.append(ceil((2 + 1 / d) * out[-1] + 1) if rule == "proof" else out[-1] + 1)
    return tuple(reversed(out))


def bigrade_constants(k: int, ell: int, c, d, lambda_out) -> BigradeConstants:
    c, d, lambda_out = frac(c), frac(d), frac(lambda_out)
    ladder = bigrade_ladder(k, d)
    kk = ceil(ladder[0] * (3 + 1 / c) ** (ell + 2))
    eta = Fraction(2) ** (6 - 2 * ell) / kk
    lam = lambda_out * eta / (8 * k * 2 ** k)
    # the statement's divergence threshold; the proof's eta has the opposite exponent sign
    gamma = Fraction(2) ** (-6 - 2 * ell) / kk
    return BigradeConstants(ladder, kk, eta, lam, gamma, rho_for(c))


def _fail(strict: bool, bullet: int, detail: str):
    msg = f"bullet {bullet} ({BULLETS[bullet]}): {detail}"
    if strict:
        raise CertificationError(msg)
    raise StageFailure("bigrade", msg)


def build_bigrading(a: Blockade, k: int, ell: int, c, d, lambda_out, strict: bool = True,
                    params: dict | None = None) -> BiLevelling:
    """Bi-grading of length ``k`` and height ``ell`` with linkage at most ``lambda_out``.

    Starts from an exact-height bi-levelling and repeatedly runs the selective
    cover of M's base, each round fixing one block ``D`` (covered by some ``X``)
    and keeping only later blocks that miss ``X`` and see few vertices of ``D``.
    The per-round state lands in ``provenance["audit"]``.

    Relaxed ``params``: ``ladder`` (``plus-one`` by default), ``exact`` passed
    to the exact-height builder, ``bilevelling`` to start from a given one,
    ``alpha`` / ``eps`` for the selective covers.
    """
    params = dict(params or {})
    c, d, lambda_out = frac(c), frac(d), frac(lambda_out)
    if ell < 3 * ceil(1 / c) + 1:
        raise HypothesisViolation("ell >= 3 ceil(1/c) + 1", f"ell={ell}")
    if k < 1:
        raise HypothesisViolation("k >= 1")
    if not (0 < d <= 1 and 0 < lambda_out <= 1):
        raise HypothesisViolation("0 < d, lambda' <= 1")
    consts = bigrade_constants(k, ell, c, d, lambda_out)
    g = a.host
    n = g.n
    if strict:
        if a.length != consts.length:
            raise HypothesisViolation("blockade length K", f"length {a.length}, K = {consts.length}")
        if linkage(a) > consts.lam:
            raise HypothesisViolation("linkage <= lambda", f"linkage {linkage(a)}")
        delta = Fraction(1, consts.length ** consts.length * power_ceil(n, c))
        _require_not_divergent(a, consts.gamma, delta, params.get("budget", 2_000_000))
        ladder = consts.ladder
        bl = exact_bilevelling(a, ladder[0], c, ell, strict=True,
                               params={"lam": consts.lam, "gamma": consts.gamma})
    else:
        ladder = bigrade_ladder(k, d, params.get("ladder", "plus-one"))
        bl = params.get("bilevelling")
        if bl is None:
            bl = exact_bilevelling(a, ladder[0], c, ell, strict=False, params=params.get("exact"))
        if bl.height != ell or bl.length < ladder[0]:
            raise HypothesisViolation("starting bi-levelling has height ell and length K_0")
        bl = bl.with_blocks(list(range(ladder[0])))
    c0 = [to_mask(vs) for vs in bl.c_sets()]
    base_m = to_mask(bl.M.base)
    current = {i: c0[i] for i in range(ladder[0])}
    chosen: list[int] = []
    d_sets: dict[int, int] = {}
    x_sets: list[int] = []
    audit = []
    for t in range(k):
        idx = sorted(current)
        blk = Blockade.from_sets(g, [tuple(bits(current[i])) for i in idx], indices=idx)
        k_sel = ladder[t + 1] + 1
        if strict:
            alpha = consts.kappa / 8
            eps = consts.lam * 2 ** t / consts.eta
        else:
            alpha = frac(params.get("alpha", Fraction(1, 8 * len(idx) ** k_sel)))
            eps = params.get("eps")
            if eps is None:
                eps = max(Fraction(max_degree_between(g, base_m, m) + 1, popcount(m)) for m in current.values())
            eps = frac(eps)
        try:
            out = selective_cover(bl.M.base, blk, k_sel, d, alpha, eps, strict)
        except HypothesisViolation as err:
            if strict:
                raise
            raise StageFailure("selective", str(err)) from err
        if out.kind == PARTITION:
            first = idx[0]
            x_tuple, j_set = max(out.parts, key=lambda part: (popcount(reach(g, to_mask(part[0])) & current[first]),
                                                              [-v for v in part[0]]))
            nxt = [j for j in j_set if j != first][: ladder[t + 1]]
        else:
            x_tuple, j_set = out.x, out.j
            first = min(j_set)
            nxt = [j for j in j_set if j != first]
        x_mask = to_mask(x_tuple)
        d_mask = reach(g, x_mask) & current[first]
        if not d_mask:
            _fail(strict, 4, f"X covers nothing in block {first}")
        if len(nxt) != ladder[t + 1] or any(i <= first for i in nxt):
            _fail(strict, 1, f"round {t + 1}: next indices {nxt} after {first}")
        cap = lambda_out * popcount(d_mask) / (4 * k)
        survivors = {}
        for i in nxt:
            keep = current[i] & ~reach(g, x_mask)
            keep = to_mask(v for v in bits(keep) if popcount(g.adj_mask(v) & d_mask) <= cap)
            survivors[i] = keep
        ratios = {i: Fraction(popcount(survivors[i]), popcount(current[i])) for i in nxt}
        d_ratio = Fraction(popcount(d_mask), len(a.block(a.block_of()[next(bits(d_mask))])))
        d_floor_ok = None
        if strict:
            d_floor_ok = pow_ge(d_ratio * 2 ** (k + 2 * ell - 1) * consts.length ** consts.length, n, -d)
            if any(r < Fraction(1, 2) for r in ratios.values()):
                _fail(True, 2, f"round {t + 1}: ratios {ratios}")
            if not d_floor_ok:
                _fail(True, 3, f"round {t + 1}: A-size {d_ratio}")
        if any(not m for m in survivors.values()):
            _fail(strict, 2, f"round {t + 1}: a surviving block emptied")
        for h in chosen:
            if max_degree_between(g, d_mask, d_sets[h]) * 4 * k > lambda_out * popcount(d_sets[h]):
                _fail(strict, 5, f"round {t + 1}: towards block {h}")
        audit.append({"round": t + 1, "variant": out.kind, "i": first, "I": nxt,
                      "X": list(bits(x_mask)), "D": list(bits(d_mask)),
                      "C": {str(i): list(bits(m)) for i, m in survivors.items()},
                      "ratios": {str(i): str(r) for i, r in ratios.items()},
                      "d_a_size": str(d_ratio), "d_size_bound_met": d_floor_ok})
        chosen.append(first)
        d_sets[first] = d_mask
        x_sets.append(x_mask)
        current = survivors
    # final pruning against later D blocks
    b_sets = []
    for pos, h in enumerate(chosen):
        keep = [v for v in bits(d_sets[h])
                if all(2 * popcount(g.adj_mask(v) & d_sets[j]) <= lambda_out * popcount(d_sets[j])
                       for j in chosen[pos + 1:])]
        if not keep:
            _fail(strict, 2, f"final pruning emptied block {h}")
        b_sets.append(tuple(keep))
    owner = a.block_of()
    b_blk = Blockade.from_sets(g, b_sets, parents=[owner[s[0]] for s in b_sets])
    lk = linkage(b_blk)
    prov = {"stage": "bigrade", "ladder": list(ladder), "chosen": chosen, "linkage": str(lk),
            "lambda_out": str(lambda_out), "audit": audit, "previous": bl.provenance}
    result = BiLevelling(bl.L, bl.M, b_blk, True, bl.ambient, prov)
    certify("bi-grading", result.violations())
    # the union of the first j chosen X sets is the explicit backwards witness
    acc = 0
    for j in range(k):
        acc |= x_sets[j]
        covered, missed = b_sets[: j + 1], b_sets[j + 1:]
        if any(not reach(g, acc) >> v & 1 for s in covered for v in s) or \
                any(reach(g, acc) >> v & 1 for s in missed for v in s):
            raise CertificationError(f"X_1..X_{j + 1} is not a backwards witness")
    if lk > lambda_out:
        if strict:
            raise CertificationError(f"linkage {lk} exceeds {lambda_out}")
        raise StageFailure("linkage", f"re-measured linkage {lk} exceeds {lambda_out}")
    if strict:
        where = a.block_of()
        for s in b_sets:
            ratio = Fraction(len(s), len(a.block(where[s[0]])))
            if not pow_ge(ratio * 2 ** (k + 2 * ell) * consts.length ** consts.length, n, -d):
                raise CertificationError("A-size below 2^(-k-2ell) K^-K |G|^-d")
    return result
