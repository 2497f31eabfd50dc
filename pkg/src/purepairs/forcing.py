"""Forcing parameters, the constants ledger for handle-built graphs, and the
end-to-end rainbow-copy pipeline.

Every constant is an exact integer or rational.  ``N`` grows like ``K^K`` and
is never materialised: it is kept as a power of two, ``2^m``, and each
inequality about it is recorded in exponent form together with the integer
bound ``K < 2^b`` that justifies the translation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil

from .blockade import Blockade, RainbowEmbedding, find_rainbow_copy, linkage, metrics
from .buildable import BuildCertificate, SearchLimitExceeded, replay, strong_certificate
from .graph import Embedding, Graph, bits, complement, popcount, to_mask
from .machinery import build_bigrading, connecting_path
from .machinery.bigrading import bigrade_constants
from .machinery.structures import CertificationError, HypothesisViolation, StageFailure, frac

# bigrade ladders take one step per block of the target length; past this
# the ladder entries and K^K exponents stop being worth writing down
LADDER_LIMIT = 4096


class LedgerOverflow(ValueError):
    """A constant chain outgrew what the ledger is willing to represent."""


@dataclass(frozen=True, order=True)
class PowerOfTwo:
    exponent: int

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("exponent must be non-negative")

    def at_most(self, n: int) -> bool:
        """``2^m <= n`` without building ``2^m``."""
        return n >= 1 and n.bit_length() - 1 >= self.exponent

    def value(self, limit: int = 1 << 16) -> int:
        if self.exponent > limit:
            raise OverflowError(f"2^{self.exponent} is too large to materialise")
        return 1 << self.exponent

    def __str__(self) -> str:
        return f"2^{self.exponent}"


def approx(x) -> str:
    """Short scientific rendering of a huge integer or rational."""
    x = Fraction(x)
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    exp10 = len(str(x.numerator)) - len(str(x.denominator))
    scaled = x / Fraction(10) ** exp10
    while scaled >= 10:
        scaled /= 10
        exp10 += 1
    while scaled < 1:
        scaled *= 10
        exp10 -= 1
    return f"{sign}{float(scaled):.3f}e{exp10}"


@dataclass(frozen=True)
class ForcingParams:
    N: PowerOfTwo
    K: int
    sigma: Fraction
    lam: Fraction
    c: Fraction

    def __post_init__(self):
        if not isinstance(self.N, PowerOfTwo):
            raise TypeError("N is stored as a PowerOfTwo")
        if self.K < 1:
            raise ValueError("K >= 1")
        if self.lam <= 0:
            raise ValueError("lambda > 0")
        if not 0 < self.sigma < self.c:
            raise ValueError("0 < sigma < c")

    @classmethod
    def from_text(cls, n: str, k: int, sigma, lam, c) -> "ForcingParams":
        """``n`` written as ``2^m``."""
        base, _, exp = n.partition("^")
        if base.strip() != "2" or not exp.strip().isdigit():
            raise ValueError(f"N must be written 2^m, got {n!r}")
        return cls(PowerOfTwo(int(exp)), k, frac(sigma), frac(lam), frac(c))

    def to_json(self) -> dict:
        return {"N": str(self.N), "K": str(self.K), "sigma": str(self.sigma),
                "lambda": str(self.lam), "c": str(self.c)}


_OPS = {">=": Fraction.__ge__, ">": Fraction.__gt__, "<=": Fraction.__le__, "<": Fraction.__lt__}


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: Fraction
    op: str
    rhs: Fraction

    def holds(self) -> bool:
        return _OPS[self.op](Fraction(self.lhs), Fraction(self.rhs))

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": str(self.lhs), "op": self.op, "rhs": str(self.rhs)}

    @classmethod
    def from_json(cls, d: dict) -> "Inequality":
        return cls(d["name"], Fraction(d["lhs"]), d["op"], Fraction(d["rhs"]))


@dataclass(frozen=True)
class LedgerStep:
    tag: str
    inputs: dict
    outputs: dict
    inequalities: tuple[Inequality, ...] = ()
    declared: bool = False  # constants taken as given rather than derived

    def to_json(self) -> dict:
        return {"tag": self.tag, "declared": self.declared, "inputs": self.inputs, "outputs": self.outputs,
                "inequalities": [q.to_json() for q in self.inequalities]}


@dataclass
class ConstantsLedger:
    cert: BuildCertificate | None
    c: Fraction
    sigma: Fraction
    steps: list[LedgerStep] = field(default_factory=list)
    final: ForcingParams | None = None
    base: LedgerStep | None = None

    def record(self, step: LedgerStep) -> LedgerStep:
        self.steps.append(step)
        return step

    def failures(self) -> list[str]:
        """Names of recorded inequalities that do not hold, re-evaluated from the JSON form."""
        out = []
        body = json.loads(self.to_json())
        records = ([("base", body["base"])] if body["base"] else []) + list(enumerate(body["steps"]))
        for i, st in records:
            out += [f"step {i} ({st['tag']}): {q['name']}" for q in st["inequalities"]
                    if not Inequality.from_json(q).holds()]
        return out

    def replay(self) -> "ConstantsLedger":
        if self.cert is None:
            raise ValueError("ledger has no certificate to replay")
        return ledger_chain(self.cert, self.c, self.sigma)

    def to_json(self) -> str:
        body = {"c": str(self.c), "sigma": str(self.sigma),
                "certificate": None if self.cert is None else json.loads(self.cert.to_json()),
                "base": None if self.base is None else self.base.to_json(),
                "steps": [s.to_json() for s in self.steps],
                "final": None if self.final is None else self.final.to_json()}
        return json.dumps(body, sort_keys=True)

    def summary(self) -> dict:
        f = self.final
        return {"steps": len(self.steps), "failures": self.failures(),
                "final": None if f is None else {"N": str(f.N), "K": approx(f.K), "lambda": approx(f.lam),
                                                 "sigma": str(f.sigma), "c": str(f.c)}}


def _mid(a, b) -> Fraction:
    return (Fraction(a) + Fraction(b)) / 2


def _ceil_div(a: Fraction, b: Fraction) -> int:
    return ceil(Fraction(a) / Fraction(b))


def _handle_floor(ell: int) -> int:
    return (ell - 1) // 3


# -- bigrade shrink --------------------------------------------------------

def _bigrade_shrink_step(ell: int, c, sigma, sigma_p, k_p: int, lambda_p) -> LedgerStep:
    c, sigma, sigma_p, lambda_p = frac(c), frac(sigma), frac(sigma_p), frac(lambda_p)
    f = _handle_floor(ell)
    if not sigma < sigma_p:
        raise HypothesisViolation("sigma < sigma'", f"sigma={sigma}, sigma'={sigma_p}")
    if f < 1 or not c > Fraction(1, f):
        raise HypothesisViolation("c > 1/floor((ell-1)/3)", f"ell={ell}, c={c}")
    if k_p < 1 or lambda_p <= 0:
        raise HypothesisViolation("K' >= 1 and lambda' > 0")
    if k_p > LADDER_LIMIT:
        raise LedgerOverflow(f"bigrade ladder of {k_p} steps exceeds {LADDER_LIMIT}")
    c_in = _mid(Fraction(1, f), c)
    d = (sigma_p - sigma) / 2
    lambda_in = min(lambda_p, Fraction(1))
    consts = bigrade_constants(k_p, ell, c_in, d, lambda_in)
    kk, lam = consts.length, consts.lam
    b = kk.bit_length()  # K < 2^b, so K^K < 2^(bK)
    slack = sigma_p - sigma - d
    m = max(_ceil_div(6 + 2 * ell + b, c), _ceil_div(kk * b, c - c_in), _ceil_div(k_p + 2 * ell + kk * b, slack), 0)
    ineqs = (
        Inequality("c' > 1/floor((ell-1)/3)", c_in, ">", Fraction(1, f)),
        Inequality("c > c'", c, ">", c_in),
        Inequality("d > 0", d, ">", Fraction(0)),
        Inequality("d < sigma' - sigma", d, "<", sigma_p - sigma),
        Inequality("K < 2^b", Fraction(kk), "<", Fraction(2) ** b),
        Inequality("log2 N * c >= 6 + 2 ell + b   (N^c >= 2^(6+2ell) K)", m * c, ">=", Fraction(6 + 2 * ell + b)),
        Inequality("log2 N * (c - c') >= K b   (N^(c-c') >= K^K)", m * (c - c_in), ">=", Fraction(kk * b)),
        Inequality("log2 N * (sigma'-sigma-d) >= K' + 2 ell + K b   (N^(sigma'-sigma-d) >= 2^(K'+2ell) K^K)",
                   m * slack, ">=", Fraction(k_p + 2 * ell + kk * b)),
        Inequality("lambda > 0", lam, ">", Fraction(0)),
    )
    return LedgerStep("bigrade-shrink",
                      {"ell": ell, "c": str(c), "sigma": str(sigma), "sigma'": str(sigma_p),
                       "K'": str(k_p), "lambda'": str(lambda_p)},
                      {"c'": str(c_in), "d": str(d), "ladder": [str(x) for x in consts.ladder],
                       "K": str(kk), "lambda": str(lam), "N": str(PowerOfTwo(m))},
                      ineqs)


def ledger_bigrade_shrink(ell: int, c, sigma, sigma_p, K_p: int, lambda_p):
    """``(lambda, N, K)`` for shrinking a bi-grading's blocks down to length ``K_p``.

    ``N`` comes back as a :class:`PowerOfTwo`; ``K`` agrees with
    :func:`bigrade_constants` at the midpoint ``c'`` and ``d = (sigma'-sigma)/2``.
    """
    st = _bigrade_shrink_step(ell, c, sigma, sigma_p, K_p, lambda_p)
    out = st.outputs
    return Fraction(out["lambda"]), PowerOfTwo(int(out["N"][2:])), int(out["K"])


def bigrade_shrink_step(ell: int, c, sigma, sigma_p, K_p: int, lambda_p) -> LedgerStep:
    """The same computation as :func:`ledger_bigrade_shrink`, with its inequalities."""
    return _bigrade_shrink_step(ell, c, sigma, sigma_p, K_p, lambda_p)


# -- the handle chain -------------------------------------------------------

def declared_leaf_cover(k_p: int, sigma, sigma_p, lambda_p, c) -> tuple[Fraction, int, PowerOfTwo]:
    """Stand-in constants for the leaf-covering step, which is not implemented here: ``(lambda', K', 1)``.

    ``K >= K'`` is forced since that step keeps ``K'`` of the ``K`` blocks;
    nothing else about the true constants is known here, so these are
    declared inputs and the ledger marks the node as declared.
    """
    return frac(lambda_p), k_p, PowerOfTwo(0)


def _leaf_cover(led: ConstantsLedger, provider, k_p, sigma, sigma_p, lambda_p, c):
    for cond, ok in (("0 < sigma < sigma' < c", 0 < sigma < sigma_p < c),
                     ("c, lambda' <= 1", c <= 1 and lambda_p <= 1), ("K' >= 0", k_p >= 0)):
        if not ok:
            raise HypothesisViolation(cond, f"sigma={sigma}, sigma'={sigma_p}, c={c}, lambda'={lambda_p}")
    lam, kk, n = provider(k_p, sigma, sigma_p, lambda_p, c)
    led.record(LedgerStep(
        "leaf-cover", {"K'": str(k_p), "sigma": str(sigma), "sigma'": str(sigma_p), "lambda'": str(lambda_p),
                       "c": str(c)},
        {"lambda": str(lam), "K": str(kk), "N": str(n)},
        (Inequality("sigma < sigma'", sigma, "<", sigma_p), Inequality("sigma' < c", sigma_p, "<", c),
         Inequality("K >= K'", Fraction(kk), ">=", Fraction(k_p)), Inequality("lambda > 0", lam, ">", Fraction(0))),
        declared=True))
    return lam, kk, n


def _two_leaves(led, provider, prev: ForcingParams, sigma) -> ForcingParams:
    """Constants forcing ``H''`` (two extra leaves) first-and-last at ``sigma``."""
    c = prev.c
    inner = _mid(sigma, prev.sigma)
    lam2, k2, n2 = _leaf_cover(led, provider, prev.K + 1, inner, prev.sigma, prev.lam, c)
    lam, kk, n = _leaf_cover(led, provider, k2 + 1, sigma, inner, lam2, c)
    out = ForcingParams(max(n, n2), kk, sigma, lam, c)
    led.record(LedgerStep(
        "two-leaves", {"previous": prev.to_json(), "sigma": str(sigma)},
        {"sigma_inner": str(inner), **out.to_json()},
        (Inequality("sigma < sigma_inner", sigma, "<", inner), Inequality("sigma_inner < sigma'", inner, "<", prev.sigma),
         Inequality("log2 N >= log2 N''", Fraction(out.N.exponent), ">=", Fraction(n2.exponent)))))
    return out


def _add_handle(led, prev: ForcingParams, ell: int, sigma) -> ForcingParams:
    c = prev.c
    f = _handle_floor(ell)
    if f < 1 or not c - sigma > Fraction(1, f):
        raise HypothesisViolation("c - sigma > 1/floor((ell-1)/3)", f"ell={ell}, c={c}, sigma={sigma}")
    shrink = led.record(_bigrade_shrink_step(ell, c - sigma, sigma, prev.sigma, prev.K, prev.lam))
    n = PowerOfTwo(max(int(shrink.outputs["N"][2:]), prev.N.exponent))
    out = ForcingParams(n, int(shrink.outputs["K"]), sigma, Fraction(shrink.outputs["lambda"]), c)
    led.record(LedgerStep(
        "add-handle", {"previous": prev.to_json(), "ell": ell, "sigma": str(sigma)}, out.to_json(),
        (Inequality("sigma < sigma'", sigma, "<", prev.sigma),
         Inequality("c - sigma > 1/floor((ell-1)/3)", c - sigma, ">", Fraction(1, f)),
         Inequality("log2 N >= log2 N'", Fraction(n.exponent), ">=", Fraction(prev.N.exponent)))))
    return out


def _add_real_handle(led, provider, prev: ForcingParams, length: int, sigma) -> ForcingParams:
    ell = length - 2
    mid = _mid(sigma, prev.sigma)
    leaves = _two_leaves(led, provider, prev, mid)
    out = _add_handle(led, leaves, ell, sigma)
    led.record(LedgerStep(
        "add-real-handle", {"previous": prev.to_json(), "handle_length": length, "ell": ell, "sigma": str(sigma)},
        {"sigma''": str(mid), **out.to_json()},
        (Inequality("sigma < sigma''", sigma, "<", mid), Inequality("sigma'' < sigma'", mid, "<", prev.sigma))))
    return out


BASE_LAMBDA = Fraction(1, 2)


def chain_threshold(beta: int) -> Fraction:
    """The least admissible ``c - sigma`` (exclusive) for handles of length ``beta``."""
    f = (beta - 3) // 3
    if f < 1:
        raise HypothesisViolation("beta >= 6 so that floor((beta-3)/3) >= 1", f"beta={beta}")
    return Fraction(1, f)


def ledger_chain(cert: BuildCertificate, c, sigma, leaf_cover=declared_leaf_cover) -> ConstantsLedger:
    """Walk a strong certificate's handles, emitting forcing constants per stage.

    The sigma for each smaller graph is the midpoint between the current
    sigma and ``c - threshold``; all other free choices are midpoints too.
    ``leaf_cover`` supplies the external leaf-covering constants.
    """
    c, sigma = frac(c), frac(sigma)
    if cert.mode != "strong":
        raise HypothesisViolation("strong-mode certificate", f"mode={cert.mode}")
    if any(st.op != "handle" for st in cert.steps):
        raise HypothesisViolation("strong certificates contain only handle steps")
    replay(cert)
    if c <= 0:
        raise HypothesisViolation("c > 0")
    if cert.steps:
        th = chain_threshold(cert.beta)
        if not c - sigma > th:
            raise HypothesisViolation("c - sigma > 1/floor((beta-3)/3)", f"c - sigma = {c - sigma}, threshold {th}")
    if sigma <= 0:
        raise HypothesisViolation("sigma > 0", f"sigma={sigma}")
    led = ConstantsLedger(cert, c, sigma)
    steps = cert.steps
    sigmas = [sigma]
    if steps:
        upper = c - chain_threshold(cert.beta)
        for _ in steps:
            sigmas.append(_mid(sigmas[-1], upper))
    sigmas.reverse()  # sigmas[i] belongs to the graph after i handles
    params = ForcingParams(PowerOfTwo(0), 2, sigmas[0], BASE_LAMBDA, c)
    led.base = (LedgerStep("base", {"vertices": 2, "sigma": str(sigmas[0]), "c": str(c)}, params.to_json(),
                          (Inequality("lambda < 1", BASE_LAMBDA, "<", Fraction(1)),
                           Inequality("sigma < c", sigmas[0], "<", c))))
    for i, st in enumerate(steps):
        params = _add_real_handle(led, leaf_cover, params, st.length, sigmas[i + 1])
    led.final = params
    return led


def handle_steps(led: ConstantsLedger) -> int:
    return sum(1 for st in led.steps if st.tag == "add-real-handle")


# -- epsilon ----------------------------------------------------------------

@dataclass(frozen=True)
class SparseEpsilon:
    eps: Fraction
    t: int
    sigma: Fraction
    inequalities: tuple[Inequality, ...]
    ledger: ConstantsLedger

    def to_json(self) -> dict:
        return {"eps": f"2^-{self.t}", "sigma": str(self.sigma),
                "inequalities": [q.to_json() for q in self.inequalities],
                "final": None if self.ledger.final is None else self.ledger.final.to_json()}


def _least_power_at_least(x: Fraction) -> int:
    """Least ``t >= 0`` with ``2^t >= x``."""
    x = Fraction(x)
    if x <= 1:
        return 0
    return (ceil(x) - 1).bit_length()


def epsilon_for_sparse(cert: BuildCertificate, c, leaf_cover=declared_leaf_cover) -> SparseEpsilon:
    """Largest ``eps = 2^-t`` with ``eps <= 1/K``, ``eps^sigma <= 1/(2K)``, ``eps <= lambda/(2K)``."""
    c = frac(c)
    beta = cert.beta
    if c <= 0:
        raise HypothesisViolation("c > 0")
    th = chain_threshold(beta)
    if not c > th:
        raise HypothesisViolation("c > 1/floor((beta-3)/3)", f"c={c}, threshold={th}")
    sigma = (c - th) / 2
    led = ledger_chain(cert, c, sigma, leaf_cover)
    kk, lam = led.final.K, led.final.lam
    p, q = sigma.numerator, sigma.denominator
    # 2^(-t sigma) <= 1/(2K)  iff  2^(t p) >= (2K)^q
    e0 = ((2 * kk) ** q - 1).bit_length()
    t = max(_least_power_at_least(Fraction(kk)), -(-e0 // p), _least_power_at_least(2 * kk / lam))
    eps = Fraction(1, 2 ** t)
    ineqs = (
        Inequality("eps <= 1/K", eps, "<=", Fraction(1, kk)),
        Inequality("t sigma >= log2 (2K)^q / q   (eps^sigma <= 1/(2K))", Fraction(t * p), ">=", Fraction(e0)),
        Inequality("(2K)^q <= 2^(t p)", Fraction((2 * kk) ** q), "<=", Fraction(2) ** (t * p)),
        Inequality("eps <= lambda/(2K)", eps, "<=", lam / (2 * kk)),
    )
    return SparseEpsilon(eps, t, sigma, ineqs, led)


# -- the rainbow-copy pipeline -----------------------------------------------

@dataclass(frozen=True)
class ForceOutcome:
    embedding: RainbowEmbedding | None
    method: str  # "pipeline", "base", "exhaustive" or "none"
    diagnostics: tuple[str, ...] = ()

    @property
    def found(self) -> bool:
        return self.embedding is not None

    def to_json(self) -> dict:
        emb = self.embedding
        return {"found": self.found, "method": self.method, "diagnostics": list(self.diagnostics),
                "map": None if emb is None else list(emb.emb.map),
                "blocks": None if emb is None else list(emb.block_of)}


def verify_rainbow(a: Blockade, h: Graph, image) -> RainbowEmbedding | None:
    """Independent check: ``image`` is an induced copy of ``h`` with one vertex per block of ``a``."""
    g = a.host
    image = tuple(image)
    if len(image) != h.n or len(set(image)) != h.n:
        return None
    for u, v in combinations(range(h.n), 2):
        if g.has_edge(image[u], image[v]) != h.has_edge(u, v):
            return None
    where = a.block_of()
    blocks = tuple(where.get(x) for x in image)
    if None in blocks or len(set(blocks)) != len(blocks):
        return None
    return RainbowEmbedding(Embedding(image), blocks)


def _pipeline(a: Blockade, h: Graph, cert: BuildCertificate, params: ForcingParams | None,
              strict: bool, options: dict) -> RainbowEmbedding:
    g = a.host
    last = cert.steps[-1]
    u, v = last.ends
    internal = last.internal or tuple(range(h.n - last.length + 1, h.n))
    rest = [x for x in range(h.n) if x not in set(internal)]
    h_prev = h.induced(rest)
    pos = {x: i for i, x in enumerate(rest)}
    ell = last.length - 2
    c_eff = (params.c - params.sigma) if params is not None else frac(options.get("c", 1))
    if strict:
        k_blocks = params.K if params is not None else h_prev.n
        bl = build_bigrading(a, k_blocks, ell, c_eff, options.get("d", Fraction(1, 2)),
                             options.get("lambda_out", 1), strict=True, params=options.get("bigrade"))
    else:
        bl = build_bigrading(a, options.get("k", h_prev.n), ell, c_eff, options.get("d", 1),
                             options.get("lambda_out", 1), strict=False, params=options.get("bigrade"))
    inner = find_rainbow_copy(bl.C, h_prev, first=pos[u], last=pos[v])
    if inner is None:
        raise StageFailure("inner-copy", "no first-and-last copy of the smaller graph in the bi-grading blocks")
    image = inner.emb.map
    pu, pv = image[pos[u]], image[pos[v]]
    others_u = to_mask(x for x in image if x != pu)
    others_v = to_mask(x for x in image if x != pv)
    xs = [x for x in bl.M.base if g.has_edge(x, pu) and not g.adj_mask(x) & others_u]
    ys = [y for y in bl.L.base if g.has_edge(y, pv) and not g.adj_mask(y) & others_v]
    if not xs or not ys:
        raise StageFailure("attach", f"{len(xs)} candidate(s) in M's base, {len(ys)} in L's base")
    path = connecting_path(bl, xs[0], ys[0])
    if len(path) != len(internal):
        raise CertificationError(f"connecting path has {len(path)} vertices, handle needs {len(internal)}")
    full = [0] * h.n
    for x in rest:
        full[x] = image[pos[x]]
    for x, y in zip(internal, path):
        full[x] = y
    emb = verify_rainbow(a, h, full)
    if emb is None:
        raise CertificationError("assembled copy is not an induced rainbow copy")
    return emb


def _strict_hypotheses(a: Blockade, params: ForcingParams) -> list[str]:
    bad = []
    n = a.host.n
    if not params.N.at_most(n):
        bad.append(f"|G| = {n} < N = {params.N}")
    if a.length != params.K:
        bad.append(f"length {a.length} != K = {params.K}")
    if linkage(a) > params.lam:
        bad.append(f"linkage {linkage(a)} > lambda")
    if not metrics(a).shrinkage.at_most(params.sigma):
        bad.append(f"shrinkage above sigma = {params.sigma}")
    return bad


def force_rainbow_copy(g: Graph, a: Blockade, h: Graph, cert: BuildCertificate,
                       params: ForcingParams | None = None, mode: str = "relaxed",
                       options: dict | None = None) -> ForceOutcome:
    """Find an ``a``-rainbow induced copy of ``h`` by bi-grading and connecting path.

    The last handle of ``cert`` is re-attached through a bi-grading: a copy of
    the smaller graph is placed first-and-last in its blocks, and the handle
    runs out through M's base, over the apex and back in through L's base.
    Relaxed mode falls back to exhaustive search when a stage fails; strict
    mode checks the measurable hypotheses on ``a`` and never falls back.
    Returned embeddings are always re-verified.
    """
    if mode not in ("strict", "relaxed"):
        raise ValueError(f"unknown mode {mode!r}")
    if a.host is not g:
        raise ValueError("blockade must live in g")
    if replay(cert) != h:
        raise ValueError("certificate does not build h")
    options = dict(options or {})
    strict = mode == "strict"
    notes: list[str] = []
    if strict:
        if params is None:
            return ForceOutcome(None, "none", ("strict mode needs forcing parameters",))
        bad = _strict_hypotheses(a, params)
        notes.append("coherence of g is assumed, not checked")
        if bad:
            return ForceOutcome(None, "none", tuple(notes + [f"hypothesis: {b}" for b in bad]))
    if not cert.steps:
        found = find_rainbow_copy(a, h)
        emb = None if found is None else verify_rainbow(a, h, found.emb.map)
        return ForceOutcome(emb, "base" if emb else "none", tuple(notes + ["two-vertex base graph"]))
    try:
        emb = _pipeline(a, h, cert, params, strict, options)
        return ForceOutcome(emb, "pipeline", tuple(notes))
    except (StageFailure, HypothesisViolation, CertificationError) as err:
        notes.append(f"pipeline: {type(err).__name__}: {err}")
    if strict:
        return ForceOutcome(None, "none", tuple(notes))
    found = find_rainbow_copy(a, h)
    if found is None:
        return ForceOutcome(None, "none", tuple(notes + ["exhaustive search: no rainbow copy"]))
    emb = verify_rainbow(a, h, found.emb.map)
    if emb is None:
        raise CertificationError("exhaustive search returned an invalid copy")
    return ForceOutcome(emb, "exhaustive", tuple(notes))


def force_pattern(g: Graph, a: Blockade, h: Graph, cert: BuildCertificate | None = None,
                  params: ForcingParams | None = None, mode: str = "relaxed",
                  options: dict | None = None) -> ForceOutcome:
    """:func:`force_rainbow_copy` for any labelling of ``h``.

    Without ``cert`` a handle-only certificate is searched for (lengths >= 2)
    and ``h`` is relabelled to match it; the copy is mapped back and
    re-verified against ``h`` itself.
    """
    if cert is not None:
        return force_rainbow_copy(g, a, h, cert, params, mode, options)
    try:
        found = strong_certificate(h, 2)
    except SearchLimitExceeded:
        found = None
    if found is None:
        if mode == "strict":
            return ForceOutcome(None, "none", ("no strong certificate for the pattern",))
        hit = find_rainbow_copy(a, h)
        emb = None if hit is None else verify_rainbow(a, h, hit.emb.map)
        return ForceOutcome(emb, "exhaustive" if emb else "none", ("no strong certificate for the pattern",))
    cert, relabel = found
    out = force_rainbow_copy(g, a, replay(cert), cert, params, mode, options)
    if out.embedding is None:
        return out
    emb = verify_rainbow(a, h, [out.embedding.emb.map[relabel[v]] for v in range(h.n)])
    if emb is None:
        raise CertificationError("relabelled copy does not verify")
    return ForceOutcome(emb, out.method, out.diagnostics)


# -- sparse reduction ---------------------------------------------------------

@dataclass(frozen=True)
class SparseReduction:
    x: tuple[int, ...] | None
    side: str | None  # "graph" or "complement"
    method: str
    verdict: str  # "found" or "inconclusive"

    def to_json(self) -> dict:
        return {"x": None if self.x is None else list(self.x), "side": self.side,
                "method": self.method, "verdict": self.verdict}


def sparse_within(g: Graph, mask: int, eta) -> bool:
    size = popcount(mask)
    return size > 0 and all(popcount(g.adj_mask(v) & mask) < eta * size for v in bits(mask))


def _prune(g: Graph, eta) -> int:
    mask = g.all_mask
    while mask and not sparse_within(g, mask, eta):
        mask &= ~(1 << max(bits(mask), key=lambda v: (popcount(g.adj_mask(v) & mask), -v)))
    return mask


def _grow(g: Graph, eta) -> int:
    """Add vertices of fewest neighbours in the current set while staying sparse."""
    best = mask = 0
    free = g.all_mask
    while free:
        v = min(bits(free), key=lambda x: (popcount(g.adj_mask(x) & mask), x))
        free &= ~(1 << v)
        mask |= 1 << v
        if sparse_within(g, mask, eta):
            best = mask
    return best


def reduce_to_sparse(g: Graph, eta, budget: int = 200_000, limit: int = 16,
                     min_size: int = 2) -> SparseReduction:
    """Large ``X`` with ``G[X]`` or its complement eta-sparse (degrees ``< eta |X|``).

    Greedy pruning and greedy growth on both sides, then an exhaustive
    downward scan by size for ``n <= limit``.  Missing ``min_size`` is
    reported as inconclusive, never as a refutation.
    """
    eta = frac(eta)
    if eta <= 0:
        raise ValueError("eta must be positive")
    sides = (("graph", g), ("complement", complement(g)))
    best = (0, None)
    for name, side in sides:
        for mask in (_prune(side, eta), _grow(side, eta)):
            if popcount(mask) > popcount(best[0]):
                best = (mask, name)
    method = "greedy"
    n = g.n
    if n <= limit:
        spent = 0
        for size in range(n, popcount(best[0]), -1):
            hit = None
            for combo in combinations(range(n), size):
                spent += 1
                if spent > budget:
                    break
                mask = to_mask(combo)
                hit = next((name for name, side in sides if sparse_within(side, mask, eta)), None)
                if hit:
                    best = (mask, hit)
                    break
            if hit or spent > budget:
                break
        method = "exhaustive" if spent <= budget else "greedy+partial-exhaustive"
    mask, side = best
    if popcount(mask) < min_size:
        return SparseReduction(None, None, method, "inconclusive")
    return SparseReduction(tuple(bits(mask)), side, method, "found")
