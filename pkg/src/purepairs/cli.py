"""Batch experiment driver: subcommands, deterministic reports, campaigns."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import platform
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from . import __version__
from .blockade import equipartition, find_rainbow_copy, is_divergent, metrics
from .buildable import (
    BuildCertificate, CongestionTooLarge, PeelStuck, embed_in_buildable, longbranch_witness,
    random_strong_certificate, replay,
)
from .congestion import congestion
from .forcing import ForcingParams, force_pattern, ledger_chain
from .graph import (
    Graph, complement, contains, count_induced_copies, cycle_graph, find_pure_pair, gnp, load_graph, named_graph,
)
from .machinery import (
    CertificationError, HypothesisViolation, StageFailure, build_bigrading, connecting_path, find_induced_cycle,
    iter_bilevellings, synthetic_blockade,
)
from .machinery.synthetic import synthetic_bilevelling
from . import checks

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def trial_seed(master: int, index: int) -> int:
    digest = hashlib.blake2b(f"{master}:{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def run_metadata(seed: int, params: dict) -> dict:
    return {"tool": "purepairs", "version": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "networkx": nx.__version__, "seed": seed, "params": params}


@dataclass
class Report:
    kind: str
    meta: dict
    trials: list[dict] = field(default_factory=list)
    properties: dict[str, dict] = field(default_factory=dict)

    def check(self, name: str, passed: bool, tolerance: str, **observed) -> None:
        self.properties[name] = {"passed": bool(passed), "tolerance": tolerance, **observed}

    @property
    def passed(self) -> bool:
        return all(p["passed"] for p in self.properties.values())

    def schema_errors(self) -> list[str]:
        errors = []
        if not isinstance(self.kind, str) or not isinstance(self.meta, dict) or "seed" not in self.meta:
            errors.append("kind/meta malformed")
        if not all(isinstance(t, dict) for t in self.trials):
            errors.append("trial records must be objects")
        for name, prop in self.properties.items():
            if not isinstance(prop.get("passed"), bool) or not isinstance(prop.get("tolerance"), str):
                errors.append(f"property {name} lacks a pass flag or tolerance")
        return errors

    def to_dict(self) -> dict:
        return {"kind": self.kind, "meta": self.meta, "trials": self.trials,
                "properties": self.properties, "passed": self.passed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = sorted({k for t in self.trials for k in t})
        w.writerow(["trial", *cols])
        for i, t in enumerate(self.trials):
            w.writerow([i, *(_cell(t.get(k)) for k in cols)])
        w.writerow([])
        w.writerow(["property", "passed", "tolerance", "observed"])
        for name in sorted(self.properties):
            prop = self.properties[name]
            rest = {k: v for k, v in prop.items() if k not in ("passed", "tolerance")}
            w.writerow([name, prop["passed"], prop["tolerance"], _cell(rest)])
        return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(v, sort_keys=True)
    return "" if v is None else str(v)


def _load(spec: str) -> Graph:
    if os.path.exists(spec):
        return load_graph(spec)
    try:
        return named_graph(spec)
    except ValueError as err:
        raise UsageError(f"{spec!r} is neither a file nor a named graph ({err})") from err


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as err:
        raise UsageError(f"not a rational: {text!r}") from err


# -- counterexample experiment ---------------------------------------------

@dataclass(frozen=True)
class CounterexampleConfig:
    h: Graph
    j: Graph
    j_prime: Graph
    c: Fraction
    d: Fraction
    n: int
    trials: int
    seed: int = 0
    pair_size: int = 6
    budget: int = 2_000_000

    @staticmethod
    def density_gap(g: Graph) -> Fraction:
        """``(|V|-1)/|E|``; witnesses need this below ``1 - c``."""
        if g.m == 0:
            raise ValueError("witness graph needs an edge")
        return Fraction(g.n - 1, g.m)

    @property
    def c_prime(self) -> Fraction:
        return 1 - max(self.density_gap(self.j), self.density_gap(self.j_prime))

    def validate(self) -> None:
        if contains(self.h, self.j) is None:
            raise ValueError("j is not an induced subgraph of h")
        if contains(complement(self.h), self.j_prime) is None:
            raise ValueError("j_prime is not an induced subgraph of complement(h)")
        for name, w in (("j", self.j), ("j_prime", self.j_prime)):
            if not w.n - 1 < (1 - self.c) * w.m:
                raise ValueError(f"{name} misses |V|-1 < (1-c)|E|")
        if not self.c < self.d < self.c_prime:
            raise ValueError(f"need c < d < c' = {self.c_prime}, got d = {self.d}")
        if self.n < 1 or self.trials < 0 or self.pair_size < 1:
            raise ValueError("n >= 1, trials >= 0, pair_size >= 1")

    @classmethod
    def for_pattern(cls, h: Graph, c, n: int, trials: int, seed: int = 0, d=None, **kw) -> "CounterexampleConfig":
        """Witnesses ``J = h`` and ``J' = complement(h)``, ``d`` the midpoint of ``(c, c')`` by default."""
        c = Fraction(c)
        probe = cls(h, h, complement(h), c, c, n, trials, seed, **kw)
        d = Fraction(d) if d is not None else (c + probe.c_prime) / 2
        return cls(h, h, complement(h), c, d, n, trials, seed, **kw)

    def edge_probability(self) -> float:
        return float(self.n) ** float(self.d - 1)

    def to_json(self) -> dict:
        return {"h": self.h.to_edgelist(), "j": self.j.to_edgelist(), "j_prime": self.j_prime.to_edgelist(),
                "c": str(self.c), "d": str(self.d), "c_prime": str(self.c_prime), "n": self.n,
                "trials": self.trials, "pair_size": self.pair_size, "budget": self.budget,
                "p": self.edge_probability()}


def _delete_copies(g: Graph, patterns: list[Graph]) -> list[int]:
    """Drop the lowest-index vertex of any copy, rescanning until none is left."""
    kept = list(range(g.n))
    while True:
        sub = g.induced(kept)
        hit = next((e for e in (contains(sub, p) for p in patterns) if e is not None), None)
        if hit is None:
            return kept
        kept.pop(min(hit.map))


def _counterexample_trial(cfg: CounterexampleConfig, index: int) -> dict:
    seed = trial_seed(cfg.seed, index)
    g = gnp(cfg.n, cfg.edge_probability(), seed)
    # copies of J' in the complement are copies of complement(J') in g
    jp_bar = complement(cfg.j_prime)
    kept = _delete_copies(g, [cfg.j, jp_bar])
    sub = g.induced(kept)
    j_free = contains(sub, cfg.j) is None
    jp_free = contains(complement(sub), cfg.j_prime) is None
    pair = find_pure_pair(sub, cfg.pair_size, cfg.budget) if sub.n >= 2 * cfg.pair_size else None
    return {"trial": index, "seed": seed, "edges": g.m,
            "copies_j": count_induced_copies(g, cfg.j), "copies_j_prime": count_induced_copies(g, jp_bar),
            "deleted": cfg.n - len(kept), "over_half": 2 * (cfg.n - len(kept)) > cfg.n,
            "j_free": j_free, "j_prime_free": jp_free,
            "pure_pair": "verified-absent" if pair is None else pair.verdict,
            "pure_pair_kind": None if pair is None or pair.pair is None else pair.pair.kind}


def counterexample_experiment(cfg: CounterexampleConfig, jobs: int = 1, pair_free_rate: float = 0.9) -> Report:
    """Sparse random graphs with few copies of J, J' deleted; check freeness and pure-pair absence."""
    cfg.validate()
    report = Report("counterexample", run_metadata(cfg.seed, cfg.to_json()))
    if jobs > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(jobs) as pool:
            trials = list(pool.map(_counterexample_trial, [cfg] * cfg.trials, range(cfg.trials)))
    else:
        trials = [_counterexample_trial(cfg, i) for i in range(cfg.trials)]
    report.trials = sorted(trials, key=lambda t: t["trial"])
    count = len(trials)
    free = sum(t["j_free"] and t["j_prime_free"] for t in trials)
    report.check("post-deletion graph is J-free and J'-free", free == count, "100% of trials, exhaustive search",
                  observed=free, trials=count)
    absent = sum(t["pure_pair"] == "verified-absent" for t in trials)
    rate = absent / count if count else 1.0
    report.check(f"no pure pair with both sides >= {cfg.pair_size}", rate >= pair_free_rate,
                 f">= {pair_free_rate:.0%} of trials verified absent by exact search", observed=absent,
                 inconclusive=sum(t["pure_pair"] == "inconclusive" for t in trials), trials=count)
    report.check("deletions stay within n/2", True, "informational: flagged, not failed",
                 flagged=sum(t["over_half"] for t in trials), trials=count)
    return report


# -- campaign suites ---------------------------------------------------------

def _suite_congestion(params: dict, seed: int, report: Report) -> None:
    rng = random.Random(seed)
    bad = 0
    for i in range(params.get("count", 200)):
        n = rng.randint(2, params.get("max_n", 8))
        g = gnp(n, rng.random(), trial_seed(seed, i))
        a, b = congestion(g, "exhaustive").value, congestion(g, "parametric-cut").value
        bad += a != b
        report.trials.append({"n": n, "edges": g.m, "exhaustive": str(a), "parametric": str(b)})
    report.check("exhaustive equals parametric-cut", bad == 0, "exact equality", mismatches=bad)


def _suite_forest(params: dict, seed: int, report: Report) -> None:
    rng = random.Random(seed)
    bad = 0
    for i in range(params.get("count", 200)):
        n = rng.randint(2, 12)
        g = gnp(n, rng.choice([0.1, 0.2, 0.4]), trial_seed(seed, i))
        forest = nx.is_forest(g.to_networkx())
        zero = congestion(g, "parametric-cut").value == 0
        bad += forest != zero
        report.trials.append({"n": n, "edges": g.m, "forest": forest, "zero_congestion": zero})
    report.check("congestion is zero exactly on forests", bad == 0, "exact", mismatches=bad)


def _suite_cycles(params: dict, seed: int, report: Report) -> None:
    bad = 0
    for k in range(3, params.get("max_k", 12) + 1):
        v = congestion(cycle_graph(k)).value
        bad += v != Fraction(1, k)
        report.trials.append({"k": k, "congestion": str(v)})
    report.check("congestion(C_k) = 1/k", bad == 0, "exact equality", mismatches=bad)


def _suite_buildable(params: dict, seed: int, report: Report) -> None:
    rng = random.Random(seed)
    bad = 0
    for _ in range(params.get("count", 100)):
        beta = rng.randint(3, 8)
        cert = random_strong_certificate(beta, params.get("max_vertices", 40), rng)
        value = congestion(replay(cert), "parametric-cut").value
        bad += value > Fraction(1, beta)
        report.trials.append({"beta": beta, "handles": len(cert.steps), "congestion": str(value)})
    report.check("strongly beta-buildable implies congestion <= 1/beta", bad == 0, "exact", violations=bad)


def _suite_force(params: dict, seed: int, report: Report) -> None:
    rng = random.Random(seed)
    bad = found = 0
    for i in range(params.get("count", 200)):
        n = rng.randint(2, 12)
        g = gnp(n, rng.random(), trial_seed(seed, i))
        a = equipartition(g, rng.randint(1, n))
        cert = random_strong_certificate(2, 5, rng)
        h = replay(cert)
        out = force_pattern(g, a, h, cert=cert)
        oracle = find_rainbow_copy(a, h) is not None
        bad += out.found != oracle
        found += out.found
        report.trials.append({"n": n, "blocks": a.length, "pattern_n": h.n, "found": out.found,
                              "method": out.method, "oracle": oracle})
    report.check("relaxed verdict equals exhaustive search", bad == 0, "exact agreement", mismatches=bad, found=found)


def _suite_ledger(params: dict, seed: int, report: Report) -> None:
    from .buildable import BuildStep

    beta = params.get("beta", 15)
    cert = BuildCertificate(beta, "strong", (BuildStep("handle", ends=(0, 1), length=beta,
                                                       internal=tuple(range(2, beta + 1))),))
    c = Fraction(params.get("c", "1/2"))
    sigma = (c - Fraction(1, (beta - 3) // 3)) / 2
    led = ledger_chain(cert, c, sigma)
    again = led.replay()
    report.trials.append({"beta": beta, "c": str(c), "sigma": str(sigma), **led.summary()})
    report.check("every recorded inequality holds", not led.failures(), "exact rational arithmetic",
                 failures=led.failures())
    report.check("replay is bit-identical", again.to_json() == led.to_json(), "byte equality")


def machinery_run(seed: int) -> dict:
    """One relaxed pass over the constructions on seeded synthetic instances.

    Every structure produced is re-checked by the independent checkers and
    every connecting path is measured against the structure's height.
    """
    out = {"seed": seed, "structures": 0, "violations": [], "paths": 0, "path_mismatch": 0, "stages": []}

    def audit(bl):
        out["structures"] += 1
        problems = bl.violations()
        g = bl.C.host
        problems += checks.levelling_violations(g, bl.L.layers) + checks.levelling_violations(g, bl.M.layers)
        out["violations"] += problems
        x, y = bl.M.base[0], bl.L.base[0]
        path = connecting_path(bl, x, y)
        out["paths"] += 1
        if len(path) - 1 != bl.height or checks.induced_path_violations(g, path, bl.height):
            out["path_mismatch"] += 1

    a = synthetic_blockade(seed, 12, 12, 3.0, 4, 0.5)
    try:
        audit(next(iter_bilevellings(a, None, 1, False, {"apex_attempts": 6})))
    except (StageFailure, HypothesisViolation) as err:
        out["stages"].append(f"bilevelling: {err}")
    a2, bl2 = synthetic_bilevelling(seed)
    audit(bl2)
    try:
        audit(build_bigrading(a2, 2, bl2.height, 1, 1, 1, strict=False, params={"bilevelling": bl2}))
    except (StageFailure, HypothesisViolation) as err:
        out["stages"].append(f"bigrading: {err}")
    return out


def _suite_machinery(params: dict, seed: int, report: Report) -> None:
    total = bad = paths = mismatch = 0
    for i in range(params.get("count", 50)):
        try:
            rec = machinery_run(trial_seed(seed, i) % (2 ** 31))
        except CertificationError as err:
            rec = {"structures": 0, "violations": [f"certification: {err}"], "paths": 0, "path_mismatch": 0}
        total += rec["structures"]
        bad += bool(rec["violations"])
        paths += rec["paths"]
        mismatch += rec["path_mismatch"]
        report.trials.append(rec)
    report.check("every structure passes its checker", bad == 0, "zero failures", structures=total, failing_runs=bad)
    report.check("connecting path length equals height", mismatch == 0, "100% of paths", paths=paths,
                 mismatches=mismatch)


def _suite_counterexample(params: dict, seed: int, report: Report) -> None:
    cfg = CounterexampleConfig.for_pattern(cycle_graph(5), Fraction(1, 10), params.get("n", 20),
                                           params.get("trials", 10), seed)
    inner = counterexample_experiment(cfg)
    report.trials = inner.trials
    report.properties = inner.properties


SUITES = {
    "congestion-oracle-agreement": _suite_congestion,
    "forest-characterization": _suite_forest,
    "cycle-values": _suite_cycles,
    "buildable-congestion": _suite_buildable,
    "force-oracle": _suite_force,
    "ledger-replay": _suite_ledger,
    "machinery-invariants": _suite_machinery,
    "counterexample": _suite_counterexample,
}


def campaign(suite: str, params: dict | None = None, seed: int = 0) -> Report:
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; known: {', '.join(sorted(SUITES))}")
    params = dict(params or {})
    report = Report(f"campaign:{suite}", run_metadata(seed, params))
    SUITES[suite](params, seed, report)
    return report


# -- subcommands -----------------------------------------------------------------

def cmd_congestion(args) -> Report:
    g = _load(args.graph)
    report = Report("congestion", run_metadata(args.seed, {"graph": args.graph, "method": args.method}))
    methods = ["exhaustive", "parametric-cut"] if args.method == "both" else [args.method]
    values = {}
    for m in methods:
        r = congestion(g, m)
        values[m] = r.value
        report.trials.append({"method": m, "congestion": str(r.value), "gamma": None if r.gamma is None else str(r.gamma),
                              "witness": r.witness, "witness_checks": r.check(g)})
    report.check("witness recomputes the value", all(t["witness_checks"] for t in report.trials), "exact")
    if len(values) > 1:
        report.check("methods agree", len(set(values.values())) == 1, "exact equality")
    return report


def cmd_buildable(args) -> Report:
    g = _load(args.graph)
    xi = _frac(args.xi)
    report = Report("buildable", run_metadata(args.seed, {"graph": args.graph, "xi": str(xi), "embed": args.embed}))
    try:
        cert = longbranch_witness(g, xi)
    except CongestionTooLarge as err:
        raise UsageError(str(err)) from err
    except PeelStuck as err:
        report.trials.append({"certificate": None, "error": str(err)})
        report.check("weak certificate exists", False, "exact peel search")
        return report
    rebuilt = replay(cert)
    report.trials.append({"certificate": json.loads(cert.to_json()), "replays_exactly": rebuilt == g})
    report.check("certificate replays to the input", rebuilt == g, "exact graph equality")
    if args.embed:
        host, strong, emb = embed_in_buildable(g, cert.beta, cert)
        ok = replay(strong) == host and emb.is_induced(host, g)
        report.trials.append({"host_n": host.n, "strong": json.loads(strong.to_json()), "embedding": list(emb.map)})
        report.check("strong host contains the input induced", ok, "exact")
    return report


def cmd_blockade(args) -> Report:
    g = _load(args.graph)
    a = equipartition(g, args.blocks)
    met = metrics(a)
    report = Report("blockade", run_metadata(args.seed, {"graph": args.graph, "blocks": args.blocks}))
    rec = {"length": met.length, "width": met.width, "linkage": str(met.linkage),
           "shrinkage": round(met.shrinkage.sigma, 12)}
    if args.gamma is not None and args.delta is not None:
        div = is_divergent(a, _frac(args.gamma), _frac(args.delta), args.budget)
        rec["divergence"] = div.verdict
    if args.pattern:
        h = _load(args.pattern)
        emb = find_rainbow_copy(a, h)
        rec["rainbow_copy"] = None if emb is None else list(emb.emb.map)
        if emb is not None:
            report.check("rainbow copy verifies", emb.is_valid(a, h), "exact")
    report.trials.append(rec)
    return report


def cmd_machinery(args) -> Report:
    report = Report("machinery", run_metadata(args.seed, {"runs": args.runs}))
    for i in range(args.runs):
        rec = machinery_run(args.seed + i)
        report.trials.append(rec)
    report.check("every structure passes its checker", not any(t["violations"] for t in report.trials), "zero failures",
                 structures=sum(t["structures"] for t in report.trials))
    report.check("connecting path length equals height", not any(t["path_mismatch"] for t in report.trials),
                 "100% of paths")
    if args.cycle is not None:
        a = synthetic_blockade(3, 16, 12, 3.0, 4, 0.5)
        res = find_induced_cycle(a.host, args.cycle, 1, params={"blocks": 16, "build": {"apex_attempts": 24}})
        report.trials.append({"cycle_length": args.cycle, **res.to_json()})
    return report


def cmd_ledger(args) -> Report:
    with open(args.certfile) as fh:
        cert = BuildCertificate.from_json(fh.read())
    c = _frac(args.c)
    if args.sigma is not None:
        sigma = _frac(args.sigma)
    else:
        if (cert.beta - 3) // 3 < 1:
            raise UsageError("beta must be at least 6 for a sigma default")
        th = Fraction(1, (cert.beta - 3) // 3)
        if not c > th:
            raise UsageError(f"c must exceed 1/floor((beta-3)/3) = {th}")
        sigma = (c - th) / 2
    try:
        led = ledger_chain(cert, c, sigma)
    except HypothesisViolation as err:
        raise UsageError(str(err)) from err
    report = Report("ledger", run_metadata(args.seed, {"certificate": args.certfile, "c": str(c), "sigma": str(sigma)}))
    report.trials = [json.loads(led.to_json())]
    report.check("every recorded inequality holds", not led.failures(), "exact rational arithmetic",
                 failures=led.failures())
    report.check("replay is bit-identical", led.replay().to_json() == led.to_json(), "byte equality")
    return report


def cmd_force(args) -> Report:
    g, h = _load(args.graph), _load(args.pattern)
    blocks = args.blocks or h.n
    a = equipartition(g, blocks)
    cert = None
    if args.cert:
        with open(args.cert) as fh:
            cert = BuildCertificate.from_json(fh.read())
    params = None
    if args.mode == "strict":
        c, sigma = _frac(args.c), _frac(args.sigma)
        params = ForcingParams.from_text(args.N, blocks, sigma, _frac(args.lam), c)
    out = force_pattern(g, a, h, cert=cert, params=params, mode=args.mode)
    report = Report("force", run_metadata(args.seed, {"graph": args.graph, "pattern": args.pattern,
                                                       "blocks": blocks, "mode": args.mode}))
    report.trials.append(out.to_json())
    if out.found:
        report.check("returned copy verifies induced and rainbow", out.embedding.is_valid(a, h), "exact")
    if args.mode == "relaxed" and g.n <= args.oracle_limit:
        oracle = find_rainbow_copy(a, h) is not None
        report.check("verdict equals exhaustive search", oracle == out.found, "exact agreement", oracle=oracle)
    return report


def cmd_counterexample(args) -> Report:
    h = _load(args.pattern)
    report = None
    for n in args.n:
        cfg = CounterexampleConfig.for_pattern(h, _frac(args.c), n, args.trials, args.seed,
                                               d=None if args.d is None else _frac(args.d),
                                               pair_size=args.pair_size, budget=args.budget)
        try:
            cfg.validate()
        except ValueError as err:
            raise UsageError(str(err)) from err
        sub = counterexample_experiment(cfg, jobs=args.jobs)
        if report is None:
            report = Report("counterexample", run_metadata(args.seed, {"n": args.n, "pattern": args.pattern}))
        report.meta.setdefault("configs", []).append(sub.meta["params"])
        report.trials += [{"n": n, **t} for t in sub.trials]
        for name, prop in sub.properties.items():
            report.properties[f"n={n}: {name}"] = prop
    return report


def cmd_campaign(args) -> Report:
    params = json.loads(args.params) if args.params else {}
    return campaign(args.suite, params, args.seed)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--format", choices=["json", "csv"], default=argparse.SUPPRESS)
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="purepairs", description="Pure-pair and congestion experiments.")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--out", default=None)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("congestion", parents=[common], help="exact congestion of a graph")
    s.add_argument("graph", help="edge-list/graph6 file or a name like cycle:5")
    s.add_argument("--method", choices=["exhaustive", "parametric-cut", "both"], default="both")
    s.set_defaults(func=cmd_congestion)

    s = sub.add_parser("buildable", parents=[common], help="weak certificate for a low-congestion graph")
    s.add_argument("graph")
    s.add_argument("--xi", required=True, help="congestion bound, e.g. 1/6")
    s.add_argument("--embed", action="store_true", help="also embed in a strongly buildable host")
    s.set_defaults(func=cmd_buildable)

    s = sub.add_parser("blockade", parents=[common], help="equipartition metrics, divergence, rainbow copies")
    s.add_argument("graph")
    s.add_argument("--blocks", type=int, required=True)
    s.add_argument("--pattern")
    s.add_argument("--gamma")
    s.add_argument("--delta")
    s.set_defaults(func=cmd_blockade)

    s = sub.add_parser("machinery", parents=[common], help="relaxed constructions on synthetic instances")
    s.add_argument("--runs", type=int, default=5)
    s.add_argument("--cycle", type=int, help="also look for an induced cycle of this length")
    s.set_defaults(func=cmd_machinery)

    s = sub.add_parser("ledger", parents=[common], help="forcing constants for a strong certificate")
    s.add_argument("certfile")
    s.add_argument("--c", required=True)
    s.add_argument("--sigma")
    s.set_defaults(func=cmd_ledger)

    s = sub.add_parser("force", parents=[common], help="rainbow copy of a pattern in an equipartition")
    s.add_argument("graph")
    s.add_argument("pattern")
    s.add_argument("--mode", choices=["relaxed", "strict"], default="relaxed")
    s.add_argument("--blocks", type=int)
    s.add_argument("--cert")
    s.add_argument("--c", default="1")
    s.add_argument("--sigma", default="1/2")
    s.add_argument("--lam", default="1/2")
    s.add_argument("--N", default="2^0", help="power of two, e.g. 2^10")
    s.add_argument("--oracle-limit", type=int, default=16)
    s.set_defaults(func=cmd_force)

    s = sub.add_parser("counterexample", parents=[common], help="sparse random graphs with copies deleted")
    s.add_argument("--pattern", default="cycle:5")
    s.add_argument("--c", default="1/10")
    s.add_argument("--d")
    s.add_argument("--n", type=int, nargs="+", default=[20, 30, 40])
    s.add_argument("--trials", type=int, default=50)
    s.add_argument("--pair-size", type=int, default=6)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("campaign", parents=[common], help="property campaign")
    s.add_argument("suite", help=", ".join(sorted(SUITES)))
    s.add_argument("--params", help="JSON object of suite parameters")
    s.set_defaults(func=cmd_campaign)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        report = args.func(args)
    except (UsageError, HypothesisViolation, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    text = report.to_csv() if args.format == "csv" else report.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
