"""Acceptance criteria, each measured at its stated tolerance.

Every test appends one line to ``RESULTS`` and prints it; the terminal
summary hook in conftest repeats them after the run.  Run this file directly
(``python tests/test_acceptance.py``) to get only the criterion lines.
"""

from __future__ import annotations

import json
import random
import sys
import time
from fractions import Fraction
from itertools import combinations
from math import floor

import networkx as nx
import pytest

from conftest import anticomplete, bilevelling_problems, covers, is_induced_path, levelling_problems, nbrs
from purepairs.blockade import equipartition, find_rainbow_copy, is_divergent
from purepairs.buildable import (
    BuildCertificate, BuildStep, CongestionTooLarge, PeelStuck, embed_in_buildable, longbranch_witness,
    random_strong_certificate, replay, weak_certificate,
)
from purepairs.cli import CounterexampleConfig, counterexample_experiment, main
from purepairs.congestion import congestion
from purepairs.forcing import force_pattern, ledger_chain, verify_rainbow
from purepairs.graph import ABSENT, Graph, complement, cycle_graph, gnp
from purepairs.machinery import (
    CertificationError, HypothesisViolation, StageFailure, build_bigrading, build_grading, build_levelling,
    check_expanding, connecting_path, exact_constants, expanding_contraction, extend_bilevelling,
    iter_bilevellings, synthetic_blockade,
)
from purepairs.machinery.synthetic import synthetic_bilevelling

RESULTS: list[str] = []


def record(number, title: str, passed: bool, detail: str, started: float) -> None:
    line = f"criterion {number:<5} [{'PASS' if passed else 'FAIL'}] {title}: {detail} ({time.time() - started:.1f}s)"
    RESULTS.append(line)
    print(line)


def from_nx(h) -> Graph:
    order = sorted(h.nodes())
    index = {v: i for i, v in enumerate(order)}
    return Graph(len(order), [(index[u], index[v]) for u, v in h.edges()])


def atlas(max_n: int) -> list[Graph]:
    return [from_nx(h) for h in nx.graph_atlas_g() if 1 <= h.number_of_nodes() <= max_n]


# -- 1 ---------------------------------------------------------------------------

def test_criterion_01_congestion_oracle_agreement():
    start = time.time()
    small = atlas(6)  # every graph on up to 6 vertices up to isomorphism, including the 156 on six
    rng = random.Random(1)
    randoms = [gnp(rng.randint(6, 9), rng.random(), 10_000 + i) for i in range(2000)]
    bad = [g for g in small + randoms
           if congestion(g, "exhaustive").value != congestion(g, "parametric-cut").value]
    elapsed = time.time() - start
    ok = not bad and elapsed < 120
    record(1, "congestion oracle agreement", ok,
           f"{len(small)} atlas graphs (n<=6) + {len(randoms)} random (6<=n<=9), {len(bad)} mismatches", start)
    assert ok


# -- 2 ---------------------------------------------------------------------------

def test_criterion_02_forest_characterization():
    start = time.time()
    rng = random.Random(2)
    trees = []
    for i in range(500):
        t = nx.random_labeled_tree(rng.randint(1, 20), seed=i)
        trees.append(Graph(t.number_of_nodes(), t.edges()))
    cyclic = []
    i = 0
    while len(cyclic) < 500:
        g = gnp(rng.randint(3, 14), rng.uniform(0.15, 0.6), 20_000 + i)
        i += 1
        if not nx.is_forest(g.to_networkx()):
            cyclic.append(g)
    bad_trees = sum(congestion(t, "parametric-cut").value != 0 for t in trees)
    bad_cyclic = sum(congestion(g, "parametric-cut").value == 0 for g in cyclic)
    ok = bad_trees == 0 and bad_cyclic == 0
    record(2, "congestion is zero exactly on forests", ok,
           f"500 trees ({bad_trees} nonzero), 500 graphs with a cycle ({bad_cyclic} zero)", start)
    assert ok


# -- 3 ---------------------------------------------------------------------------

def test_criterion_03_cycle_values():
    start = time.time()
    values = {k: congestion(cycle_graph(k)).value for k in range(3, 13)}
    bad = [k for k, v in values.items() if v != Fraction(1, k)]
    record(3, "congestion(C_k) = 1/k for 3<=k<=12", not bad, f"mismatches at k={bad}", start)
    assert not bad


# -- 4 ---------------------------------------------------------------------------

def low_congestion_sample(xi: Fraction, count: int, seed: int) -> list[Graph]:
    """Atlas graphs (n<=7) within the bound, topped up with random labelled 8-vertex graphs."""
    picked = [g for g in atlas(7) if congestion(g).value <= xi]
    seen = {g for g in picked}
    rng = random.Random(seed)
    i = 0
    while len(picked) < count:
        g = gnp(8, rng.uniform(0.05, 0.4), 30_000 + 7919 * seed + i)
        i += 1
        if g not in seen and congestion(g).value <= xi:
            seen.add(g)
            picked.append(g)
    return picked[:count]


@pytest.mark.parametrize("xi", [Fraction(1, 3), Fraction(1, 6), Fraction(1, 9)], ids=["xi=1/3", "xi=1/6", "xi=1/9"])
def test_criterion_04_longbranch_certificates(xi):
    start = time.time()
    beta = floor(1 / (3 * xi)) + 1
    sample = low_congestion_sample(xi, 1000, xi.denominator)
    failures = []
    for g in sample:
        try:
            cert = longbranch_witness(g, xi)
        except (PeelStuck, CongestionTooLarge):
            failures.append(g)
            continue
        if cert.beta != beta or cert.mode != "weak" or replay(cert) != g:
            failures.append(g)
    elapsed = time.time() - start
    ok = not failures and elapsed < 300
    example = ""
    if failures:
        f = min(failures, key=lambda g: (g.n, g.m))
        example = f"; smallest failure n={f.n} edges={f.edges()} congestion={congestion(f).value}"
    record(f"4{'abc'[[3, 6, 9].index(xi.denominator)]}", f"weak certificate with beta={beta} at xi={xi}", ok,
           f"{len(sample)} graphs, {len(failures)} without a certificate{example}", start)
    assert ok


# -- 5 ---------------------------------------------------------------------------

def test_criterion_05_buildable_congestion_bound():
    start = time.time()
    rng = random.Random(5)
    worst, bad = Fraction(0), 0
    for _ in range(500):
        beta = rng.randint(3, 8)
        cert = random_strong_certificate(beta, 40, rng)
        g = replay(cert)
        assert g.n <= 40 and all(s.op == "handle" and s.length >= beta for s in cert.steps)
        value = congestion(g, "parametric-cut").value
        bad += value > Fraction(1, beta)
        worst = max(worst, value * beta)
    record(5, "strongly beta-buildable => congestion <= 1/beta", bad == 0,
           f"500 certificates, {bad} violations, max beta*congestion = {worst}", start)
    assert bad == 0


# -- 6 ---------------------------------------------------------------------------

def weakly_buildable_corpus(count: int, seed: int):
    rng = random.Random(seed)
    out, seen, i = [], set(), 0
    while len(out) < count:
        n = rng.randint(1, 8)
        beta = rng.choice([2, 3, 4])
        g = gnp(n, rng.uniform(0.1, 0.5), 40_000 + i)
        i += 1
        if (g, beta) in seen:
            continue
        seen.add((g, beta))
        if weak_certificate(g, beta) is not None:
            out.append((g, beta))
    return out


def induced_by_hand(host, pattern, image):
    return len(set(image)) == pattern.n and all(
        host.has_edge(image[u], image[v]) == pattern.has_edge(u, v) for u, v in combinations(range(pattern.n), 2))


def test_criterion_06_weakbuild_embedding():
    start = time.time()
    corpus = weakly_buildable_corpus(200, 6)
    bad = 0
    for g, beta in corpus:
        host, cert, emb = embed_in_buildable(g, beta)
        good = (cert.mode == "strong" and replay(cert) == host
                and all(s.op == "handle" and s.length >= beta for s in cert.steps)
                and induced_by_hand(host, g, emb.map))
        bad += not good
    record(6, "embed_in_buildable gives a strong host with an induced copy", bad == 0,
           f"{len(corpus)} weakly buildable graphs, {bad} failures", start)
    assert bad == 0


# -- 7 ---------------------------------------------------------------------------

def expands_by_hand(b, tau) -> bool:
    blocks = {i: set(vs) for i, vs in b.blocks}
    for i, bi in blocks.items():
        members = sorted(bi)
        for r in range(1, len(members) + 1):
            for x in combinations(members, r):
                reach = set().union(*(nbrs(b.host, v) for v in x))
                for j, bj in blocks.items():
                    if i != j and Fraction(len(reach & bj), len(bj)) < min(tau * Fraction(r, len(bi)), Fraction(1, 4)):
                        return False
    return True


def test_criterion_07_blockexpand_postconditions():
    start = time.time()
    rng = random.Random(7)
    done = failures = skipped = 0
    i = 0
    while done < 200:
        width = rng.randint(9, 12)
        delta = rng.choice([Fraction(1, 8), Fraction(1, 10)])
        g = gnp(2 * width, rng.uniform(0.7, 0.95), 50_000 + i)
        i += 1
        a = equipartition(g, 2)
        if is_divergent(a, delta, delta).verdict != ABSENT:
            skipped += 1
            continue
        done += 1
        contraction, tau = expanding_contraction(a, delta)
        size_ok = all(Fraction(len(vs), len(a.block(j))) >= 1 - delta * a.length for j, vs in contraction.blocks)
        exp_ok = check_expanding(contraction, tau).verdict == "pass" and expands_by_hand(contraction, tau)
        failures += not (size_ok and exp_ok and tau == 1 / (4 * delta))
    record(7, "expanding contraction postconditions", failures == 0,
           f"200 non-divergent blockades ({skipped} divergent samples skipped), {failures} failures", start)
    assert failures == 0


# -- 8 ---------------------------------------------------------------------------

def grading_problems(g, grading):
    out = levelling_problems(g, grading.levelling.layers)
    for pos, wit in enumerate(grading.witnesses):
        if not set(wit) <= set(grading.levelling.base):
            out.append("witness leaves the base")
        if not all(covers(g, wit, grading.block(j)) for j in grading.order[pos:]):
            out.append("witness misses a later block")
        if not all(anticomplete(g, wit, grading.block(j)) for j in grading.order[:pos]):
            out.append("witness touches an earlier block")
    return out


def path_matches(bl) -> bool:
    g = bl.C.host
    path = connecting_path(bl, bl.M.base[0], bl.L.base[0])
    cunion = {v for _, vs in bl.C.blocks for v in vs}
    return (len(path) - 1 == bl.height and is_induced_path(g, path)
            and not any(nbrs(g, v) & cunion for v in path[1:-1]))


def machinery_seed(seed: int) -> dict:
    tally = {"structures": 0, "problems": 0, "paths": 0, "path_mismatch": 0, "bugs": 0}

    def audit(problems):
        tally["structures"] += 1
        tally["problems"] += bool(problems)

    def audit_bilevelling(bl):
        audit(bilevelling_problems(bl))
        tally["paths"] += 1
        tally["path_mismatch"] += not path_matches(bl)

    try:
        a = synthetic_blockade(seed, 12, 12, 3.0, 4, 0.5)
        v = a.block(0)[0]
        for build in (build_levelling, build_grading):
            try:
                _, out, _ = build(a, [0, 1, 2], 0, v, 3, strict=False)
            except (StageFailure, HypothesisViolation):
                continue
            audit(levelling_problems(a.host, out.layers) if build is build_levelling
                  else grading_problems(a.host, out))
        try:
            audit_bilevelling(next(iter_bilevellings(a, None, 1, False, {"apex_attempts": 6})))
        except (StageFailure, HypothesisViolation):
            pass
        amb, planted = synthetic_bilevelling(seed)
        audit_bilevelling(planted)
        for make in (lambda: build_bigrading(amb, 2, planted.height, 1, 1, 1, strict=False,
                                             params={"bilevelling": planted}),
                     lambda: extend_bilevelling(amb, planted, 2, 1, strict=False)):
            try:
                audit_bilevelling(make())
            except (StageFailure, HypothesisViolation):
                pass
    except CertificationError:
        tally["bugs"] += 1
    return tally


def test_criterion_08_machinery_invariants():
    start = time.time()
    total = {"structures": 0, "problems": 0, "paths": 0, "path_mismatch": 0, "bugs": 0}
    for seed in range(500):
        for key, value in machinery_seed(seed).items():
            total[key] += value
    ok = total["problems"] == 0 and total["path_mismatch"] == 0 and total["bugs"] == 0 and total["paths"] > 0
    record(8, "machinery structures pass independent checkers", ok,
           f"500 runs, {total['structures']} structures, {total['problems']} failing, "
           f"{total['paths']} paths with {total['path_mismatch']} length/induced mismatches, "
           f"{total['bugs']} certification errors", start)
    assert ok


# -- 9 ---------------------------------------------------------------------------

def test_criterion_09_force_oracle_equivalence():
    start = time.time()
    rng = random.Random(9)
    bad = found = 0
    for i in range(1000):
        n = rng.randint(2, 12)
        g = gnp(n, rng.random(), 60_000 + i)
        a = equipartition(g, rng.randint(1, n))
        if i % 2:
            cert = random_strong_certificate(2, 5, rng)
            h = replay(cert)
        else:
            cert = None
            h = gnp(rng.randint(1, 5), rng.random(), 70_000 + i)
        out = force_pattern(g, a, h, cert=cert)
        oracle = find_rainbow_copy(a, h) is not None
        bad += out.found != oracle
        if out.found:
            bad += verify_rainbow(a, h, out.embedding.emb.map) is None
        found += out.found
    record(9, "relaxed forcing verdict equals exhaustive search", bad == 0,
           f"1000 cases, {found} copies found, {bad} disagreements", start)
    assert bad == 0


# -- 10 --------------------------------------------------------------------------

def test_criterion_10_constants_ledger():
    start = time.time()
    k_required = exact_constants(1, 1, 7).length
    cert = BuildCertificate(15, "strong", (BuildStep("handle", ends=(0, 1), length=15,
                                                     internal=tuple(range(2, 16))),))
    c = Fraction(1, 2)
    sigma = (c - Fraction(1, 4)) / 2
    led = ledger_chain(cert, c, sigma)
    body = json.loads(led.to_json())
    ops = {">=": Fraction.__ge__, ">": Fraction.__gt__, "<=": Fraction.__le__, "<": Fraction.__lt__}
    records = ([body["base"]] if body["base"] else []) + body["steps"]
    count = sum(len(r["inequalities"]) for r in records)
    broken = [q["name"] for r in records for q in r["inequalities"]
              if not ops[q["op"]](Fraction(q["lhs"]), Fraction(q["rhs"]))]
    identical = led.replay().to_json() == led.to_json()
    ok = k_required == 262144 == 4 ** 9 and not broken and identical
    record(10, "constants ledger", ok,
           f"required K = {k_required}; {len(body['steps'])} steps, {count} inequalities, {len(broken)} broken; "
           f"replay identical = {identical}", start)
    assert ok


# -- 11 --------------------------------------------------------------------------

def test_criterion_11_counterexample():
    start = time.time()
    lines, free_ok, absent_rate = [], True, None
    for n in (20, 30, 40):
        cfg = CounterexampleConfig.for_pattern(cycle_graph(5), Fraction(1, 10), n, 50, seed=11)
        report = counterexample_experiment(cfg, jobs=4)
        trials = report.trials
        free = sum(t["j_free"] and t["j_prime_free"] for t in trials)
        free_ok &= free == len(trials) == 50
        if n == 20:
            absent = sum(t["pure_pair"] == "verified-absent" for t in trials)
            absent_rate = absent / len(trials)
        lines.append(f"n={n}: {free}/50 free (p={cfg.edge_probability():.3f})")
    extra = rerun_freeness_check()
    elapsed = time.time() - start
    ok = free_ok and extra and absent_rate >= 0.9 and elapsed < 600
    record(11, "counterexample experiment", ok,
           "; ".join(lines) + f"; no 6+6 pure pair at n=20 in {absent_rate:.0%} of trials (need >= 90%)", start)
    assert ok


def rerun_freeness_check() -> bool:
    """Rebuild a few post-deletion graphs and test C_5-freeness of them and their complements by hand."""
    from purepairs.cli import _delete_copies, trial_seed

    c5 = cycle_graph(5)
    for index in range(5):
        cfg = CounterexampleConfig.for_pattern(c5, Fraction(1, 10), 20, 50, seed=11)
        g = gnp(20, cfg.edge_probability(), trial_seed(11, index))
        sub = g.induced(_delete_copies(g, [c5, complement(c5)]))
        for side in (sub, complement(sub)):
            gm = nx.algorithms.isomorphism.GraphMatcher(side.to_networkx(), c5.to_networkx())
            if gm.subgraph_is_isomorphic():
                return False
    return True


# -- 12 --------------------------------------------------------------------------

CLI_COMMANDS = [
    ["congestion", "petersen"],
    ["buildable", "cycle:6", "--xi", "1/6", "--embed"],
    ["blockade", "petersen", "--blocks", "3", "--gamma", "1/2", "--delta", "1/2", "--pattern", "path:3"],
    ["machinery", "--runs", "3"],
    ["ledger", "{cert}", "--c", "1/2"],
    ["force", "cycle:9", "path:4", "--blocks", "5"],
    ["counterexample", "--n", "20", "--trials", "5"],
    ["campaign", "congestion-oracle-agreement", "--params", '{"count": 40}'],
]


def test_criterion_12_cli_determinism(tmp_path):
    start = time.time()
    cert = tmp_path / "cert.json"
    cert.write_text(BuildCertificate(15, "strong", (BuildStep("handle", ends=(0, 1), length=15,
                                                              internal=tuple(range(2, 16))),)).to_json())
    differing = []
    for argv in CLI_COMMANDS:
        argv = [arg.replace("{cert}", str(cert)) for arg in argv]
        outputs = []
        for rep in range(2):
            out = tmp_path / f"{argv[0]}-{rep}.json"
            main([*argv, "--seed", "12", "--out", str(out)])
            outputs.append(out.read_bytes())
        if outputs[0] != outputs[1] or not outputs[0]:
            differing.append(argv[0])
    ok = not differing
    record(12, "CLI reports are byte-identical for a fixed seed", ok,
           f"{len(CLI_COMMANDS)} commands run twice, differing: {differing or 'none'}", start)
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
