import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings

from conftest import all_graphs, graphs
from purepairs.buildable import (
    BuildCertificate, BuildStep, CongestionTooLarge, ReplayError, beta_for, branches, embed_in_buildable,
    longbranch_witness, random_strong_certificate, replay, strong_certificate, weak_certificate,
)
from purepairs.congestion import congestion
from purepairs.graph import Graph, complete_graph, cycle_graph, empty_graph, path_graph


def test_branches_examples():
    (b,) = branches(cycle_graph(6))
    assert b.kind == "cycle" and b.length == 6
    (p,) = branches(path_graph(5))
    assert p.kind == "path" and p.length == 4
    k4 = branches(complete_graph(4))
    assert len(k4) == 6 and all(b.length == 1 for b in k4)


@given(graphs(max_n=7))
def test_branches_partition_edges(g):
    seen = [e for b in branches(g) for e in b.edges()]
    assert len(seen) == len(set(seen)) == g.m
    assert set(seen) == {frozenset(e) for e in g.edges()}


def test_forest_subleaves_only():
    g = Graph(6, [(0, 1), (1, 2), (1, 3), (4, 5)])
    cert = weak_certificate(g, 5)
    assert cert is not None and all(s.op == "subleaf" for s in cert.steps)
    assert replay(cert) == g


def test_c6_certificate_replays():
    cert = weak_certificate(cycle_graph(6), 3)
    assert cert is not None
    assert replay(cert) == cycle_graph(6)
    assert all(s.length >= 3 for s in cert.steps if s.op == "handle")


def test_k4_beta2_absent():
    assert weak_certificate(complete_graph(4), 2) is None


def test_longbranch_examples():
    assert longbranch_witness(cycle_graph(6), Fraction(1, 6)).beta == 3
    cert = longbranch_witness(path_graph(4), Fraction(1, 3))
    assert cert.beta == 2 and all(s.op == "subleaf" for s in cert.steps)
    with pytest.raises(CongestionTooLarge) as err:
        longbranch_witness(complete_graph(4), Fraction(1, 3))
    assert err.value.witness == (0, 1, 2, 3)


def test_beta_for():
    assert [beta_for(Fraction(1, d)) for d in (3, 6, 9)] == [2, 3, 4]


def test_weak_buildable_congestion_bound():
    for n in range(1, 7):
        for g in list(all_graphs(n))[::3]:
            for beta in (2, 3, 4, 5):
                cert = weak_certificate(g, beta)
                if cert is not None:
                    assert replay(cert) == g
                    assert congestion(g).value <= Fraction(1, beta)


def test_embed_examples():
    host, cert, emb = embed_in_buildable(empty_graph(2), 4)
    assert host.n == 2 and host.m == 0 and cert.steps == ()
    host, cert, emb = embed_in_buildable(empty_graph(1), 4)
    assert cert.mode == "strong" and len(cert.steps) == 1
    assert emb.map[0] in cert.steps[0].internal
    host, cert, emb = embed_in_buildable(cycle_graph(6), 3)
    assert replay(cert) == host and emb.is_induced(host, cycle_graph(6))


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=6))
def test_embed_output_is_induced_and_strong(g):
    beta = 3
    if weak_certificate(g, beta) is None:
        return
    host, cert, emb = embed_in_buildable(g, beta)
    assert cert.mode == "strong"
    assert all(s.op == "handle" and s.length >= beta for s in cert.steps)
    assert replay(cert) == host
    assert emb.is_induced(host, g)


def test_replay_examples():
    assert replay(BuildCertificate(2, "weak", ())).n == 0
    one = BuildCertificate(5, "strong", (BuildStep("handle", ends=(0, 1), length=5),))
    g = replay(one)
    assert g.n == 6 and nx.is_isomorphic(g.to_networkx(), nx.path_graph(6))


def test_replay_rejects_short_handle():
    bad = BuildCertificate(5, "strong", (BuildStep("handle", ends=(0, 1), length=3),))
    with pytest.raises(ReplayError):
        replay(bad)


def test_certificate_json_round_trip():
    cert = weak_certificate(cycle_graph(6), 3)
    assert BuildCertificate.from_json(cert.to_json()) == cert


def test_random_strong_certificates_bound():
    rng = random.Random(4)
    for _ in range(60):
        beta = rng.randint(3, 8)
        cert = random_strong_certificate(beta, 40, rng)
        g = replay(cert)
        assert g.n <= 40
        assert congestion(g, "parametric-cut").value <= Fraction(1, beta)


def test_strong_certificate_search():
    cert, relabel = strong_certificate(cycle_graph(6), 2)
    assert len(cert.steps) == 2
    assert nx.is_isomorphic(replay(cert).to_networkx(), nx.cycle_graph(6))
    assert strong_certificate(complete_graph(3), 2) is None
    assert len(strong_certificate(empty_graph(2), 2)[0].steps) == 0
