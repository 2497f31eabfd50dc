import json
from fractions import Fraction

import pytest

from purepairs.buildable import BuildCertificate, BuildStep
from purepairs.cli import (
    EXIT_FAIL, EXIT_PASS, EXIT_USAGE, CounterexampleConfig, Report, UsageError, campaign, counterexample_experiment,
    main, trial_seed,
)
from purepairs.congestion import congestion
from purepairs.graph import complement, cycle_graph, path_graph


def run(tmp_path, name, *argv):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out.read_bytes() if out.exists() else b""


def test_c5_config_valid():
    cfg = CounterexampleConfig.for_pattern(cycle_graph(5), Fraction(1, 10), 20, 5)
    cfg.validate()
    assert cfg.c_prime == Fraction(1, 5)
    assert cfg.c < cfg.d < cfg.c_prime
    assert congestion(cfg.j).value > cfg.c and congestion(cfg.j_prime).value > cfg.c


def test_config_rejects_d_outside_window():
    cfg = CounterexampleConfig.for_pattern(cycle_graph(5), Fraction(1, 10), 20, 5, d=Fraction(1, 4))
    with pytest.raises(ValueError):
        cfg.validate()


def test_config_rejects_sparse_witness():
    cfg = CounterexampleConfig.for_pattern(path_graph(4), Fraction(1, 10), 20, 5)
    with pytest.raises(ValueError):
        cfg.validate()


def test_edge_probability_recorded():
    cfg = CounterexampleConfig.for_pattern(cycle_graph(5), Fraction(1, 10), 30, 0, d=Fraction(1, 2))
    assert abs(cfg.edge_probability() - 30 ** -0.5) < 1e-12
    assert round(cfg.edge_probability(), 4) == 0.1826
    recorded = counterexample_experiment(
        CounterexampleConfig.for_pattern(cycle_graph(5), Fraction(1, 10), 30, 0)).meta["params"]["p"]
    assert recorded == 30 ** float(Fraction(3, 20) - 1)


def test_zero_trials_schema_valid():
    cfg = CounterexampleConfig.for_pattern(cycle_graph(5), Fraction(1, 10), 20, 0)
    report = counterexample_experiment(cfg)
    assert report.trials == [] and not report.schema_errors()
    assert json.loads(report.to_json())["kind"] == "counterexample"


def test_counterexample_trials_are_free():
    cfg = CounterexampleConfig.for_pattern(cycle_graph(5), Fraction(1, 10), 20, 4, seed=3)
    report = counterexample_experiment(cfg)
    h = cfg.h
    for t in report.trials:
        assert t["j_free"] and t["j_prime_free"]
    assert complement(h).m == h.m


def test_trial_seeds_differ():
    assert len({trial_seed(0, i) for i in range(100)}) == 100
    assert trial_seed(5, 1) == trial_seed(5, 1)


def test_known_suite_passes():
    report = campaign("congestion-oracle-agreement", {"count": 30}, seed=1)
    assert report.passed and not report.schema_errors()


def test_unknown_suite():
    with pytest.raises(UsageError):
        campaign("no-such-suite")
    assert main(["campaign", "no-such-suite"]) == EXIT_USAGE


def test_campaign_bytes_repeat(tmp_path):
    a = run(tmp_path, "a.json", "campaign", "cycle-values", "--seed", "4")
    b = run(tmp_path, "b.json", "campaign", "cycle-values", "--seed", "4")
    assert a[0] == EXIT_PASS and a == b


def test_report_csv_and_checks():
    r = Report("demo", {"seed": 0})
    r.trials.append({"x": 1})
    r.check("ok", True, "exact")
    assert r.passed
    r.check("bad", False, "exact", observed=2)
    assert not r.passed
    assert "x" in r.to_csv().splitlines()[0]


def test_congestion_command(tmp_path):
    code, body = run(tmp_path, "c.json", "congestion", "cycle:5")
    assert code == EXIT_PASS
    data = json.loads(body)
    assert {t["congestion"] for t in data["trials"]} == {"1/5"}


def test_global_flags_after_subcommand(tmp_path):
    code, body = run(tmp_path, "c.csv", "congestion", "complete:4", "--format", "csv")
    assert code == EXIT_PASS and b"1/2" in body


def test_ledger_command(tmp_path):
    cert = BuildCertificate(15, "strong", (BuildStep("handle", ends=(0, 1), length=15, internal=tuple(range(2, 16))),))
    path = tmp_path / "cert.json"
    path.write_text(cert.to_json())
    code, body = run(tmp_path, "l.json", "ledger", str(path), "--c", "1/2")
    assert code == EXIT_PASS
    assert main(["ledger", str(path), "--c", "1/4"]) == EXIT_USAGE


def test_force_command(tmp_path):
    code, body = run(tmp_path, "f.json", "force", "petersen", "path:4", "--blocks", "5")
    assert code == EXIT_PASS
    assert json.loads(body)["trials"][0]["found"] in (True, False)


def test_bad_arguments_exit_two(capsys):
    assert main(["congestion"]) == EXIT_USAGE
    assert main(["congestion", "nosuch:3"]) == EXIT_USAGE
    assert main(["counterexample", "--c", "zz"]) == EXIT_USAGE


def test_property_failure_exit_one(tmp_path):
    # at n = 20 the sampled graphs are sparse enough to hold a 6+6 anticomplete pair
    code, body = run(tmp_path, "x.json", "counterexample", "--n", "20", "--trials", "3")
    assert code == EXIT_FAIL
    props = json.loads(body)["properties"]
    assert any(not p["passed"] for p in props.values())


@pytest.mark.parametrize("argv", [
    ["congestion", "cycle:7"],
    ["buildable", "cycle:6", "--xi", "1/6", "--embed"],
    ["blockade", "petersen", "--blocks", "3", "--gamma", "1/2", "--delta", "1/2", "--pattern", "path:3"],
    ["machinery", "--runs", "2"],
    ["force", "cycle:8", "path:3", "--blocks", "4"],
    ["counterexample", "--n", "20", "--trials", "2"],
    ["campaign", "force-oracle", "--params", '{"count": 20}'],
])
def test_every_command_is_deterministic(tmp_path, argv):
    first = run(tmp_path, "1.json", *argv, "--seed", "11")
    second = run(tmp_path, "2.json", *argv, "--seed", "11")
    assert first == second and first[1]
