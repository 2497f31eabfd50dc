"""Constants for a one-handle chain, a forced rainbow P7, and the desk-scale counterexample run."""

from fractions import Fraction

from purepairs.buildable import BuildCertificate, BuildStep, replay
from purepairs.cli import CounterexampleConfig, counterexample_experiment
from purepairs.forcing import force_rainbow_copy, ledger_chain
from purepairs.graph import cycle_graph
from purepairs.machinery.synthetic import synthetic_bilevelling


def one_handle(length):
    return BuildCertificate(length, "strong", (BuildStep("handle", ends=(0, 1), length=length,
                                                         internal=tuple(range(2, length + 1))),))


def main():
    led = ledger_chain(one_handle(15), Fraction(1, 2), Fraction(1, 8))
    print("ledger:", led.summary())
    print("replay identical:", led.replay().to_json() == led.to_json())

    amb, bl = synthetic_bilevelling(9)
    cert = one_handle(6)
    out = force_rainbow_copy(amb.host, amb, replay(cert), cert, options={"bigrade": {"bilevelling": bl}})
    print(f"\nrainbow P7 via {out.method}: vertices {out.embedding.emb.map}, blocks {out.embedding.block_of}")

    cfg = CounterexampleConfig.for_pattern(cycle_graph(5), Fraction(1, 10), 20, 10, seed=1)
    report = counterexample_experiment(cfg)
    print(f"\ncounterexample run at n=20, p={cfg.edge_probability():.3f}:")
    for name, prop in report.properties.items():
        print(f"  [{'pass' if prop['passed'] else 'FAIL'}] {name}")


if __name__ == "__main__":
    main()
