"""Low-congestion graphs taken apart into subleaves and long handles, then embedded in a handle-only host."""

from fractions import Fraction

from purepairs.buildable import CongestionTooLarge, PeelStuck, embed_in_buildable, longbranch_witness, replay
from purepairs.congestion import congestion
from purepairs.graph import Graph, complete_graph, cycle_graph


def main():
    g = Graph(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 6)])  # C6 with a pendant vertex
    xi = Fraction(1, 6)
    cert = longbranch_witness(g, xi)
    print(f"C6 plus a leaf, congestion {congestion(g).value}; certificate at beta={cert.beta}:")
    for step in cert.steps:
        print("  ", step.to_json())
    print("replays to the input:", replay(cert) == g)

    host, strong, emb = embed_in_buildable(g, cert.beta, cert)
    print(f"\nhandle-only host: n={host.n}, {len(strong.steps)} handles, image of the input {emb.map}")
    print("induced copy:", emb.is_induced(host, g))

    print("\nThe boundary case xi = 1/3 (beta = 2):")
    try:
        longbranch_witness(complete_graph(3), Fraction(1, 3))
    except PeelStuck as err:
        print("  K3 has congestion 1/3 but no certificate:", err)
    try:
        longbranch_witness(cycle_graph(5), Fraction(1, 6))
    except CongestionTooLarge as err:
        print("  C5 is over the 1/6 bound, witness", err.witness)


if __name__ == "__main__":
    main()
