"""Congestion of a few familiar graphs, by both exact methods.

Cycles sit at exactly 1/k, trees at zero, and graphs assembled from long
handles stay below 1/beta.
"""

import random

import networkx as nx

from purepairs.buildable import random_strong_certificate, replay
from purepairs.congestion import congestion
from purepairs.graph import Graph, complete_graph, cycle_graph, petersen_graph


def show(name, g):
    a = congestion(g, "exhaustive")
    b = congestion(g, "parametric-cut")
    assert a.value == b.value
    print(f"{name:<14} n={g.n:<3} m={g.m:<3} congestion={a.value}  densest part={a.witness}")


def main():
    for k in (3, 5, 8):
        show(f"cycle C{k}", cycle_graph(k))
    show("K4", complete_graph(4))
    show("Petersen", petersen_graph())
    tree = nx.random_labeled_tree(12, seed=4)
    show("random tree", Graph(12, tree.edges()))

    print("\nGraphs built from handles of length >= beta:")
    rng = random.Random(0)
    for beta in (3, 5, 8):
        g = replay(random_strong_certificate(beta, 30, rng))
        value = congestion(g, "parametric-cut").value
        print(f"  beta={beta}: n={g.n}, congestion={value} <= 1/{beta}: {value * beta <= 1}")


if __name__ == "__main__":
    main()
