"""Blockades, coherence, the expanding contraction, and a planted bi-levelling's connecting paths."""

from fractions import Fraction

from purepairs.blockade import equipartition, is_divergent, metrics
from purepairs.graph import gnp
from purepairs.machinery import check_expanding, connecting_path, expanding_contraction
from purepairs.machinery.synthetic import synthetic_bilevelling


def main():
    g = gnp(20, 0.8, 7)
    a = equipartition(g, 2)
    delta = Fraction(1, 8)
    m = metrics(a)
    print(f"G(20, 0.8) in two blocks: width {m.width}, linkage {m.linkage}")
    print("anticomplete pair at (1/8, 1/8):", is_divergent(a, delta, delta).verdict)

    c, tau = expanding_contraction(a, delta)
    kept = [len(vs) for _, vs in c.blocks]
    print(f"contraction keeps {kept} of {[len(vs) for _, vs in a.blocks]} vertices, tau={tau}")
    print("expansion check:", check_expanding(c, tau).verdict)

    amb, bl = synthetic_bilevelling(9, l_height=2, m_height=3)
    print(f"\nplanted bi-levelling: L height {bl.L.height}, M height {bl.M.height}, {bl.length} C blocks")
    x, y = bl.M.base[0], bl.L.base[0]
    path = connecting_path(bl, x, y)
    print(f"path from M's base to L's base through the apex: {path} ({len(path) - 1} edges)")


if __name__ == "__main__":
    main()
