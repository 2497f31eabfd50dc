"""Shared types, errors and bitmask helpers for the blockade machinery."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from .. import checks
from ..blockade import Blockade
from ..graph import Graph, bits, popcount, to_mask


class HypothesisViolation(ValueError):
    """A precondition of the construction does not hold; ``name`` says which."""

    def __init__(self, name: str, detail: str = "", witness=None):
        super().__init__(f"{name}: {detail}" if detail else name)
        self.name = name
        self.witness = witness


class DivergenceInconclusive(RuntimeError):
    """The exhaustive divergence search ran out of budget; nothing is certified."""


class StageFailure(RuntimeError):
    """A relaxed-mode construction could not continue at the named stage."""

    def __init__(self, stage: str, detail: str = ""):
        super().__init__(f"[{stage}] {detail}")
        self.stage = stage


class CertificationError(AssertionError):
    """A constructed structure failed its own postcondition re-check (a bug)."""


def reach(g: Graph, s: int) -> int:
    """Union of the neighbourhoods of the vertices in ``s``."""
    out = 0
    for v in bits(s):
        out |= g.adj_mask(v)
    return out


def with_nbr(g: Graph, t: int, s: int) -> int:
    """Members of ``t`` with a neighbour in ``s``."""
    return t & reach(g, s)


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def pow_ge(base: Fraction, n: int, exponent: Fraction) -> bool:
    """Exact test of ``base >= n ** exponent`` for rational ``exponent``."""
    base, exponent = frac(base), frac(exponent)
    if base <= 0:
        return False
    p, q = exponent.numerator, exponent.denominator
    return base ** q >= Fraction(n) ** p


@dataclass(frozen=True)
class Levelling:
    layers: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, masks) -> "Levelling":
        return cls(tuple(tuple(bits(m)) for m in masks))

    @property
    def apex(self) -> int:
        return self.layers[0][0]

    @property
    def base(self) -> tuple[int, ...]:
        return self.layers[-1]

    @property
    def height(self) -> int:
        return len(self.layers) - 1

    def masks(self) -> list[int]:
        return [to_mask(layer) for layer in self.layers]

    def violations(self, g: Graph, min_height: int = 1) -> list[str]:
        return checks.levelling_violations(g, self.layers, min_height)

    def to_json(self) -> dict:
        return {"layers": [list(layer) for layer in self.layers]}


@dataclass(frozen=True)
class Grading:
    """A levelling together with the blocks it grades.

    ``order`` lists block indices ``i_1..i_n``; ``witnesses[g]`` is a subset of
    the base covering blocks ``order[g:]`` and missing ``order[:g]``.
    """

    levelling: Levelling
    blocks: tuple[tuple[int, tuple[int, ...]], ...]
    order: tuple[int, ...]
    witnesses: tuple[tuple[int, ...], ...]

    def block(self, j: int) -> tuple[int, ...]:
        return dict(self.blocks)[j]

    def violations(self, g: Graph) -> list[str]:
        out = []
        pos = {j: p for p, j in enumerate(self.order)}
        for gpos, wit in enumerate(self.witnesses):
            w = set(wit)
            if not w <= set(self.levelling.base):
                out.append(f"witness {gpos} leaves the base")
            later = [set(self.block(j)) for j in self.order[gpos:]]
            earlier = [set(self.block(j)) for j in self.order[:gpos]]
            if not all(any(g.has_edge(x, y) for x in w) for blk in later for y in blk):
                out.append(f"witness {gpos} fails to cover later blocks")
            if any(g.has_edge(x, y) for x in w for blk in earlier for y in blk):
                out.append(f"witness {gpos} touches earlier blocks")
        blocks = [set(self.block(j)) for j in sorted(pos)]
        order = [sorted(pos).index(j) for j in self.order]
        out += checks.grading_violations(g, self.levelling.layers, blocks, "general", order)
        return out

    def to_json(self) -> dict:
        return {"levelling": self.levelling.to_json(),
                "blocks": [{"index": j, "vertices": list(vs)} for j, vs in self.blocks],
                "order": list(self.order), "witnesses": [list(w) for w in self.witnesses]}


@dataclass(frozen=True)
class BiLevelling:
    """``(L, M, C)``: L grades C forwards (C listed in forward order), M reaches C.

    With ``bigrading`` set, M also grades C backwards.  ``ambient`` is the
    blockade the structure is rainbow against, when there is one.
    """

    L: Levelling
    M: Levelling
    C: Blockade
    bigrading: bool = False
    ambient: Blockade | None = None
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def height(self) -> int:
        return self.L.height + self.M.height

    @property
    def length(self) -> int:
        return self.C.length

    def c_sets(self) -> list[tuple[int, ...]]:
        return [vs for _, vs in self.C.blocks]

    def violations(self) -> list[str]:
        amb = None if self.ambient is None else [vs for _, vs in self.ambient.blocks]
        return checks.bilevelling_violations(self.C.host, self.L.layers, self.M.layers,
                                             self.c_sets(), self.bigrading, amb)

    def a_size(self) -> Fraction | None:
        """Smallest ratio |C_j| / |A_i| over blocks, A_i the ambient block holding C_j."""
        if self.ambient is None:
            return None
        where = self.ambient.block_of()
        sizes = {i: len(vs) for i, vs in self.ambient.blocks}
        return min(Fraction(len(vs), sizes[where[vs[0]]]) for vs in self.c_sets())

    def with_blocks(self, keep: list[int]) -> "BiLevelling":
        """Same levellings, C restricted to the given positions (kept in order)."""
        sets = [self.c_sets()[p] for p in keep]
        parents = [self.C.indices[p] for p in keep]
        c = Blockade.from_sets(self.C.host, sets, parents=parents)
        return BiLevelling(self.L, self.M, c, self.bigrading, self.ambient, dict(self.provenance))

    def to_json(self) -> dict:
        return {"L": self.L.to_json(), "M": self.M.to_json(),
                "C": [{"index": i, "vertices": list(vs)} for i, vs in self.C.blocks],
                "bigrading": self.bigrading, "height": self.height,
                "provenance": self.provenance}


def certify(kind: str, problems: list[str]) -> None:
    if problems:
        raise CertificationError(f"{kind} failed its invariant check: {problems[:4]}")


def blockade_sizes(b: Blockade) -> dict[int, int]:
    return {i: len(vs) for i, vs in b.blocks}


def ceil_frac(x: Fraction) -> int:
    return ceil(x)


__all__ = [
    "BiLevelling", "CertificationError", "DivergenceInconclusive", "Grading", "HypothesisViolation",
    "Levelling", "StageFailure", "certify", "frac", "pow_ge", "reach", "with_nbr", "popcount",
]
