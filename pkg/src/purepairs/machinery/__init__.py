"""Constructive blockade machinery: expansions, levellings, gradings and bi-levellings."""

from .expansion import ExpansionCheck, check_expanding, expanding_contraction, rainbow_path
from .levelling import build_grading, build_levelling
from .structures import (
    BiLevelling, CertificationError, DivergenceInconclusive, Grading, HypothesisViolation, Levelling,
    StageFailure,
)
from .bilevel import build_bilevelling, connecting_path, rho_for
from .selective import PAIR, PARTITION, SelectiveCoverOutcome, selective_cover, verify_outcome
from .bilevel import iter_bilevellings
from .extend import (
    CycleResult, ExactConstants, exact_bilevelling, exact_constants, exhaustive_induced_cycle,
    extend_bilevelling, find_induced_cycle, length_ladder, power_ceil,
)
from .synthetic import synthetic_blockade
from .bigrading import BigradeConstants, bigrade_constants, bigrade_ladder, build_bigrading
