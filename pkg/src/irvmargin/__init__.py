"""Exact margin-of-victory computation for instant runoff voting elections."""

from .bounds import BoundRule, bound_rule, l1, l1_add, l2, l2_add, lb1, lb1_add, lb2, lb2_add
from .distance import DistanceCache, DistanceResult, build_distance_lp, distance_to
from .election import (
    BallotFormatError,
    Candidate,
    Election,
    delta,
    delta_standing,
    format_election,
    parse_election,
    primary_vote,
    project,
    tally,
)
from .equivalence import ClassTable, class_counts, class_of, enumerate_classes
from .lp import LinearConstraint, LPModel, SolveOutcome, format_lp, solve_integral, solve_lp
from .oracle import EditBudget, adversarial_winners, edit_oracle, random_election
from .search import (
    MarginReport,
    SearchStats,
    compute_margin,
    exhaustive_margin,
    mrsw_baseline,
)
from .tabulate import TabulationResult, last_round_margin, last_round_margin_add, run_irv

__version__ = "0.1.0"

__all__ = [
    "BallotFormatError",
    "BoundRule",
    "Candidate",
    "ClassTable",
    "DistanceCache",
    "DistanceResult",
    "EditBudget",
    "Election",
    "LPModel",
    "LinearConstraint",
    "MarginReport",
    "SearchStats",
    "SolveOutcome",
    "TabulationResult",
    "adversarial_winners",
    "bound_rule",
    "build_distance_lp",
    "class_counts",
    "class_of",
    "compute_margin",
    "delta",
    "delta_standing",
    "distance_to",
    "edit_oracle",
    "enumerate_classes",
    "exhaustive_margin",
    "format_election",
    "format_lp",
    "l1",
    "l1_add",
    "l2",
    "l2_add",
    "lb1",
    "lb1_add",
    "lb2",
    "lb2_add",
    "last_round_margin",
    "last_round_margin_add",
    "mrsw_baseline",
    "parse_election",
    "primary_vote",
    "project",
    "random_election",
    "run_irv",
    "solve_integral",
    "solve_lp",
    "tally",
]
