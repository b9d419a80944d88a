"""Learning network structure from independent cascade queries."""

from .cascade import CascadeOutcome, path_active_probability_bound, simulate_cascade, simulate_rounds
from .generators import GraphFamilySpec, certify_for_algorithm1, generate
from .graph import (
    ContagionGraph,
    FiniteGirth,
    InfiniteGirth,
    count_simple_paths,
    girth,
    max_degree,
    min_girth_required,
    path_growth_rate,
    shortest_path_distance,
)
from .learners import (
    LearnerConfig,
    RoundRecords,
    collect_rounds,
    learn_bounded_degree,
    learn_large_girth,
    learn_tree_ahk,
    rounds_for_bounded_degree,
    rounds_for_large_girth,
    rounds_for_tree,
)
from .oracle import BudgetExhausted, QueryOracle
from .rng import RandomStream

__version__ = "0.1.0"

__all__ = [
    "BudgetExhausted",
    "CascadeOutcome",
    "ContagionGraph",
    "FiniteGirth",
    "GraphFamilySpec",
    "InfiniteGirth",
    "LearnerConfig",
    "QueryOracle",
    "RandomStream",
    "RoundRecords",
    "certify_for_algorithm1",
    "collect_rounds",
    "count_simple_paths",
    "generate",
    "girth",
    "learn_bounded_degree",
    "learn_large_girth",
    "learn_tree_ahk",
    "max_degree",
    "min_girth_required",
    "path_active_probability_bound",
    "path_growth_rate",
    "rounds_for_bounded_degree",
    "rounds_for_large_girth",
    "rounds_for_tree",
    "shortest_path_distance",
    "simulate_cascade",
    "simulate_rounds",
]
