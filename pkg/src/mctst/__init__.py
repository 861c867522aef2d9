"""Subtree-uncertainty Monte Carlo Tree Search for deterministic MDPs.

Three planners share one search loop: vanilla PUCT-style MCTS, MCTS-T
(subtree-size uncertainty steering exploration) and MCTS-T+ (MCTS-T with
in-trace loop blocking).
"""

from mctst.envs import make_env
from mctst.mdp import ContractViolation, Environment, StepOutcome
from mctst.oracle import EnumerationReport, OracleRefusal, enumerate_tree
from mctst.planners import SearchConfig, SearchResult, run_search

__all__ = [
    "ContractViolation",
    "EnumerationReport",
    "Environment",
    "OracleRefusal",
    "SearchConfig",
    "SearchResult",
    "StepOutcome",
    "enumerate_tree",
    "make_env",
    "run_search",
]

__version__ = "0.1.0"
