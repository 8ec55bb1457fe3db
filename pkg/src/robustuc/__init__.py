"""Robust AC-network-constrained unit commitment against line-outage scenarios."""

__version__ = "0.1.0"

from .network import (
    Generator,
    NetworkCase,
    ReserveArea,
    ValidationReport,
    adjacency,
    ensure_reactive_support,
    validate_case,
)
from .scenarios import TrajectorySet, ScenarioSelection, apply_trajectory, islands, scenario_count
from .formulation import (
    CommitmentDecision,
    ScenarioDispatch,
    assemble_master,
    build_commitment_block,
    build_dispatch_block,
    evaluate_cost,
)
from .duality import build_dual, build_merged_subproblem, solve_subproblem
from .ccg import CcgConfig, RobustSchedule, compare_commitments, run_ccg
from .oicpa import OicpaConfig, run_oicpa

__all__ = [
    "Generator", "NetworkCase", "ReserveArea", "ValidationReport",
    "adjacency", "ensure_reactive_support", "validate_case",
    "TrajectorySet", "ScenarioSelection", "apply_trajectory", "islands", "scenario_count",
    "CommitmentDecision", "ScenarioDispatch", "assemble_master",
    "build_commitment_block", "build_dispatch_block", "evaluate_cost",
    "build_dual", "build_merged_subproblem", "solve_subproblem",
    "CcgConfig", "RobustSchedule", "compare_commitments", "run_ccg",
    "OicpaConfig", "run_oicpa",
]
