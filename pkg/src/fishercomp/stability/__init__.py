from .common_part import ReducedInstance, reduce_common_part
from .gale_shapley import GaleShapleyResult, ProposalCycle, SolverStats, fractional_gale_shapley, run_gale_shapley
from .predicates import (
    BuyerRecord,
    CompatibilityCheck,
    Reason,
    StabilityReport,
    Violation,
    is_compatible,
    is_stable,
)

__all__ = [
    "BuyerRecord",
    "CompatibilityCheck",
    "GaleShapleyResult",
    "ProposalCycle",
    "Reason",
    "ReducedInstance",
    "SolverStats",
    "StabilityReport",
    "Violation",
    "fractional_gale_shapley",
    "is_compatible",
    "is_stable",
    "reduce_common_part",
    "run_gale_shapley",
]
