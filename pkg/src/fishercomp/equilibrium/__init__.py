from .ce import CEVerdict, CompetitiveEquilibrium, competitive_equilibrium, reconstruct, verify_ce
from .maximin import (
    DEFAULT_FACTORS,
    DeviationEvidence,
    MaximinVerdict,
    Verdict,
    evaluate_deviation,
    grid_deviations,
    seller_min_revenue,
    verify_maximin,
)
from .table1 import BestResponse, response_prices, table1_best_response
from .uniqueness import Uniqueness, UniquenessReport, check_uniqueness, uniqueness_hypotheses

__all__ = [
    "BestResponse", "CEVerdict", "CompetitiveEquilibrium", "DEFAULT_FACTORS", "DeviationEvidence",
    "MaximinVerdict", "Uniqueness", "UniquenessReport", "Verdict", "check_uniqueness",
    "competitive_equilibrium", "evaluate_deviation", "grid_deviations", "reconstruct", "response_prices",
    "seller_min_revenue", "table1_best_response", "uniqueness_hypotheses", "verify_ce", "verify_maximin",
]
