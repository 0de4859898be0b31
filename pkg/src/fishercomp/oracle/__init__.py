from .enumeration import (
    Case,
    CaseLP,
    EnumerationStats,
    Extremum,
    RevenueOptimalSummary,
    StablePoints,
    StableSetSummary,
    enumerate_cases,
    revenue_optimal_extrema,
    stable_points,
    stable_set_extrema,
    stable_seller_min,
    stable_total_max,
)
from .matching_gadget import (
    BipartiteGraph,
    MatchingGadget,
    all_small_graphs,
    matching_gadget_build,
    matching_gadget_seller_variant,
    maximal_matchings,
    min_maximal_matching,
    parse_edge_list,
)
from .sat_gadget import (
    SatGadget,
    SatInstance,
    SatMaxResult,
    all_small_instances,
    extract_assignment,
    induced_allocation,
    max_sat,
    parse_dimacs,
    sat_gadget_build,
    sat_gadget_max_revenue,
)
