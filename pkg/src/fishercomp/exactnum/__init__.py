"""Exact rationals, an exact LP solver and max-flow primitives."""
from .maxflow import Flow, FlowNetwork, cut_capacity, max_flow, residual_reachable
from .rational import Rational, parse_rational, render_rational
from .simplex import Constraint, LinearProgram, LpSolution, LpStatus, Relation, Tableau, check_feasible, lp_solve

__all__ = [
    "Constraint", "Flow", "FlowNetwork", "LinearProgram", "LpSolution", "LpStatus",
    "Rational", "Relation", "Tableau", "check_feasible", "cut_capacity", "lp_solve",
    "max_flow", "parse_rational", "render_rational", "residual_reachable",
]
