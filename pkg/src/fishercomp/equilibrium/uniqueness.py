"""Syntactic uniqueness guarantee plus an empirical count of stable allocations."""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..market.model import is_natural, preference_profile
from ..oracle import StablePoints, stable_points


class Uniqueness(str, Enum):
    UNIQUE_GUARANTEED = "UNIQUE_GUARANTEED"
    NOT_APPLICABLE = "NOT_APPLICABLE"


@dataclass(frozen=True)
class UniquenessReport:
    guarantee: Uniqueness
    reasons: tuple  # failed hypotheses, empty when guaranteed
    empirical: Optional[StablePoints]


def uniqueness_hypotheses(market, pricing, priorities, preferences=None):
    """Return the list of unmet hypotheses (strict preferences, strict and
    natural priorities).  Priorities only need to separate the buyers that
    value the item."""
    prefs = preferences if preferences is not None else preference_profile(market, pricing)
    failed = []
    for i in range(market.n):
        if not prefs.is_strict(i):
            failed.append(f"buyer {market.buyers[i]} has tied preferences")
    for j in range(market.m):
        interested = [i for i in range(market.n) if market.valuations[i][j] > 0]
        if not priorities.is_strict(j, interested):
            failed.append(f"item {market.items[j]} has tied priorities")
    if not is_natural(priorities, pricing):
        failed.append("priorities are not natural")
    return failed


def check_uniqueness(market, pricing, priorities, preferences=None, empirical=True, enforce_cap=True):
    failed = uniqueness_hypotheses(market, pricing, priorities, preferences)
    guarantee = Uniqueness.NOT_APPLICABLE if failed else Uniqueness.UNIQUE_GUARANTEED
    points = None
    if empirical:
        points = stable_points(market, pricing, priorities, preferences, enforce_cap=enforce_cap)
    return UniquenessReport(guarantee, tuple(failed), points)
