"""Compatibility and stability of allocations.

Buyer preferences default to the bang-per-buck order induced by the prices;
callers that define preferences differently (the duopoly market) pass an
explicit ``PreferenceProfile``.  Only items a buyer values positively count
as available to it.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple

from ..errors import InternalInconsistency
from ..market.model import INF, bang_per_buck, obtainable_fraction, preference_profile


class Reason(str, Enum):
    BUDGET_INFEASIBLE = "BUDGET_INFEASIBLE"
    UNVALUED_ITEM_HELD = "UNVALUED_ITEM_HELD"
    UNSPENT_BUDGET_AVAILABLE_ITEM = "UNSPENT_BUDGET_AVAILABLE_ITEM"
    PREFERRED_ITEM_AVAILABLE = "PREFERRED_ITEM_AVAILABLE"


@dataclass(frozen=True)
class CompatibilityCheck:
    ok: bool
    buyer: Optional[int] = None
    held_item: Optional[int] = None
    better_item: Optional[int] = None
    reason: Optional[str] = None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class BuyerRecord:
    r: object  # Fraction, or INF for an empty support
    budget_spent: Fraction
    budget_depleted: bool


@dataclass(frozen=True)
class Violation:
    buyer: int
    item: Optional[int]
    reason: Reason


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    buyers: Tuple[BuyerRecord, ...]
    violations: Tuple[Violation, ...] = field(default=())

    def __bool__(self):
        return self.stable


def _prefs(market, pricing, preferences):
    return preferences if preferences is not None else preference_profile(market, pricing)


def is_compatible(market, pricing, priorities, allocation, preferences=None):
    """Each buyer's current spending buys a best bundle over what it can still get."""
    prefs = _prefs(market, pricing, preferences)
    x = allocation.x
    for i in range(market.n):
        if allocation.spend(pricing, i) > market.budgets[i]:
            return CompatibilityCheck(False, i, reason=Reason.BUDGET_INFEASIBLE.value)
        held = allocation.support(i)
        for j in held:
            if market.valuations[i][j] == 0:
                return CompatibilityCheck(False, i, j, reason=Reason.UNVALUED_ITEM_HELD.value)
        if not held:
            continue
        worst = max(held, key=lambda j: (prefs.rank(i, j), j))
        for j in market.interested(i):
            if prefs.rank(i, j) < prefs.rank(i, worst) and x[i][j] < 1:
                if obtainable_fraction(market, pricing, priorities, allocation, i, j) > 0:
                    return CompatibilityCheck(False, i, worst, j, reason=Reason.PREFERRED_ITEM_AVAILABLE.value)
    return CompatibilityCheck(True)


def _direct_check(market, pricing, priorities, allocation, prefs):
    x = allocation.x
    records, violations = [], []
    for i in range(market.n):
        spent = allocation.spend(pricing, i)
        depleted = spent == market.budgets[i]
        held = allocation.support(i)
        r = min((bang_per_buck(market, pricing, i, j) for j in held), default=INF)
        records.append(BuyerRecord(r, spent, depleted))
        if spent > market.budgets[i]:
            violations.append(Violation(i, None, Reason.BUDGET_INFEASIBLE))
        for j in held:
            if market.valuations[i][j] == 0:
                violations.append(Violation(i, j, Reason.UNVALUED_ITEM_HELD))
        worst_rank = max((prefs.rank(i, j) for j in held if prefs.rank(i, j) is not None), default=None)
        for j in market.interested(i):
            if x[i][j] == 1:
                continue
            # (3.b): nothing of j is left for i beyond its own share
            if obtainable_fraction(market, pricing, priorities, allocation, i, j) == 0:
                continue
            # (3.a): depleted, and j no better than the worst item bought
            if not depleted:
                violations.append(Violation(i, j, Reason.UNSPENT_BUDGET_AVAILABLE_ITEM))
            elif worst_rank is not None and prefs.rank(i, j) < worst_rank:
                violations.append(Violation(i, j, Reason.PREFERRED_ITEM_AVAILABLE))
    return records, violations


def _lemma2_check(market, pricing, priorities, allocation, prefs):
    if not is_compatible(market, pricing, priorities, allocation, prefs):
        return False
    for i in range(market.n):
        if allocation.spend(pricing, i) == market.budgets[i]:
            continue
        for j in market.interested(i):
            if obtainable_fraction(market, pricing, priorities, allocation, i, j) > 0:
                return False
    return True


def is_stable(market, pricing, priorities, allocation, preferences=None):
    """Check budget feasibility, valued support and the no-blocking condition,
    then cross-check against "compatible and (depleted or gets everything)"."""
    prefs = _prefs(market, pricing, preferences)
    records, violations = _direct_check(market, pricing, priorities, allocation, prefs)
    stable = not violations
    if stable != _lemma2_check(market, pricing, priorities, allocation, prefs):
        raise InternalInconsistency("direct stability check and compatibility characterisation disagree")
    return StabilityReport(stable, tuple(records), tuple(violations))
