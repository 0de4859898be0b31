"""Deleting the common part of two stable allocations.

Removing an amount ``c`` of item ``j`` from buyer ``i`` (both allocations
hold at least ``c``) charges ``i`` for it, then either drops ``j`` (when
``c = 1``) or rescales what is left of ``j`` to a unit item, shrinking its
prices and values by ``1 - c`` so every bang-per-buck is unchanged.  Both
allocations stay stable under the transform.
"""
from dataclasses import dataclass
from fractions import Fraction

from ..errors import InternalInconsistency, NotStableInput
from ..market.model import Allocation, Market, PreferenceProfile, PricingProfile, PriorityProfile
from .predicates import is_stable


@dataclass(frozen=True)
class ReducedInstance:
    market: Market
    pricing: PricingProfile
    priorities: PriorityProfile
    x: Allocation
    y: Allocation
    preferences: PreferenceProfile = None
    kept_items: tuple = ()  # original index of every remaining item


def _drop_column(rows, j):
    return tuple(tuple(v for k, v in enumerate(row) if k != j) for row in rows)


def _delete(state, i, j, c):
    market, pricing, priorities, x, y, prefs, kept = state
    budgets = list(market.budgets)
    budgets[i] -= pricing.prices[i][j] * c
    if c == 1:
        market = Market(
            market.buyers, tuple(budgets), market.sellers,
            tuple(g for k, g in enumerate(market.items) if k != j),
            tuple(s for k, s in enumerate(market.item_seller) if k != j),
            _drop_column(market.valuations, j),
        )
        pricing = PricingProfile(_drop_column(pricing.prices, j), pricing.mode)
        priorities = PriorityProfile(tuple(r for k, r in enumerate(priorities.ranks) if k != j))
        x = [list(r) for r in _drop_column(x, j)]
        y = [list(r) for r in _drop_column(y, j)]
        if prefs is not None:
            prefs = PreferenceProfile(_drop_column(prefs.ranks, j))
        kept = kept[:j] + kept[j + 1:]
        return market, pricing, priorities, x, y, prefs, kept
    scale = 1 - c
    vals = [list(r) for r in market.valuations]
    prices = [list(r) for r in pricing.prices]
    for k in range(market.n):
        vals[k][j] *= scale
        prices[k][j] *= scale
        for z in (x, y):
            z[k][j] = (z[k][j] - c if k == i else z[k][j]) / scale
    market = Market(market.buyers, tuple(budgets), market.sellers, market.items,
                    market.item_seller, tuple(tuple(r) for r in vals))
    pricing = PricingProfile(tuple(tuple(r) for r in prices), pricing.mode)
    return market, pricing, priorities, x, y, prefs, kept


def _alloc(rows):
    return Allocation(tuple(tuple(r) for r in rows))


def reduce_common_part(market, pricing, priorities, x, y, preferences=None):
    """Strip min(x, y) entry by entry until the supports are disjoint."""
    for name, z in (("x", x), ("y", y)):
        report = is_stable(market, pricing, priorities, z, preferences)
        if not report.stable:
            raise NotStableInput(f"{name} is not stable: {[v.reason.value for v in report.violations]}")
    state = (market, pricing, priorities, [list(r) for r in x.x], [list(r) for r in y.x],
             preferences, tuple(range(market.m)))
    while True:
        xs, ys = state[3], state[4]
        common = [
            (i, j) for i in range(len(xs)) for j in range(len(xs[i]))
            if xs[i][j] > 0 and ys[i][j] > 0
        ]
        if not common:
            break
        i, j = common[0]
        state = _delete(state, i, j, min(xs[i][j], ys[i][j]))
    market, pricing, priorities, xs, ys, prefs, kept = state
    out = ReducedInstance(market, pricing, priorities, _alloc(xs), _alloc(ys), prefs, kept)
    for name, z in (("x", out.x), ("y", out.y)):
        if not is_stable(market, pricing, priorities, z, prefs).stable:
            raise InternalInconsistency(f"reduced {name} lost stability")
    return out
