"""Competitive equilibrium of a linear Fisher market.

Prices are found numerically with proportional-response dynamics: each
buyer re-splits its budget in proportion to the utility each item gave it
last round, and an item's price is the money it received.  Whenever the
iterate is close enough, the prices are rounded to nearby rationals and an
exact allocation is sought by max-flow over maximum bang-per-buck edges; the
first candidate that passes the exact check is returned.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from ..errors import NoConvergence, ValidationError
from ..exactnum import FlowNetwork, max_flow
from ..market.model import Allocation

_DENOMINATOR_CAPS = (1, 10, 100, 1000, 10 ** 4, 10 ** 5, 10 ** 6)


@dataclass(frozen=True)
class CEVerdict:
    ok: bool
    kind: Optional[str] = None  # NOT_CLEARED, BUDGET_NOT_SPENT, NOT_MAX_BANG_PER_BUCK, ...
    buyer: Optional[int] = None
    item: Optional[int] = None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class CompetitiveEquilibrium:
    prices: Tuple  # Fractions when exact, floats otherwise
    allocation: Optional[Allocation]
    utilities: Tuple
    gap: float
    exact: bool
    iterations: int


def verify_ce(market, prices, allocation):
    """Exact check: every item clears, every buyer spends its budget and
    buys only items of maximum bang-per-buck."""
    prices = [Fraction(p) for p in prices]
    x = allocation.x
    for j in range(market.m):
        if prices[j] <= 0:
            return CEVerdict(False, "NON_POSITIVE_PRICE", item=j)
        if allocation.item_total(j) != 1:
            return CEVerdict(False, "NOT_CLEARED", item=j)
    for i in range(market.n):
        spent = sum((prices[j] * x[i][j] for j in range(market.m)), Fraction(0))
        if spent != market.budgets[i]:
            return CEVerdict(False, "BUDGET_NOT_SPENT" if spent < market.budgets[i] else "BUDGET_EXCEEDED", buyer=i)
        best = max(market.valuations[i][j] / prices[j] for j in range(market.m))
        for j in range(market.m):
            if x[i][j] > 0 and market.valuations[i][j] / prices[j] != best:
                return CEVerdict(False, "NOT_MAX_BANG_PER_BUCK", buyer=i, item=j)
    return CEVerdict(True)


def _mbb_allocation(market, prices):
    """An allocation spending every budget on maximum bang-per-buck items and
    clearing every item at ``prices``, if one exists."""
    if any(p <= 0 for p in prices) or sum(prices) != sum(market.budgets):
        return None
    big = sum(market.budgets) + sum(prices)
    cap = {}
    for i in range(market.n):
        cap[("s", ("i", i))] = market.budgets[i]
        best = max(market.valuations[i][j] / prices[j] for j in range(market.m))
        for j in range(market.m):
            if market.valuations[i][j] > 0 and market.valuations[i][j] / prices[j] == best:
                cap[(("i", i), ("j", j))] = big
    for j in range(market.m):
        cap[(("j", j), "t")] = prices[j]
    vertices = ("s",) + tuple(("i", i) for i in range(market.n)) + tuple(("j", j) for j in range(market.m)) + ("t",)
    flow = max_flow(FlowNetwork(vertices, cap, "s", "t"))
    if flow.value != sum(market.budgets):
        return None
    return Allocation.from_entries(market.n, market.m, {
        (i, j): flow(("i", i), ("j", j)) / prices[j]
        for i in range(market.n) for j in range(market.m) if flow(("i", i), ("j", j)) > 0
    })


def reconstruct(market, prices):
    """Round float prices to small-denominator rationals and verify exactly."""
    tried = set()
    for cap in _DENOMINATOR_CAPS:
        cand = tuple(Fraction(float(p)).limit_denominator(cap) for p in prices)
        if cand in tried:
            continue
        tried.add(cand)
        alloc = _mbb_allocation(market, cand)
        if alloc is not None and verify_ce(market, cand, alloc):
            return cand, alloc
    return None


def _gap(V, B, p, u):
    mbb = (V / p).max(axis=1)
    return float(1.0 - u.sum() / (B * mbb).sum())


def competitive_equilibrium(market, tolerance=1e-9, max_iter=100_000, check_every=50):
    if any(b <= 0 for b in market.budgets):
        raise ValidationError("competitive equilibrium needs positive budgets")
    for i in range(market.n):
        if not market.interested(i):
            raise ValidationError(f"buyer {market.buyers[i]!r} values no item")
    V = np.array([[float(v) for v in row] for row in market.valuations])
    B = np.array([float(b) for b in market.budgets])
    bids = B[:, None] * V / V.sum(axis=1, keepdims=True)
    gap = float("inf")
    for it in range(1, max_iter + 1):
        p = bids.sum(axis=0)
        x = bids / p
        u = (V * x).sum(axis=1)
        if it % check_every == 0 or it == max_iter:
            gap = _gap(V, B, p, u)
            if gap < 1e-4:
                exact = reconstruct(market, p)
                if exact is not None:
                    prices, alloc = exact
                    utils = tuple(
                        sum((market.valuations[i][j] * alloc.x[i][j] for j in range(market.m)), Fraction(0))
                        for i in range(market.n)
                    )
                    return CompetitiveEquilibrium(prices, alloc, utils, 0.0, True, it)
            if gap < tolerance:
                return CompetitiveEquilibrium(tuple(float(v) for v in p), None, tuple(float(v) for v in u), gap, False, it)
        bids = B[:, None] * V * x / u[:, None]
    raise NoConvergence(f"no equilibrium within {max_iter} iterations (last gap {gap:.3g})", gap)
