"""Maximin equilibrium checks for uniform pricing.

A seller's guaranteed revenue ``R_k(p)`` is its smallest revenue over the
revenue-optimal stable allocations.  A deviation ``p'`` is harmless when
some revenue-optimal stable allocation at ``p'`` pays the seller no more
than it earns now.  Such an allocation is found by starting the stable
Edmonds-Karp algorithm from a compatible allocation in which other sellers
already absorb the buyers' money; failing that, ``R_k(p')`` is computed
exactly by enumeration.
"""
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple

from ..errors import NotStableInput, NotUniform, SizeCapExceeded, ValidationError
from ..market.model import Allocation, PricingProfile, natural_priority, revenue
from ..oracle import revenue_optimal_extrema
from ..revenue import max_revenue_lp, stable_edmonds_karp, tied_priorities
from ..stability import is_compatible, is_stable
from ..stability.predicates import Reason

F = Fraction
DEFAULT_FACTORS = (F(1, 4), F(1, 3), F(1, 2), F(2, 3), F(1), F(4, 3), F(3, 2), F(2), F(3), F(4))
MAX_DEVIATIONS_PER_SELLER = 10 ** 4


def seller_min_revenue(market, pricing, k, priorities=None):
    """``R_k(p)``: seller k's worst revenue over revenue-optimal stable allocations."""
    priorities = priorities if priorities is not None else natural_priority(market, pricing)
    summary = revenue_optimal_extrema(market, pricing, priorities, sellers=[k])
    return summary.seller_min[k].value


class Verdict(str, Enum):
    CERTIFIED = "CERTIFIED"
    REFUTED = "REFUTED"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class DeviationEvidence:
    seller: int
    prices: Tuple[Fraction, ...]
    current: Fraction  # seller's revenue before deviating
    status: str  # WITNESS, ORACLE, REFUTED or UNKNOWN
    bound: Optional[Fraction] = None  # rev_k of the covering allocation, or exact R_k(p')
    witness: Optional[Allocation] = None  # compatible start under p'
    covering: Optional[Allocation] = None  # revenue-optimal stable allocation covering the witness


@dataclass(frozen=True)
class MaximinVerdict:
    verdict: Verdict
    evidence: Tuple[DeviationEvidence, ...]


def repair_to_compatible(market, pricing, x):
    """Drop holdings until the allocation is compatible under ``pricing``."""
    prio = tied_priorities(market)
    rows = [list(r) for r in x.x]
    while True:
        alloc = Allocation(tuple(tuple(r) for r in rows))
        check = is_compatible(market, pricing, prio, alloc)
        if check:
            return alloc
        if check.reason == Reason.BUDGET_INFEASIBLE.value:
            rows[check.buyer] = [F(0)] * market.m
        else:
            rows[check.buyer][check.held_item] = F(0)


def candidate_witnesses(market, pricing, new_pricing, allocation, k):
    old, new = pricing.item_prices(), new_pricing.item_prices()
    raised = {j for j in range(market.m) if new[j] > old[j]}
    own = set(market.seller_items(k))
    seen = []
    for drop in (raised, own):
        rows = [[v if j not in drop else F(0) for j, v in enumerate(r)] for r in allocation.x]
        cand = repair_to_compatible(market, new_pricing, Allocation(tuple(tuple(r) for r in rows)))
        if cand not in seen:
            seen.append(cand)
    zero = Allocation.zeros(market.n, market.m)
    if zero not in seen:
        seen.append(zero)
    return seen


def evaluate_deviation(market, pricing, allocation, k, new_prices):
    new_pricing = PricingProfile.uniform(new_prices, market.n)
    current = revenue(market, pricing, allocation).per_seller[k]
    for start in candidate_witnesses(market, pricing, new_pricing, allocation, k):
        y = stable_edmonds_karp(market, new_pricing, start=start).allocation
        got = revenue(market, new_pricing, y).per_seller[k]
        if got <= current:
            return DeviationEvidence(k, tuple(new_prices), current, "WITNESS", got, start, y)
    try:
        exact = seller_min_revenue(market, new_pricing, k)
    except SizeCapExceeded:
        return DeviationEvidence(k, tuple(new_prices), current, "UNKNOWN")
    status = "REFUTED" if exact > current else "ORACLE"
    return DeviationEvidence(k, tuple(new_prices), current, status, exact)


def grid_deviations(market, pricing, k, factors=DEFAULT_FACTORS):
    own = market.seller_items(k)
    if len(factors) ** len(own) > MAX_DEVIATIONS_PER_SELLER:
        raise SizeCapExceeded(
            f"{len(factors)}^{len(own)} grid deviations for seller {market.sellers[k]!r} "
            f"exceed {MAX_DEVIATIONS_PER_SELLER}"
        )
    base = pricing.item_prices()
    out = []
    for combo in itertools.product(factors, repeat=len(own)):
        if all(f == 1 for f in combo):
            continue
        prices = list(base)
        for j, f in zip(own, combo):
            prices[j] = base[j] * f
        out.append((k, tuple(prices)))
    return out


def deviation_seller(market, pricing, prices):
    base = pricing.item_prices()
    changed = {market.item_seller[j] for j in range(market.m) if prices[j] != base[j]}
    if len(changed) != 1:
        raise ValidationError("a deviation must reprice the items of exactly one seller")
    return changed.pop()


def _evaluate_star(args):
    return evaluate_deviation(*args)


def verify_maximin(market, pricing, allocation, deviations=None, factors=DEFAULT_FACTORS,
                   use_grid=True, jobs=1, stop_on_refutation=True):
    """Check one-seller price deviations against the seller's guaranteed revenue.

    ``deviations`` is an optional list of full item-price vectors.
    """
    if not pricing.is_uniform:
        raise NotUniform("maximin analysis needs uniform prices")
    report = is_stable(market, pricing, tied_priorities(market), allocation)
    if not report.stable:
        raise NotStableInput("allocation is not stable at the given prices")
    best = max_revenue_lp(market, pricing).revenue
    if revenue(market, pricing, allocation).total != best:
        raise ValidationError("allocation is stable but not revenue-optimal")
    todo = []
    for prices in deviations or ():
        prices = tuple(F(p) for p in prices)
        todo.append((deviation_seller(market, pricing, prices), prices))
    if use_grid:
        for k in range(len(market.sellers)):
            todo.extend(grid_deviations(market, pricing, k, factors))
    args = [(market, pricing, allocation, k, prices) for k, prices in todo]
    evidence = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            evidence = list(pool.map(_evaluate_star, args, chunksize=8))
    else:
        for a in args:
            ev = evaluate_deviation(*a)
            evidence.append(ev)
            if ev.status == "REFUTED" and stop_on_refutation:
                break
    statuses = {ev.status for ev in evidence}
    if "REFUTED" in statuses:
        verdict = Verdict.REFUTED
    elif "UNKNOWN" in statuses:
        verdict = Verdict.UNKNOWN
    else:
        verdict = Verdict.CERTIFIED
    return MaximinVerdict(verdict, tuple(evidence))
