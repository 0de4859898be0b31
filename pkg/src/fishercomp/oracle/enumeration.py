"""Exact extrema over the set of stable allocations.

The stable set is a finite union of polytopes.  For each buyer pick a case:

* ``l`` in ``1..K`` (K = number of preference levels): the buyer spends its
  whole budget, buys nothing below level ``l``, and every item above level
  ``l`` is out of reach (sold out, with no part held by anyone the item ranks
  below the buyer);
* ``K + 1``: every interested item is out of reach, budget unconstrained.

Buyers with zero budget have a single trivial case.  Each combination is a
polytope of stable allocations, and every stable allocation lies in at least
one of them.  A depth-first search over buyers prunes infeasible partial
combinations with a phase-one LP and skips combinations whose constraint
sets coincide.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from ..errors import InternalInconsistency, SizeCapExceeded
from ..exactnum import LpStatus, Relation, Tableau
from ..market.model import Allocation, preference_profile
from ..stability import is_stable

MAX_BUYERS = 5
MAX_ITEMS = 7
MAX_LP_SOLVES = 10 ** 6


@dataclass(frozen=True)
class Case:
    """One polytope of stable allocations."""

    zeros: frozenset  # (i, j) pairs forced to 0
    full: frozenset  # items that must be sold out
    depleted: frozenset  # buyers that must spend their budget

    def build(self, market, pricing):
        cols = {}
        for i in range(market.n):
            for j in market.interested(i):
                if (i, j) not in self.zeros:
                    cols[(i, j)] = len(cols)
        rows = []
        for j in range(market.m):
            coeffs = {cols[(i, j)]: 1 for i in range(market.n) if (i, j) in cols}
            if j in self.full:
                if not coeffs:
                    return None
                rows.append((coeffs, Relation.EQ, 1))
            elif coeffs:
                rows.append((coeffs, Relation.LE, 1))
        for i in range(market.n):
            coeffs = {cols[(i, j)]: pricing.prices[i][j] for j in range(market.m) if (i, j) in cols}
            B = market.budgets[i]
            if i in self.depleted:
                if not coeffs and B > 0:
                    return None
                if coeffs:
                    rows.append((coeffs, Relation.EQ, B))
            elif coeffs:
                rows.append((coeffs, Relation.LE, B))
        return cols, rows


class CaseLP:
    """A feasible case with its tableau, reusable across objectives."""

    def __init__(self, market, pricing, case, cols, rows):
        self.market = market
        self.pricing = pricing
        self.case = case
        self.cols = cols
        self.rows = rows
        self.tableau = Tableau(len(cols), rows)
        self.solves = 0

    def feasible(self):
        return self.tableau.phase_one()

    def objective(self, weights):
        """``weights`` maps (i, j) to a coefficient."""
        return {self.cols[ij]: w for ij, w in weights.items() if ij in self.cols and w}

    def optimize(self, weights, maximize=True):
        self.solves += 1
        status, values, value = self.tableau.optimize(self.objective(weights), maximize)
        if status != LpStatus.OPTIMAL:
            raise InternalInconsistency(f"bounded LP reported {status}")
        return value, self.allocation(values)

    def allocation(self, values):
        return Allocation.from_entries(
            self.market.n, self.market.m, {ij: values[c] for ij, c in self.cols.items() if values[c]}
        )

    def restricted(self, extra_rows):
        """A fresh LP for this case with additional constraints."""
        rows = list(self.rows)
        for weights, rel, rhs in extra_rows:
            rows.append((self.objective(weights), rel, rhs))
        return CaseLP(self.market, self.pricing, self.case, self.cols, rows)


def _buyer_cases(market, priorities, prefs, i):
    if market.budgets[i] == 0:
        return [(frozenset(), frozenset(), frozenset())]
    levels = prefs.levels(i)
    n = market.n

    def unreachable(items):
        zeros = {(k, j) for j in items for k in range(n) if k != i and priorities.above(j, i, k)}
        return zeros, set(items)

    cases = []
    for l in range(1, len(levels) + 1):
        above = [j for lvl in levels[: l - 1] for j in lvl]
        below = [j for lvl in levels[l:] for j in lvl]
        zeros, full = unreachable(above)
        zeros |= {(i, j) for j in below}
        cases.append((frozenset(zeros), frozenset(full), frozenset({i})))
    zeros, full = unreachable([j for lvl in levels for j in lvl])
    cases.append((frozenset(zeros), frozenset(full), frozenset()))
    return cases


def check_size(market, enforce=True):
    if enforce and (market.n > MAX_BUYERS or market.m > MAX_ITEMS):
        raise SizeCapExceeded(
            f"exact enumeration is capped at {MAX_BUYERS} buyers and {MAX_ITEMS} items "
            f"(got {market.n} and {market.m})"
        )


@dataclass
class EnumerationStats:
    explored: int = 0
    feasible: int = 0
    lp_solves: int = 0


def enumerate_cases(market, pricing, priorities, preferences=None, stats=None, enforce_cap=True, prune=None):
    """Yield a ``CaseLP`` for every feasible, distinct case combination.

    ``prune(lp)`` may cut a partial combination: its polytope contains every
    completion's, so bounds computed on it are valid for the whole subtree.
    """
    check_size(market, enforce_cap)
    prefs = preferences if preferences is not None else preference_profile(market, pricing)
    stats = stats if stats is not None else EnumerationStats()
    per_buyer = [_buyer_cases(market, priorities, prefs, i) for i in range(market.n)]
    seen = set()

    def lp_for(case):
        built = case.build(market, pricing)
        if built is None:
            return None
        stats.lp_solves += 1
        if stats.lp_solves > MAX_LP_SOLVES:
            raise SizeCapExceeded(f"more than {MAX_LP_SOLVES} LP solves")
        lp = CaseLP(market, pricing, case, *built)
        return lp if lp.feasible() else None

    def dfs(depth, zeros, full, depleted):
        for z, f, d in per_buyer[depth]:
            case = Case(zeros | z, full | f, depleted | d)
            key = (depth, case)
            if key in seen:
                continue
            seen.add(key)
            stats.explored += 1
            lp = lp_for(case)
            if lp is None:
                continue
            if prune is not None and prune(lp):
                continue
            if depth + 1 == market.n:
                stats.feasible += 1
                yield lp
            else:
                yield from dfs(depth + 1, case.zeros, case.full, case.depleted)

    if market.n == 0:
        return
    yield from dfs(0, frozenset(), frozenset(), frozenset())


def _weights_total(market, pricing):
    return {(i, j): pricing.prices[i][j] for i in range(market.n) for j in market.interested(i)}


def _weights_seller(market, pricing, k):
    return {
        (i, j): pricing.prices[i][j]
        for i in range(market.n) for j in market.interested(i) if market.item_seller[j] == k
    }


@dataclass(frozen=True)
class Extremum:
    value: Fraction
    allocation: Allocation


@dataclass(frozen=True)
class StableSetSummary:
    cases_explored: int
    feasible_cases: int
    total_min: Extremum
    total_max: Extremum
    seller_min: Tuple[Extremum, ...]
    seller_max: Tuple[Extremum, ...]

    @property
    def selection_free(self):
        return all(a.value == b.value for a, b in zip(self.seller_min, self.seller_max))


def _better(current, value, maximize):
    return current is None or (value > current.value if maximize else value < current.value)


def _verify(market, pricing, priorities, prefs, alloc):
    if not is_stable(market, pricing, priorities, alloc, prefs).stable:
        raise InternalInconsistency("an oracle representative is not stable")


def stable_set_extrema(market, pricing, priorities, preferences=None, enforce_cap=True):
    """Min and max of total and per-seller revenue over all stable allocations."""
    prefs = preferences if preferences is not None else preference_profile(market, pricing)
    stats = EnumerationStats()
    objectives = [("total", None, _weights_total(market, pricing))]
    objectives += [("seller", k, _weights_seller(market, pricing, k)) for k in range(len(market.sellers))]
    best = {}
    for lp in enumerate_cases(market, pricing, priorities, prefs, stats, enforce_cap):
        for name, k, w in objectives:
            for maximize in (False, True):
                value, alloc = lp.optimize(w, maximize)
                key = (name, k, maximize)
                if _better(best.get(key), value, maximize):
                    best[key] = Extremum(value, alloc)
        stats.lp_solves += lp.solves
    if not best:
        raise InternalInconsistency("no stable allocation found; one always exists")
    for ext in best.values():
        _verify(market, pricing, priorities, prefs, ext.allocation)
    S = len(market.sellers)
    return StableSetSummary(
        stats.explored, stats.feasible,
        best[("total", None, False)], best[("total", None, True)],
        tuple(best[("seller", k, False)] for k in range(S)),
        tuple(best[("seller", k, True)] for k in range(S)),
    )


@dataclass(frozen=True)
class RevenueOptimalSummary:
    revenue: Fraction  # R(p), best total revenue over stable allocations
    seller_min: Tuple[Extremum, ...]  # R_k(p) with a witness
    seller_max: Tuple[Extremum, ...]


def revenue_optimal_extrema(market, pricing, priorities, preferences=None, sellers=None, enforce_cap=True):
    """Per-seller revenue range over the revenue-optimal stable allocations."""
    prefs = preferences if preferences is not None else preference_profile(market, pricing)
    total_w = _weights_total(market, pricing)
    leaves = []
    for lp in enumerate_cases(market, pricing, priorities, prefs, enforce_cap=enforce_cap):
        value, _ = lp.optimize(total_w, True)
        leaves.append((value, lp))
    R = max(v for v, _ in leaves)
    sellers = range(len(market.sellers)) if sellers is None else sellers
    lo, hi = {}, {}
    for value, lp in leaves:
        if value != R:
            continue
        face = lp.restricted([(total_w, Relation.GE, R)])
        if not face.feasible():
            raise InternalInconsistency("optimal face of a case LP is empty")
        for k in sellers:
            w = _weights_seller(market, pricing, k)
            v, a = face.optimize(w, False)
            if _better(lo.get(k), v, False):
                lo[k] = Extremum(v, a)
            v, a = face.optimize(w, True)
            if _better(hi.get(k), v, True):
                hi[k] = Extremum(v, a)
    for ext in list(lo.values()) + list(hi.values()):
        _verify(market, pricing, priorities, prefs, ext.allocation)
    return RevenueOptimalSummary(
        R, tuple(lo.get(k) for k in range(len(market.sellers))), tuple(hi.get(k) for k in range(len(market.sellers)))
    )


@dataclass(frozen=True)
class StablePoints:
    """Either finitely many stable allocations, or a continuum."""

    points: Tuple[Allocation, ...]
    continuum: bool

    @property
    def count(self):
        return None if self.continuum else len(self.points)


def stable_points(market, pricing, priorities, preferences=None, enforce_cap=True):
    prefs = preferences if preferences is not None else preference_profile(market, pricing)
    points = []
    for lp in enumerate_cases(market, pricing, priorities, prefs, enforce_cap=enforce_cap):
        point = None
        for ij in lp.cols:
            lo, a = lp.optimize({ij: 1}, False)
            hi, _ = lp.optimize({ij: 1}, True)
            if lo != hi:
                _verify(market, pricing, priorities, prefs, a)
                return StablePoints((a,), True)
            point = a
        if point is None:
            point = Allocation.zeros(market.n, market.m)
        if point not in points:
            _verify(market, pricing, priorities, prefs, point)
            points.append(point)
    return StablePoints(tuple(points), False)


def stable_seller_min(market, pricing, priorities, k, preferences=None, stop_at=None, enforce_cap=True):
    """Seller k's smallest revenue over all stable allocations.

    With ``stop_at`` the search ends at the first case whose minimum is at
    most that value; the returned extremum is then only an upper bound on
    the true minimum (still attained by a stable allocation).
    """
    prefs = preferences if preferences is not None else preference_profile(market, pricing)
    w = _weights_seller(market, pricing, k)
    best = None
    for lp in enumerate_cases(market, pricing, priorities, prefs, enforce_cap=enforce_cap):
        value, alloc = lp.optimize(w, False)
        if _better(best, value, False):
            best = Extremum(value, alloc)
        if stop_at is not None and best.value <= stop_at:
            break
    if best is None:
        raise InternalInconsistency("no stable allocation found; one always exists")
    _verify(market, pricing, priorities, prefs, best.allocation)
    return best


def stable_total_max(market, pricing, priorities, preferences=None, incumbent=None, enforce_cap=True):
    """Largest total revenue over stable allocations, by branch and bound.

    ``incumbent`` is the revenue of a known stable allocation; subtrees whose
    relaxation cannot beat it are skipped.  Returns ``None`` when nothing
    beats the incumbent, otherwise the better extremum.
    """
    prefs = preferences if preferences is not None else preference_profile(market, pricing)
    w = _weights_total(market, pricing)
    best = [None]

    def bound():
        if best[0] is not None:
            return best[0].value
        return incumbent

    def prune(lp):
        limit = bound()
        if limit is None:
            return False
        value, _ = lp.optimize(w, True)
        return value <= limit

    for lp in enumerate_cases(market, pricing, priorities, prefs, enforce_cap=enforce_cap, prune=prune):
        value, alloc = lp.optimize(w, True)
        limit = bound()
        if limit is None or value > limit:
            best[0] = Extremum(value, alloc)
    if best[0] is not None:
        _verify(market, pricing, priorities, prefs, best[0].allocation)
    return best[0]
