"""Revenue-optimal stable allocations under uniform prices.

With one price per item and all buyers tied in every priority, a payment
``f_ij = p_j x_ij`` is a flow in the network

    s --B_i--> buyer i --p_j--> item j --p_j--> t      (edge i->j iff v_ij > 0)

and the maximum flow value is the best revenue over budget-feasible
allocations.  Two routes reach a stable allocation achieving it: a pair of
LPs (revenue, then welfare at that revenue) and an Edmonds-Karp variant
whose last hop always goes to the buyer's favourite unsold item.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from .errors import NotCompatibleStart, NotUniform, StabilityCheckFailed
from .exactnum import FlowNetwork, LpStatus, Relation, Tableau, render_rational
from .exactnum.maxflow import Flow, augment, bfs_path, cut_capacity, max_flow, residual_reachable
from .market.model import Allocation, PriorityProfile, revenue
from .stability import is_compatible, is_stable

SOURCE, SINK = "s", "t"


def _buyer(i):
    return ("i", i)


def _item(j):
    return ("j", j)


def _require_uniform(pricing):
    if not pricing.is_uniform:
        raise NotUniform("this operation needs uniform (non-personalized) prices")


def tied_priorities(market):
    return PriorityProfile.all_tied(market.n, market.m)


def build_flow_network(market, pricing):
    _require_uniform(pricing)
    p = pricing.item_prices()
    cap = {}
    for i in range(market.n):
        cap[(SOURCE, _buyer(i))] = market.budgets[i]
        for j in market.interested(i):
            cap[(_buyer(i), _item(j))] = p[j]
    for j in range(market.m):
        cap[(_item(j), SINK)] = p[j]
    vertices = (SOURCE,) + tuple(_buyer(i) for i in range(market.n)) + tuple(_item(j) for j in range(market.m)) + (SINK,)
    return FlowNetwork(vertices, cap, SOURCE, SINK)


def flow_from_allocation(market, pricing, network, allocation):
    p = pricing.item_prices()
    flow = Flow(network)
    for (i, j), v in allocation.nonzero().items():
        amount = p[j] * v
        flow.push(SOURCE, _buyer(i), amount)
        flow.push(_buyer(i), _item(j), amount)
        flow.push(_item(j), SINK, amount)
    return flow


def allocation_from_flow(market, pricing, flow):
    p = pricing.item_prices()
    return Allocation.from_entries(market.n, market.m, {
        (i, j): flow(_buyer(i), _item(j)) / p[j]
        for i in range(market.n) for j in market.interested(i)
        if flow(_buyer(i), _item(j)) > 0
    })


# -- LP route -------------------------------------------------------------


@dataclass(frozen=True)
class RevenueResult:
    allocation: Allocation
    revenue: Fraction


def _feasibility_rows(market, p, cols):
    rows = []
    for j in range(market.m):
        rows.append(({cols[(i, j)]: 1 for i in range(market.n) if (i, j) in cols}, Relation.LE, 1))
    for i in range(market.n):
        rows.append(({cols[(i, j)]: p[j] for j in range(market.m) if (i, j) in cols}, Relation.LE, market.budgets[i]))
    return rows


def max_revenue_lp(market, pricing):
    """Best revenue over budget-feasible allocations, then the most valuable
    allocation attaining it; the latter is stable."""
    _require_uniform(pricing)
    p = pricing.item_prices()
    cols = {}
    for i in range(market.n):
        for j in market.interested(i):
            cols[(i, j)] = len(cols)
    rows = _feasibility_rows(market, p, cols)
    rev_obj = {c: p[j] for (i, j), c in cols.items()}
    status, _, best = Tableau(len(cols), rows).optimize(rev_obj)
    assert status == LpStatus.OPTIMAL
    rows.append((rev_obj, Relation.GE, best))
    welfare = {c: market.valuations[i][j] for (i, j), c in cols.items()}
    status, values, _ = Tableau(len(cols), rows).optimize(welfare)
    assert status == LpStatus.OPTIMAL
    alloc = Allocation.from_entries(market.n, market.m, {ij: values[c] for ij, c in cols.items() if values[c]})
    if not is_stable(market, pricing, tied_priorities(market), alloc).stable:
        raise StabilityCheckFailed("welfare-maximising revenue-optimal allocation is not stable")
    return RevenueResult(alloc, best)


# -- flow route -----------------------------------------------------------


@dataclass(frozen=True)
class EdmondsKarpResult:
    allocation: Allocation
    revenue: Fraction
    flow: Flow
    history: List[Allocation] = field(default_factory=list)  # allocation after each augmentation


def stable_edmonds_karp(market, pricing, start=None, check_invariants=False, record=False):
    """Augment along shortest paths, rerouting the final hop to the
    proposing buyer's best unsold item so compatibility is never lost."""
    _require_uniform(pricing)
    prio = tied_priorities(market)
    if start is None:
        start = Allocation.zeros(market.n, market.m)
    if not is_compatible(market, pricing, prio, start):
        raise NotCompatibleStart("starting allocation is not compatible")
    p = pricing.item_prices()
    network = build_flow_network(market, pricing)
    flow = flow_from_allocation(market, pricing, network, start)
    adj = network.neighbours()
    history = []
    sold = [flow(_item(j), SINK) for j in range(market.m)]
    while True:
        path = bfs_path(flow, adj)
        if path is None:
            break
        i0 = path[-3][1]
        candidates = [
            j for j in market.interested(i0) if flow(_item(j), SINK) < p[j]
        ]
        j1 = min(candidates, key=lambda j: (p[j] / market.valuations[i0][j], j))
        path = path[:-2] + [_item(j1), SINK]
        augment(flow, path)
        if check_invariants or record:
            alloc = allocation_from_flow(market, pricing, flow)
            if record:
                history.append(alloc)
            if check_invariants:
                now = [flow(_item(j), SINK) for j in range(market.m)]
                assert all(a <= b for a, b in zip(sold, now)), "an item's sold amount decreased"
                sold = now
                assert is_compatible(market, pricing, prio, alloc), "intermediate allocation not compatible"
    alloc = allocation_from_flow(market, pricing, flow)
    if not is_stable(market, pricing, prio, alloc).stable:
        raise StabilityCheckFailed("stable Edmonds-Karp ended on an unstable allocation")
    return EdmondsKarpResult(alloc, flow.value, flow, history)


# -- cuts and deviations --------------------------------------------------


@dataclass(frozen=True)
class CutCertificate:
    source_side: frozenset
    capacity: Fraction

    def buyers(self, market):
        return sorted(i for i in range(market.n) if _buyer(i) in self.source_side)

    def items(self, market):
        return sorted(j for j in range(market.m) if _item(j) in self.source_side)


def structured_min_cut(network, flow=None):
    """A minimum cut with no edge from a source-side buyer to a sink-side item."""
    if flow is None:
        flow = max_flow(network)
    S = set(residual_reachable(flow))
    for (u, v), c in network.capacity.items():
        if c > 0 and u in S and u[0] == "i" and v[0] == "j":
            S.add(v)
    cap = cut_capacity(network, S)
    assert cap == flow.value, "repaired cut is not minimum"
    return CutCertificate(frozenset(S), cap)


@dataclass(frozen=True)
class Deviation:
    seller: int
    item: int
    buyer: int
    epsilon: Fraction  # budget the buyer leaves unspent
    pricing: object
    gain: Fraction  # epsilon / 2


def budget_depletion_deviation(market, pricing):
    """If some buyer keeps money in a revenue-optimal stable allocation,
    raise one of its items by half the leftover."""
    _require_uniform(pricing)
    network = build_flow_network(market, pricing)
    cut = structured_min_cut(network)
    p = pricing.item_prices()
    s_budget = sum((market.budgets[i] for i in cut.buyers(market)), Fraction(0))
    s_prices = sum((p[j] for j in cut.items(market)), Fraction(0))
    if s_budget == s_prices:
        return None
    best = max_revenue_lp(market, pricing)
    for i in range(market.n):
        left = market.budgets[i] - best.allocation.spend(pricing, i)
        if left > 0 and market.interested(i):
            j0 = min(market.interested(i), key=lambda j: (p[j] / market.valuations[i][j], j))
            new = pricing.replace_item(j0, p[j0] + left / 2)
            return Deviation(market.item_seller[j0], j0, i, left, new, left / 2)
    return None


def certificate_to_dict(market, pricing, result, cut):
    def name(v):
        if v in (SOURCE, SINK):
            return v
        return market.buyers[v[1]] if v[0] == "i" else market.items[v[1]]

    flow = {
        f"{name(u)}->{name(v)}": render_rational(f)
        for (u, v), f in sorted(result.flow.values.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1])))
        if f > 0
    }
    return {
        "revenue": render_rational(result.revenue),
        "flow": flow,
        "cut": {
            "source_side": [name(v) for v in result.flow.network.vertices if v in cut.source_side],
            "capacity": render_rational(cut.capacity),
        },
        "per_seller": [render_rational(r) for r in revenue(market, pricing, result.allocation).per_seller],
    }
