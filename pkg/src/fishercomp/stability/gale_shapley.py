"""Fractional Gale-Shapley with proposal-cycle resolution.

Buyers propose to their best proposable item; an item reallocates itself by
filling demands in priority order, ties going to earlier arrivals.  When a
proposal to a full item pushes out exactly one other buyer, that buyer
proposes next.  Such chains can loop; a pair proposed for the third time
triggers a rollback to the state before its second occurrence and a single
scaled transfer along the loop.

Tie-breaks follow the dense index order everywhere, so runs are
reproducible.  The termination argument is enforced at runtime by counting
progress events.
"""
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import AlgorithmAssertion, EventBudgetExceeded
from ..market.model import Allocation, preference_profile
from .predicates import is_compatible

_ZERO = Fraction(0)


@dataclass
class SolverStats:
    rounds: int = 0
    proposals: int = 0
    cycles: int = 0
    newly_full: int = 0  # event (b)
    leaves: int = 0  # event (c)
    deactivations: int = 0  # event (a): rounds that shrink the active set


@dataclass(frozen=True)
class GaleShapleyResult:
    allocation: Allocation
    stats: SolverStats


@dataclass
class _Update:
    buyer: int
    item: int
    full_before: bool
    deltas: dict  # buyer -> change of x[buyer][item]
    leavers: tuple


@dataclass
class ProposalCycle:
    pairs: list  # [(i_0, j_0), ..., (i_l, j_l)]
    y_x: list
    y_budget: list
    transfers: list  # transfers[k]: amount moved from i_{k+1} to i_k on j_k
    budget_before: Fraction  # B_0
    budget_delta: Fraction  # Delta B_0
    r: Fraction = field(default=None)


class _Solver:
    def __init__(self, market, pricing, priorities, preferences, debug):
        self.market = market
        self.p = pricing.prices
        self.prio = priorities.ranks
        self.prefs = preferences
        self.pricing = pricing
        self.priorities = priorities
        self.debug = debug
        n, m = market.n, market.m
        self.n, self.m = n, m
        self.x = [[_ZERO] * m for _ in range(n)]
        self.budget = list(market.budgets)
        self.order = [
            sorted(market.interested(i), key=lambda j, i=i: (preferences.rank(i, j), j)) for i in range(n)
        ]
        self.proposable = [set(o) for o in self.order]
        self.arrivals = [[] for _ in range(m)]
        self.ever_full = set()
        self.stats = SolverStats()
        self.max_rounds = m + n * m + n * (1 + n * m)
        self.max_proposals = n * (n + m)

    # -- helpers -----------------------------------------------------------

    def total(self, j):
        return sum((self.x[i][j] for i in range(self.n)), _ZERO)

    def best_proposable(self, i):
        for j in self.order[i]:
            if j in self.proposable[i]:
                return j
        return None

    def next_proposer(self):
        for i in range(self.n):
            if self.budget[i] > 0 and self.best_proposable(i) is not None:
                return i
        return None

    def snapshot(self):
        return [row[:] for row in self.x], self.budget[:]

    def allocation(self):
        return Allocation(tuple(tuple(r) for r in self.x))

    def mark_full(self, j):
        """Item j is full: nobody at or below its lowest holder may propose to it."""
        holders = self.arrivals[j]
        worst = max(self.prio[j][h] for h in holders)
        for k in range(self.n):
            if self.prio[j][k] >= worst:
                self.proposable[k].discard(j)

    # -- the two kinds of update -----------------------------------------

    def normal_update(self, i, j):
        full_before = self.total(j) == 1
        p = self.p[i][j]
        if i not in self.arrivals[j]:
            self.arrivals[j].append(i)
        queue = self.arrivals[j]
        demand = {h: self.x[h][j] for h in queue}
        demand[i] = min(Fraction(1), self.budget[i] / p + self.x[i][j])
        fill = sorted(range(len(queue)), key=lambda pos: (self.prio[j][queue[pos]], pos))
        supply = Fraction(1)
        deltas = {}
        for pos in fill:
            h = queue[pos]
            got = min(demand[h], supply)
            supply -= got
            if got != self.x[h][j]:
                deltas[h] = got - self.x[h][j]
                self.budget[h] -= self.p[h][j] * deltas[h]
                self.x[h][j] = got
        leavers = tuple(h for h in queue if h != i and self.x[h][j] == 0)
        self.arrivals[j] = [h for h in queue if self.x[h][j] > 0]
        self.stats.leaves += len(leavers)
        self.stats.proposals += 1
        if self.total(j) == 1:
            if j not in self.ever_full:
                self.ever_full.add(j)
                self.stats.newly_full += 1
            self.mark_full(j)
        return _Update(i, j, full_before, deltas, leavers)

    def resolve_cycle(self, seq, snapshots, first, second):
        """Roll back to the state before the second occurrence of the
        repeated pair, then move a scaled amount along the loop at once."""
        i0, j0 = seq[first].buyer, seq[first].item
        loop = [(u.buyer, u.item) for u in seq[second:]]
        earlier = [(u.buyer, u.item) for u in seq[first:second]]
        if loop != earlier:
            raise AlgorithmAssertion("proposal sequence differs between occurrences of the repeated pair")
        buyers = [b for b, _ in loop]
        items = [g for _, g in loop]
        if len(set(buyers)) != len(buyers) or len(set(items)) != len(items):
            raise AlgorithmAssertion("cycle contains a duplicate buyer or item")
        y_x, y_budget = snapshots[second]
        for b in buyers[1:]:
            if y_budget[b] != 0:
                raise AlgorithmAssertion("buyer inside the cycle has budget left before it")
        L = len(loop)
        transfers = []
        for k, u in enumerate(seq[second:]):
            nxt = buyers[(k + 1) % L]
            losers = [h for h, d in u.deltas.items() if d < 0]
            if losers != [nxt]:
                raise AlgorithmAssertion("loser of a cycle update is not the next proposer")
            transfers.append(-u.deltas[nxt])
        cyc = ProposalCycle(
            pairs=loop, y_x=y_x, y_budget=y_budget, transfers=transfers,
            budget_before=y_budget[i0], budget_delta=y_budget[i0] - self.budget[i0],
        )
        ratios = [y_x[buyers[(k + 1) % L]][items[k]] / transfers[k] for k in range(L)]
        if cyc.budget_delta > 0:
            ratios.append(cyc.budget_before / cyc.budget_delta)
        cyc.r = min(ratios)

        self.x = [row[:] for row in y_x]
        self.budget = y_budget[:]
        for k in range(L):
            gain, lose, j = buyers[k], buyers[(k + 1) % L], items[k]
            amount = cyc.r * transfers[k]
            self.x[gain][j] += amount
            self.x[lose][j] -= amount
            self.budget[gain] -= self.p[gain][j] * amount
            self.budget[lose] += self.p[lose][j] * amount
        for k in range(L):
            j = items[k]
            if buyers[k] not in self.arrivals[j]:
                raise AlgorithmAssertion("cycle proposer is not a temporary buyer of its item")
            before = len(self.arrivals[j])
            self.arrivals[j] = [h for h in self.arrivals[j] if self.x[h][j] > 0]
            self.stats.leaves += before - len(self.arrivals[j])
            if self.total(j) != 1:
                raise AlgorithmAssertion("cycle item is not fully allocated")
            self.mark_full(j)
        if any(v < 0 for row in self.x for v in row) or any(b < 0 for b in self.budget):
            raise AlgorithmAssertion("cycle update left a negative allocation or budget")
        if not is_compatible(self.market, self.pricing, self.priorities, self.allocation(), self.prefs):
            raise AlgorithmAssertion("allocation after cycle update is not compatible")
        self.stats.cycles += 1
        return cyc

    # -- main loop ---------------------------------------------------------

    def active_set(self):
        return {i for i in range(self.n) if self.budget[i] > 0 and self.best_proposable(i) is not None}

    def round(self, i):
        j = self.best_proposable(i)
        snapshots = [self.snapshot()]
        seq = [self.normal_update(i, j)]
        seen = {(i, j): [0]}
        last = seq[-1]
        while last.full_before and not last.leavers:
            if len(seq) > self.max_proposals:
                raise EventBudgetExceeded(f"more than {self.max_proposals} proposals in one round")
            losers = [h for h, d in last.deltas.items() if d < 0]
            if len(losers) != 1:
                raise AlgorithmAssertion("full-item update without departures must displace exactly one buyer")
            nxt = losers[0]
            item = self.best_proposable(nxt)
            if item is None:
                break
            occ = seen.setdefault((nxt, item), [])
            if len(occ) == 2:
                self.resolve_cycle(seq, snapshots, occ[0], occ[1])
                break
            occ.append(len(seq))
            snapshots.append(self.snapshot())
            seq.append(self.normal_update(nxt, item))
            last = seq[-1]

    def run(self):
        seen_blocked = [set() for _ in range(self.n)]
        while True:
            i = self.next_proposer()
            if i is None:
                break
            self.stats.rounds += 1
            if self.stats.rounds > self.max_rounds:
                raise EventBudgetExceeded(f"more than {self.max_rounds} main-loop rounds")
            active = self.active_set()
            events = (self.stats.newly_full, self.stats.leaves)
            self.round(i)
            shrank = len(self.active_set()) < len(active)
            self.stats.deactivations += shrank
            if not shrank and events == (self.stats.newly_full, self.stats.leaves):
                raise EventBudgetExceeded("main-loop round made no progress")
            n, m = self.n, self.m
            if self.stats.newly_full > m or self.stats.leaves > n * m:
                raise EventBudgetExceeded("item-fill or departure events exceed their bound")
            if self.stats.deactivations > n * (1 + self.stats.leaves):
                raise EventBudgetExceeded("deactivation events exceed their bound")
            if self.debug:
                for k in range(n):
                    blocked = set(self.order[k]) - self.proposable[k]
                    if not seen_blocked[k] <= blocked:
                        raise AlgorithmAssertion("an item became proposable again")
                    seen_blocked[k] = blocked
                check = is_compatible(self.market, self.pricing, self.priorities, self.allocation(), self.prefs)
                if not check:
                    raise AlgorithmAssertion(f"allocation not compatible after round {self.stats.rounds}: {check}")
        return GaleShapleyResult(self.allocation(), self.stats)


def run_gale_shapley(market, pricing, priorities, preferences=None, debug=False):
    prefs = preferences if preferences is not None else preference_profile(market, pricing)
    return _Solver(market, pricing, priorities, prefs, debug).run()


def fractional_gale_shapley(market, pricing, priorities, preferences=None, debug=False):
    """A stable allocation, computed exactly."""
    return run_gale_shapley(market, pricing, priorities, preferences, debug).allocation
