"""Markets, seller strategies, buyer preferences and allocations.

Everything is indexed densely: buyer ``i`` in ``range(n)``, item ``j`` in
``range(m)``, seller ``k`` in ``range(len(sellers))``.  String ids are kept
alongside for I/O only.  All numbers are Fractions.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from ..errors import ValidationError

INF = float("inf")


def _fr(v):
    return v if isinstance(v, Fraction) else Fraction(v)


def _matrix(rows):
    return tuple(tuple(_fr(v) for v in row) for row in rows)


@dataclass(frozen=True)
class Market:
    buyers: Tuple[str, ...]
    budgets: Tuple[Fraction, ...]
    sellers: Tuple[str, ...]
    items: Tuple[str, ...]
    item_seller: Tuple[int, ...]
    valuations: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        n, m = len(self.buyers), len(self.items)
        if len(set(self.buyers)) != n:
            raise ValidationError("duplicate buyer ids")
        if len(set(self.items)) != m:
            raise ValidationError("duplicate item ids")
        if len(set(self.sellers)) != len(self.sellers):
            raise ValidationError("duplicate seller ids")
        if len(self.budgets) != n:
            raise ValidationError("one budget per buyer required")
        if len(self.item_seller) != m:
            raise ValidationError("ownership must partition the items: one seller per item")
        for k in self.item_seller:
            if not 0 <= k < len(self.sellers):
                raise ValidationError("ownership must partition the items: unknown seller")
        if len(self.valuations) != n or any(len(row) != m for row in self.valuations):
            raise ValidationError("valuation matrix must be buyers x items")
        if any(b < 0 for b in self.budgets):
            raise ValidationError("budgets must be non-negative")
        if any(v < 0 for row in self.valuations for v in row):
            raise ValidationError("valuations must be non-negative")
        for j in range(m):
            if not any(self.valuations[i][j] > 0 for i in range(n)):
                raise ValidationError(f"item {self.items[j]!r} has no buyer with positive value")

    @classmethod
    def build(cls, budgets, valuations, owners=None, buyers=None, items=None, sellers=None):
        """Convenience constructor.

        ``owners[j]`` is the seller index of item ``j``; by default one seller
        owns everything (a plain Fisher market).
        """
        valuations = _matrix(valuations)
        n = len(budgets)
        m = len(valuations[0]) if valuations else 0
        if owners is None:
            owners = (0,) * m
        n_sellers = (max(owners) + 1) if owners else 1
        return cls(
            buyers=tuple(buyers or (f"b{i + 1}" for i in range(n))),
            budgets=tuple(_fr(b) for b in budgets),
            sellers=tuple(sellers or (f"s{k + 1}" for k in range(n_sellers))),
            items=tuple(items or (f"g{j + 1}" for j in range(m))),
            item_seller=tuple(owners),
            valuations=valuations,
        )

    @property
    def n(self):
        return len(self.buyers)

    @property
    def m(self):
        return len(self.items)

    def seller_items(self, k):
        return tuple(j for j, s in enumerate(self.item_seller) if s == k)

    def interested(self, i):
        return tuple(j for j in range(self.m) if self.valuations[i][j] > 0)

    def with_owners(self, owners, sellers=None):
        n_sellers = max(owners) + 1
        return Market(self.buyers, self.budgets, tuple(sellers or (f"s{k + 1}" for k in range(n_sellers))),
                      self.items, tuple(owners), self.valuations)


class PricingMode(str, Enum):
    PERSONALIZED = "personalized"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class PricingProfile:
    prices: Tuple[Tuple[Fraction, ...], ...]  # prices[i][j]
    mode: PricingMode = PricingMode.PERSONALIZED

    def __post_init__(self):
        if any(p < 0 for row in self.prices for p in row):
            raise ValidationError("prices must be non-negative")
        if self.mode == PricingMode.UNIFORM and self.prices:
            first = self.prices[0]
            if any(row != first for row in self.prices):
                raise ValidationError("uniform pricing must charge every buyer the same price")

    @classmethod
    def uniform(cls, item_prices, n):
        row = tuple(_fr(p) for p in item_prices)
        return cls(tuple(row for _ in range(n)), PricingMode.UNIFORM)

    @classmethod
    def personalized(cls, matrix):
        return cls(_matrix(matrix), PricingMode.PERSONALIZED)

    @property
    def is_uniform(self):
        return self.mode == PricingMode.UNIFORM

    def item_price(self, j):
        """The common price of item ``j`` under uniform pricing."""
        if not self.is_uniform:
            raise ValueError("item_price is only defined for uniform pricing")
        return self.prices[0][j]

    def item_prices(self):
        return tuple(self.item_price(j) for j in range(len(self.prices[0]))) if self.prices else ()

    def replace_item(self, j, price):
        """Uniform pricing with item ``j`` repriced."""
        row = list(self.item_prices())
        row[j] = _fr(price)
        return PricingProfile.uniform(row, len(self.prices))


def validate_pricing(market, pricing):
    if len(pricing.prices) != market.n or any(len(r) != market.m for r in pricing.prices):
        raise ValidationError("pricing must be buyers x items")
    for i in range(market.n):
        for j in range(market.m):
            if market.valuations[i][j] > 0 and pricing.prices[i][j] <= 0:
                raise ValidationError(
                    f"price of {market.items[j]!r} for {market.buyers[i]!r} must be positive "
                    "when the buyer values the item"
                )


@dataclass(frozen=True)
class PriorityProfile:
    """``ranks[j][i]``: lower rank means higher priority; equal ranks tie."""

    ranks: Tuple[Tuple[int, ...], ...]

    @classmethod
    def all_tied(cls, n, m):
        return cls(tuple((0,) * n for _ in range(m)))

    @classmethod
    def from_groups(cls, groups_per_item, n):
        """``groups_per_item[j]`` lists rank groups of buyer indices, best first."""
        ranks = []
        for groups in groups_per_item:
            r = [None] * n
            for rank, group in enumerate(groups):
                for i in group:
                    if r[i] is not None:
                        raise ValidationError("buyer listed twice in a priority")
                    r[i] = rank
            if any(x is None for x in r):
                raise ValidationError("priority must rank every buyer")
            ranks.append(tuple(r))
        return cls(tuple(ranks))

    def rank(self, j, i):
        return self.ranks[j][i]

    def above(self, j, i, other):
        """``i >_j other``: strictly higher priority."""
        return self.ranks[j][i] < self.ranks[j][other]

    def groups(self, j):
        by_rank = {}
        for i, r in enumerate(self.ranks[j]):
            by_rank.setdefault(r, []).append(i)
        return [by_rank[r] for r in sorted(by_rank)]

    def is_strict(self, j, among=None):
        members = range(len(self.ranks[j])) if among is None else among
        seen = [self.ranks[j][i] for i in members]
        return len(seen) == len(set(seen))


@dataclass(frozen=True)
class PreferenceProfile:
    """``ranks[i][j]``: 0 is buyer i's most preferred level; None if v_ij = 0."""

    ranks: Tuple[Tuple[Optional[int], ...], ...]

    def rank(self, i, j):
        return self.ranks[i][j]

    def levels(self, i):
        """Item indices grouped by preference level, best level first."""
        by_rank = {}
        for j, r in enumerate(self.ranks[i]):
            if r is not None:
                by_rank.setdefault(r, []).append(j)
        return [by_rank[r] for r in sorted(by_rank)]

    def is_strict(self, i):
        seen = [r for r in self.ranks[i] if r is not None]
        return len(seen) == len(set(seen))


def bang_per_buck(market, pricing, i, j):
    v = market.valuations[i][j]
    if v == 0:
        return Fraction(0)
    return v / pricing.prices[i][j]


def preference_profile(market, pricing):
    """Buyer preferences induced by bang-per-buck v_ij / p_ij."""
    ranks = []
    for i in range(market.n):
        bpb = {j: bang_per_buck(market, pricing, i, j) for j in market.interested(i)}
        levels = sorted(set(bpb.values()), reverse=True)
        pos = {b: k for k, b in enumerate(levels)}
        ranks.append(tuple(pos[bpb[j]] if j in bpb else None for j in range(market.m)))
    return PreferenceProfile(tuple(ranks))


def natural_priority(market, pricing):
    """Rank buyers by descending personalised price; equal prices share a rank."""
    ranks = []
    for j in range(market.m):
        col = [pricing.prices[i][j] for i in range(market.n)]
        levels = sorted(set(col), reverse=True)
        pos = {p: k for k, p in enumerate(levels)}
        ranks.append(tuple(pos[p] for p in col))
    return PriorityProfile(tuple(ranks))


def is_natural(priorities, pricing):
    """``p_ij >= p_i'j`` must imply ``i >=_j i'`` for every item and buyer pair."""
    n = len(pricing.prices)
    for j, ranks in enumerate(priorities.ranks):
        for i in range(n):
            for k in range(n):
                if pricing.prices[i][j] >= pricing.prices[k][j] and ranks[i] > ranks[k]:
                    return False
    return True


@dataclass(frozen=True)
class Allocation:
    x: Tuple[Tuple[Fraction, ...], ...]  # x[i][j]

    def __post_init__(self):
        for row in self.x:
            for v in row:
                if v < 0 or v > 1:
                    raise ValidationError("allocation entries must lie in [0, 1]")
        if self.x:
            for j in range(len(self.x[0])):
                if sum(row[j] for row in self.x) > 1:
                    raise ValidationError("an item is allocated beyond its unit supply")

    @classmethod
    def zeros(cls, n, m):
        return cls(tuple((Fraction(0),) * m for _ in range(n)))

    @classmethod
    def of(cls, matrix):
        return cls(_matrix(matrix))

    @classmethod
    def from_entries(cls, n, m, entries):
        """``entries`` maps ``(i, j)`` to an amount; everything else is 0."""
        rows = [[Fraction(0)] * m for _ in range(n)]
        for (i, j), v in entries.items():
            rows[i][j] = _fr(v)
        return cls.of(rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.x[i][j]

    @property
    def shape(self):
        return len(self.x), (len(self.x[0]) if self.x else 0)

    def item_total(self, j):
        return sum((row[j] for row in self.x), Fraction(0))

    def item_totals(self):
        return tuple(self.item_total(j) for j in range(self.shape[1]))

    def spend(self, pricing, i):
        return sum((p * v for p, v in zip(pricing.prices[i], self.x[i])), Fraction(0))

    def support(self, i):
        return tuple(j for j, v in enumerate(self.x[i]) if v > 0)

    def nonzero(self):
        return {(i, j): v for i, row in enumerate(self.x) for j, v in enumerate(row) if v}


def available_fraction(market, pricing, priorities, allocation, i, j):
    """Fraction of item j available to buyer i: unsold, own, or held by
    buyers strictly below i in j's priority."""
    x = allocation.x
    unsold = 1 - allocation.item_total(j)
    lower = sum(
        (x[k][j] for k in range(market.n) if k != i and priorities.above(j, i, k)),
        Fraction(0),
    )
    return unsold + x[i][j] + lower


def obtainable_fraction(market, pricing, priorities, allocation, i, j):
    """Part of item j that buyer i does not hold but could still obtain."""
    return available_fraction(market, pricing, priorities, allocation, i, j) - allocation.x[i][j]


@dataclass(frozen=True)
class Revenue:
    per_seller: Tuple[Fraction, ...]
    total: Fraction


def revenue(market, pricing, allocation):
    per = [Fraction(0)] * len(market.sellers)
    for i in range(market.n):
        for j in range(market.m):
            v = allocation.x[i][j]
            if v:
                per[market.item_seller[j]] += pricing.prices[i][j] * v
    return Revenue(tuple(per), sum(per, Fraction(0)))


def seller_revenue(market, pricing, allocation, k):
    return revenue(market, pricing, allocation).per_seller[k]
