"""Competitive duopoly pricing.

Each of two sellers reports, per buyer, the price it asks per unit of value
(``a_i`` for seller 1, ``b_i`` for seller 2).  Buyer i pays
``v_ij * max(a_i, b_i)`` for every item, strictly prefers the seller with
the lower report, is indifferent among one seller's items, and items rank
buyers naturally by price.  Outcomes are revenue ranges over all stable
allocations, and Nash checks compare worst-case revenues.
"""
import csv
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .errors import NotDuopoly, OutOfRegime, ValidationError
from .market.model import Market, PreferenceProfile, PricingProfile, natural_priority
from .oracle import stable_set_extrema, stable_seller_min

F = Fraction
DEFAULT_GRID = tuple(F(k, 12) for k in range(1, 37))


@dataclass(frozen=True)
class DuopolyProfile:
    a: Tuple[Fraction, ...]  # seller 1's report per buyer
    b: Tuple[Fraction, ...]  # seller 2's report per buyer

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise ValidationError("both sellers must report one value per buyer")
        if any(v < 0 for v in self.a + self.b):
            raise ValidationError("bang-per-buck reports must be non-negative")

    @classmethod
    def of(cls, a, b):
        return cls(tuple(F(v) for v in a), tuple(F(v) for v in b))

    @classmethod
    def uniform(cls, n, value=1):
        return cls.of([value] * n, [value] * n)

    def report(self, k):
        return self.a if k == 0 else self.b

    def with_report(self, k, values):
        values = tuple(F(v) for v in values)
        return DuopolyProfile(values, self.b) if k == 0 else DuopolyProfile(self.a, values)

    def multiplier(self, i):
        return max(self.a[i], self.b[i])


def _table3_values(s, t):
    return [
        [s, 2 * t, 2 * (1 - t), 1 - s],
        [2 * s, t, 1 - t, 2 * (1 - s)],
    ]


def table3_market(s, t):
    """The two-buyer, four-item family; items nobody values are left out."""
    s, t = F(s), F(t)
    if not (0 <= s <= 1 and 0 <= t <= 1):
        raise OutOfRegime("s and t must lie in [0, 1]")
    values = _table3_values(s, t)
    keep = [j for j in range(4) if values[0][j] > 0 or values[1][j] > 0]
    return Market.build(
        [2, 2],
        [[row[j] for j in keep] for row in values],
        owners=[0 if j < 2 else 1 for j in keep],
        items=[f"g{j + 1}" for j in keep],
        sellers=("s1", "s2"),
    )


def _check_duopoly(market, profile):
    if len(market.sellers) != 2:
        raise NotDuopoly(f"competitive pricing needs exactly two sellers (got {len(market.sellers)})")
    if len(profile.a) != market.n:
        raise ValidationError("profile length must match the number of buyers")
    for i in range(market.n):
        if market.budgets[i] > 0 and market.interested(i) and profile.multiplier(i) == 0:
            raise ValidationError(f"buyer {market.buyers[i]!r} would face zero prices")


@dataclass(frozen=True)
class InducedMarket:
    pricing: PricingProfile
    priorities: object
    preferences: PreferenceProfile
    preferred_seller: Tuple[Optional[int], ...]  # None when indifferent


def induce_market(market, profile):
    _check_duopoly(market, profile)
    pricing = PricingProfile.personalized([
        [market.valuations[i][j] * profile.multiplier(i) for j in range(market.m)] for i in range(market.n)
    ])
    ranks, preferred = [], []
    for i in range(market.n):
        a, b = profile.a[i], profile.b[i]
        fav = None if a == b else (0 if a < b else 1)
        preferred.append(fav)
        ranks.append(tuple(
            None if market.valuations[i][j] == 0 else (0 if fav in (None, market.item_seller[j]) else 1)
            for j in range(market.m)
        ))
    return InducedMarket(pricing, natural_priority(market, pricing), PreferenceProfile(tuple(ranks)), tuple(preferred))


@dataclass(frozen=True)
class DuopolyOutcome:
    seller_min: Tuple[Fraction, Fraction]
    seller_max: Tuple[Fraction, Fraction]
    min_allocations: tuple  # stable allocations attaining each seller's minimum
    max_allocations: tuple

    @property
    def selection_free(self):
        return self.seller_min == self.seller_max


def duopoly_outcome(market, profile):
    ind = induce_market(market, profile)
    summary = stable_set_extrema(market, ind.pricing, ind.priorities, ind.preferences)
    return DuopolyOutcome(
        tuple(e.value for e in summary.seller_min),
        tuple(e.value for e in summary.seller_max),
        tuple(e.allocation for e in summary.seller_min),
        tuple(e.allocation for e in summary.seller_max),
    )


def worst_case_revenue(market, profile, k, stop_at=None):
    ind = induce_market(market, profile)
    return stable_seller_min(market, ind.pricing, ind.priorities, k, ind.preferences, stop_at=stop_at).value


def deviation_revenue_formula(s, t, p):
    """Seller 1's revenue after leaving the all-ones profile by asking buyer 1
    for ``p >= 1`` and undercutting seller 2 for buyer 2."""
    s, t, p = F(s), F(t), F(p)
    if not (0 <= s <= 1 and 0 <= t <= 1):
        raise OutOfRegime("s and t must lie in [0, 1]")
    if t >= F(2, 3):
        raise OutOfRegime("the closed form needs t < 2/3")
    if p < 1:
        raise OutOfRegime("the closed form needs p >= 1")
    return 2 * s + 4 - (F(8, 3) - 2 * t) * p - F(4, 3) / p


def formula_shares(s, t, p):
    """Buyer 1's shares of items 2 and 4 solving the clearing and depletion
    equations behind the closed form."""
    s, t, p = F(s), F(t), F(p)
    x14 = 2 * (p - 1) / (3 * (1 - s) * p) if s < 1 else None
    x12 = 1 - 4 * (p - 1) / (3 * t * p) if t > 0 else None
    return x12, x14


def formula_applies(s, t, p):
    """True when those shares are proper fractions, i.e. the closed form
    describes an actual stable allocation.  Equivalent to
    p <= 4 / (4 - 3t) and p (3s - 1) <= 2."""
    x12, x14 = formula_shares(s, t, p)
    return x12 is not None and x14 is not None and 0 <= x12 <= 1 and 0 <= x14 <= 1


def formula_deviation_profile(p, n=2):
    """The deviation behind the closed form: a_1 = p, a_2 below b_2 = 1."""
    return DuopolyProfile.of([p, F(1, 2)], [1] * n)


def _report_options(own, other, grid):
    """Grid values for one buyer, keeping one representative of all reports
    strictly below the opponent's (they induce the same market)."""
    below = [g for g in grid if g < other]
    options = [below[-1]] if below else []
    options += [g for g in grid if g >= other]
    if own not in options:
        options.append(own)
    return options


def grid_deviations(profile, k, grid=DEFAULT_GRID):
    other = profile.report(1 - k)
    own = profile.report(k)
    per_buyer = [_report_options(own[i], other[i], grid) for i in range(len(own))]
    out = []
    for combo in itertools.product(*per_buyer):
        if combo == own:
            continue
        out.append(profile.with_report(k, combo))
    return out


@dataclass(frozen=True)
class NashCheck:
    passed: bool
    current: Tuple[Fraction, Fraction]  # worst-case revenue of each seller
    seller: Optional[int] = None  # the deviator when failed
    deviation: Optional[DuopolyProfile] = None
    deviation_revenue: Optional[Fraction] = None
    deviations_checked: int = 0


def _profitable(args):
    market, dev, k, current = args
    value = worst_case_revenue(market, dev, k, stop_at=current)
    return value if value > current else None


def is_nash_on_grid(market, profile, grid=DEFAULT_GRID, jobs=1):
    """Look for a grid report that raises a seller's worst-case revenue."""
    current = tuple(worst_case_revenue(market, profile, k) for k in (0, 1))
    checked = 0
    for k in (0, 1):
        devs = grid_deviations(profile, k, grid)
        args = [(market, d, k, current[k]) for d in devs]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_profitable, args, chunksize=16))
        else:
            results = []
            for a in args:
                results.append(_profitable(a))
                if results[-1] is not None:
                    break
        for dev, gain in zip(devs, results):
            checked += 1
            if gain is not None:
                exact = worst_case_revenue(market, dev, k)
                return NashCheck(False, current, k, dev, exact, checked)
    return NashCheck(True, current, deviations_checked=checked)


def ce_profile(n=2):
    return DuopolyProfile.uniform(n)


def prop10_profile():
    return DuopolyProfile.of([1, F(4, 3)], [F(4, 3), 1])


def conjectured_profile(s, t):
    """Hypothesised equilibrium reports for s > 2/3, t < 1/3.  Unverified."""
    s, t = F(s), F(t)
    if not (F(2, 3) < s <= 1 and 0 <= t < F(1, 3)):
        raise OutOfRegime("the hypothesised profile is only stated for s > 2/3 and t < 1/3")
    num = (1 + t) ** 2 + (2 - s) ** 2
    a2 = F(2, 3) * num / ((2 - s) * (1 + t) ** 2)
    b1 = F(2, 3) * num / ((2 - s) ** 2 * (1 + t))
    return DuopolyProfile.of([1, a2], [b1, 1])


NAMED_PROFILES = {
    "ce": lambda s, t: ce_profile(),
    "prop10": lambda s, t: prop10_profile(),
    "conjecture": conjectured_profile,
}

SWEEP_FIELDS = ("s", "t", "profile", "seller1_min", "seller1_max", "seller2_min", "seller2_max", "nash_verdict")


def sweep_rows(points, profile_name, grid=DEFAULT_GRID, nash=True, jobs=1):
    """One CSV row per (s, t) point; out-of-regime points are marked as such."""
    for s, t in points:
        s, t = F(s), F(t)
        try:
            profile = NAMED_PROFILES[profile_name](s, t)
        except OutOfRegime:
            yield dict(zip(SWEEP_FIELDS, (s, t, profile_name, "", "", "", "", "OUT_OF_REGIME")))
            continue
        market = table3_market(s, t)
        out = duopoly_outcome(market, profile)
        verdict = ""
        if nash:
            verdict = "PASS" if is_nash_on_grid(market, profile, grid, jobs).passed else "FAIL"
        if profile_name == "conjecture":
            verdict = f"CONJECTURE:{verdict}" if verdict else "CONJECTURE"
        yield dict(zip(SWEEP_FIELDS, (s, t, profile_name, out.seller_min[0], out.seller_max[0],
                                      out.seller_min[1], out.seller_max[1], verdict)))


def write_sweep(stream, rows):
    writer = csv.DictWriter(stream, fieldnames=SWEEP_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: str(v) for k, v in row.items()})
