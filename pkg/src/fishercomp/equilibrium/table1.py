"""Seller 1's profitable response in the two-by-two market with crossed
valuations, for any personalised pricing of seller 2."""
from dataclasses import dataclass
from fractions import Fraction

from ..errors import InvalidPrices
from ..instances import table1
from ..market.model import PricingProfile, PriorityProfile, natural_priority
from ..oracle import stable_set_extrema

F = Fraction
FIRST_EPSILON = F(1, 10)


@dataclass(frozen=True)
class BestResponse:
    case: int
    epsilon: object  # Fraction or None
    pricing: PricingProfile
    priorities: PriorityProfile
    bound: Fraction  # seller 1's worst revenue over all stable allocations

    @property
    def certified(self):
        return self.bound > 2


def _shrink(eps, ok):
    while not ok(eps):
        eps /= 2
    return eps


def response_prices(p12, p22):
    """``(case, epsilon, p11, p21)`` for seller 2's prices ``p12`` (to buyer 1)
    and ``p22`` (to buyer 2)."""
    p12, p22 = F(p12), F(p22)
    if p12 <= 0 or p22 <= 0:
        # both buyers value item 2, so both prices must be positive
        raise InvalidPrices("seller 2's prices must be positive")
    if p22 > 1:
        return 1, None, p12 / 4, 1 + p22
    if p12 < 2:
        return 2, None, F(4), F(4)
    if p12 == 2:
        eps = FIRST_EPSILON
        return 5, eps, eps, 1 / eps
    if p12 <= 4:
        eps = _shrink(FIRST_EPSILON, lambda e: (1 - e) ** 2 * p12 > 2)
        return 4, eps, (1 - eps) / 2 * p12, 2 / eps
    eps = _shrink(FIRST_EPSILON, lambda e: 2 + e < p12 / 2)
    return 3, eps, 2 + eps, 2 + eps


def table1_best_response(p12, p22):
    case, eps, p11, p21 = response_prices(p12, p22)
    market = table1()
    pricing = PricingProfile.personalized([[p11, F(p12)], [p21, F(p22)]])
    priorities = natural_priority(market, pricing)
    summary = stable_set_extrema(market, pricing, priorities)
    return BestResponse(case, eps, pricing, priorities, summary.seller_min[0].value)
