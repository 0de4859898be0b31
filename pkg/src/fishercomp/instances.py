"""Small named markets used by the fixtures, tests and the CLI."""
from fractions import Fraction

from .market.model import Market, PricingProfile, PriorityProfile, natural_priority

F = Fraction


def sec41():
    """Two buyers, two single-item sellers; buyer 2 only values item 2."""
    market = Market.build([1, 1], [[1, 1], [0, 1]], owners=[0, 1])
    pricing = PricingProfile.uniform([1, 1], 2)
    return market, pricing, natural_priority(market, pricing)


def example1(prices=(2, 1, 1), owners=(0, 1, 1)):
    market = Market.build([2, 2], [[2, 1, 0], [F(1, 3), 1, 1]], owners=list(owners))
    pricing = PricingProfile.uniform(prices, 2)
    return market, pricing, natural_priority(market, pricing)


def example1_ce_allocation():
    from .market.model import Allocation
    return Allocation.of([[1, 0, 0], [0, 1, 1]])


def section5_deviation():
    """Example 1 after seller 2 reprices to (2/3, 2) and lets buyer 1 jump
    the queue for item 2."""
    market, _, _ = example1()
    pricing = PricingProfile.uniform([2, F(2, 3), 2], 2)
    priorities = PriorityProfile.from_groups([[[0, 1]], [[0], [1]], [[0, 1]]], 2)
    return market, pricing, priorities


def table1():
    """Two buyers, two single-item sellers with crossed valuations."""
    return Market.build([2, 2], [[1, 2], [2, 1]], owners=[0, 1])


def d3_tight():
    """Two stable allocations whose revenues differ by a factor of two."""
    market = Market.build([1, 1], [[1, 1], [1, 0]])
    pricing = PricingProfile.personalized([[1, 1], [1, 0]])
    return market, pricing, natural_priority(market, pricing)
