from fractions import Fraction as F

import pytest

from fishercomp import instances
from fishercomp.errors import InvalidPrices, NotStableInput, NotUniform, SizeCapExceeded, ValidationError
from fishercomp.equilibrium import (
    Uniqueness, Verdict, check_uniqueness, competitive_equilibrium, evaluate_deviation, grid_deviations,
    response_prices, table1_best_response, verify_ce, verify_maximin,
)
from fishercomp.equilibrium.maximin import deviation_seller
from fishercomp.market import Allocation, Market, PricingProfile, natural_priority
from fishercomp.revenue import max_revenue_lp

from gen import random_strict_instance, rng_for


def test_ce_example1():
    market, _, _ = instances.example1()
    ce = competitive_equilibrium(market)
    assert ce.exact
    assert ce.prices == (2, 1, 1)
    assert ce.allocation == instances.example1_ce_allocation()


def test_ce_crossed_market():
    ce = competitive_equilibrium(instances.table1())
    assert ce.prices == (2, 2)
    assert ce.allocation == Allocation.of([[0, 1], [1, 0]])


def test_ce_single_buyer():
    ce = competitive_equilibrium(Market.build([3], [[5]]))
    assert ce.prices == (3,) and ce.allocation == Allocation.of([[1]])


def test_ce_rejects_degenerate_markets():
    with pytest.raises(ValidationError):
        competitive_equilibrium(Market.build([0, 1], [[1], [1]]))
    with pytest.raises(ValidationError):
        competitive_equilibrium(Market.build([1, 1], [[1], [0]]))


def test_ce_irrational_prices_fall_back_to_float():
    # prices solve a quadratic here, so no rational candidate verifies
    market = Market.build([1, 2], [[2, 1], [1, 3]])
    ce = competitive_equilibrium(market, tolerance=1e-9)
    assert sum(ce.prices) == pytest.approx(3)
    if not ce.exact:
        assert ce.gap < 1e-9 and ce.allocation is None


def test_verify_ce_failures():
    market, _, _ = instances.example1()
    alloc = instances.example1_ce_allocation()
    assert verify_ce(market, (2, 1, 1), alloc)
    bad = verify_ce(market, (1, 1, 1), alloc)
    assert not bad and bad.kind in ("BUDGET_NOT_SPENT", "NOT_MAX_BANG_PER_BUCK")
    partial = Allocation.of([[1, 0, 0], [0, 1, 0]])
    bad = verify_ce(market, (2, 1, 1), partial)
    assert not bad and bad.kind == "NOT_CLEARED" and bad.item == 2


def test_maximin_ce_certified():
    market, pricing, _ = instances.example1()
    verdict = verify_maximin(market, pricing, instances.example1_ce_allocation())
    assert verdict.verdict == Verdict.CERTIFIED
    assert all(ev.status in ("WITNESS", "ORACLE") for ev in verdict.evidence)
    assert len(verdict.evidence) == 9 + 99  # seller 1 owns one item, seller 2 two


def test_maximin_multiple_equilibrium():
    market, pricing, _ = instances.example1(prices=(F(4, 3), F(2, 3), 2))
    alloc = max_revenue_lp(market, pricing).allocation
    assert alloc == Allocation.of([[1, 1, 0], [0, 0, 1]])
    assert verify_maximin(market, pricing, alloc).verdict == Verdict.CERTIFIED


def test_maximin_ownership_refuted():
    market, pricing, _ = instances.example1(prices=(F(4, 3), F(2, 3), 2), owners=(0, 1, 0))
    alloc = max_revenue_lp(market, pricing).allocation
    verdict = verify_maximin(market, pricing, alloc, deviations=[(F(4, 3), 1, 2)], use_grid=False)
    assert verdict.verdict == Verdict.REFUTED
    ev = verdict.evidence[0]
    assert ev.seller == 1 and ev.current == F(2, 3) and ev.bound == 1


def test_maximin_input_checks():
    market, pricing, _ = instances.example1()
    with pytest.raises(NotUniform):
        verify_maximin(market, PricingProfile.personalized(pricing.prices), instances.example1_ce_allocation())
    with pytest.raises(NotStableInput):
        verify_maximin(market, pricing, Allocation.zeros(2, 3))
    sec, sp, _ = instances.sec41()
    with pytest.raises(ValidationError):
        verify_maximin(sec, sp, Allocation.of([[0, 1], [0, 0]]))  # stable but not optimal
    with pytest.raises(ValidationError):
        deviation_seller(market, pricing, (3, 2, 1))


def test_grid_size_cap():
    market = Market.build([1], [[1] * 5])
    pricing = PricingProfile.uniform([1] * 5, 1)
    assert len(grid_deviations(market, pricing, 0, factors=(1, 2, 3))) == 3 ** 5 - 1
    with pytest.raises(SizeCapExceeded):
        grid_deviations(market, pricing, 0)


def test_evaluate_deviation_witness():
    market, pricing, _ = instances.example1()
    ev = evaluate_deviation(market, pricing, instances.example1_ce_allocation(), 1, (2, 2, 1))
    assert ev.status == "WITNESS" and ev.bound <= ev.current


@pytest.mark.parametrize("p12,p22,case,p11,p21", [
    (2, 2, 1, F(1, 2), 3),
    (1, 1, 2, 4, 4),
    (2, 1, 5, F(1, 10), 10),
    (3, 1, 4, F(27, 20), 20),
    (5, 1, 3, F(21, 10), F(21, 10)),
    (F(41, 10), 1, 3, F(81, 40), F(81, 40)),
])
def test_response_prices(p12, p22, case, p11, p21):
    got = response_prices(p12, p22)
    assert got[0] == case and got[2:] == (p11, p21)


@pytest.mark.parametrize("p12,p22", [(0, 1), (-1, 1), (1, -1), (2, 0)])
def test_response_prices_invalid(p12, p22):
    with pytest.raises(InvalidPrices):
        response_prices(p12, p22)


def test_best_response_bound_cheap_second_price():
    r = table1_best_response(3, 1)
    assert r.certified
    assert r.bound >= (1 - r.epsilon) ** 2 * 3 / 2 + 1


def test_uniqueness_examples():
    r = table1_best_response(2, 1)
    rep = check_uniqueness(instances.table1(), r.pricing, r.priorities)
    assert rep.guarantee == Uniqueness.UNIQUE_GUARANTEED and rep.empirical.count == 1
    market, pricing, prio = instances.sec41()
    rep = check_uniqueness(market, pricing, prio)
    assert rep.guarantee == Uniqueness.NOT_APPLICABLE and rep.reasons
    assert rep.empirical.continuum


def test_uniqueness_hypotheses_hold_on_generator():
    for k in range(30):
        market, pricing, prio = random_strict_instance(rng_for("uniq", k))
        assert check_uniqueness(market, pricing, prio, empirical=False).guarantee == Uniqueness.UNIQUE_GUARANTEED


def test_uniqueness_rejects_unnatural_strict_priority():
    market, pricing, _ = instances.section5_deviation()
    rep = check_uniqueness(market, pricing, instances.section5_deviation()[2], empirical=False)
    assert "priorities are not natural" in rep.reasons
