import copy
import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from fishercomp import instances
from fishercomp.errors import ParseError, ValidationError
from fishercomp.market import (
    Allocation, Market, PricingProfile, PriorityProfile, allocation_from_dict, allocation_to_dict,
    available_fraction, dumps_market, is_natural, load_market, loads_market, natural_priority,
    preference_profile, revenue, save_market,
)

from gen import random_instance, rng_for

EXAMPLE1 = {
    "buyers": [{"id": "b1", "budget": "2"}, {"id": "b2", "budget": "2"}],
    "sellers": [{"id": "s1"}, {"id": "s2"}],
    "items": [{"id": "g1", "seller": "s1"}, {"id": "g2", "seller": "s2"}, {"id": "g3", "seller": "s2"}],
    "valuations": {"b1": {"g1": "2", "g2": "1"}, "b2": {"g1": "1/3", "g2": "1", "g3": "1"}},
    "pricing": {"mode": "uniform", "prices": {"g1": "2", "g2": "1", "g3": "1"}},
}


def test_load_example1():
    market, pricing, priorities = loads_market(json.dumps(EXAMPLE1))
    assert market.budgets == (2, 2)
    assert market.valuations == ((2, 1, 0), (F(1, 3), 1, 1))
    assert pricing.item_prices() == (2, 1, 1)
    assert priorities is None


def test_save_and_load(tmp_path):
    market, pricing, priorities = instances.section5_deviation()
    path = tmp_path / "m.json"
    save_market(path, market, pricing, priorities)
    assert load_market(path) == (market, pricing, priorities)


@pytest.mark.parametrize("mutate,error", [
    (lambda d: d["items"][0].update(seller="s9"), ValidationError),
    (lambda d: d["items"].append({"id": "g1", "seller": "s1"}), ValidationError),
    (lambda d: d["pricing"]["prices"].update(g1="0"), ValidationError),
    (lambda d: d.update(extra=1), ParseError),
    (lambda d: d["valuations"]["b1"].update(g9="1"), ParseError),
    (lambda d: d["buyers"][0].update(budget="1.5"), ParseError),
    (lambda d: d["valuations"]["b2"].update(g3="0"), ValidationError),  # nobody values g3
    (lambda d: d["pricing"].update(mode="auction"), ParseError),
    (lambda d: d.update(priorities={"g1": [["b1"]]}), ValidationError),
])
def test_invalid_files(mutate, error):
    data = copy.deepcopy(EXAMPLE1)
    mutate(data)
    with pytest.raises(error):
        loads_market(json.dumps(data))


def test_malformed_json():
    with pytest.raises(ParseError):
        loads_market("{not json")


def test_negative_values_rejected():
    with pytest.raises(ValidationError):
        Market.build([-1], [[1]])
    with pytest.raises(ValidationError):
        PricingProfile.uniform([-1], 1)
    with pytest.raises(ValidationError):
        PricingProfile(((F(1),), (F(2),)), mode="uniform")


def test_natural_priority():
    market = Market.build([1, 1], [[1], [1]])
    assert natural_priority(market, PricingProfile.uniform([1], 2)).ranks == ((0, 0),)
    prio = natural_priority(market, PricingProfile.personalized([[3], [1]]))
    assert prio.ranks == ((0, 1),)


def test_natural_priority_on_choice_item():
    from fishercomp.oracle import SatInstance, sat_gadget_build
    g = sat_gadget_build(SatInstance(1, ()))
    j = g.choice_item[1]
    cb, lb = g.choice_buyer[1], g.literal_buyer[1]
    assert g.pricing.prices[cb][j] == 13 and g.pricing.prices[lb][j] == 12
    assert g.priorities.above(j, cb, lb)
    others = [i for i in range(g.market.n) if i not in (cb, lb)]
    assert all(g.priorities.above(j, lb, i) for i in others)


def test_is_natural():
    market, pricing, prio = instances.example1()
    assert is_natural(prio, pricing)
    strict = PriorityProfile.from_groups([[[0], [1]]] * 3, 2)
    assert not is_natural(strict, pricing)
    m5, p5, pr5 = instances.section5_deviation()
    assert not is_natural(pr5, p5)


def test_available_fraction():
    market, pricing, prio = instances.sec41()
    zero = Allocation.zeros(2, 2)
    assert all(available_fraction(market, pricing, prio, zero, i, j) == 1 for i in range(2) for j in range(2))
    strict = PriorityProfile.from_groups([[[0], [1]], [[0], [1]]], 2)
    held = Allocation.of([[0, 1], [0, 0]])
    assert available_fraction(market, pricing, strict, held, 1, 1) == 0
    half = Allocation.of([[0, F(1, 2)], [0, F(1, 2)]])
    assert available_fraction(market, pricing, prio, half, 1, 1) == F(1, 2)


def test_revenue_examples():
    market, pricing, _ = instances.sec41()
    assert revenue(market, pricing, Allocation.zeros(2, 2)).total == 0
    r = revenue(market, pricing, Allocation.of([[1, 0], [0, 1]]))
    assert r.per_seller == (1, 1) and r.total == 2
    market, pricing, _ = instances.example1()
    r = revenue(market, pricing, instances.example1_ce_allocation())
    assert r.per_seller == (2, 2)


def test_preference_profile_levels():
    market, pricing, _ = instances.example1()
    prefs = preference_profile(market, pricing)
    # buyer 2: g2, g3 at bang-per-buck 1, g1 at 1/6
    assert prefs.levels(1) == [[1, 2], [0]]
    assert not prefs.is_strict(1)


def test_allocation_validation():
    with pytest.raises(ValidationError):
        Allocation.of([[F(3, 2)]])
    with pytest.raises(ValidationError):
        Allocation.of([[F(2, 3)], [F(2, 3)]])
    market, _, _ = instances.example1()
    alloc = instances.example1_ce_allocation()
    assert allocation_from_dict(market, allocation_to_dict(market, alloc)) == alloc


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_market_file_round_trip(seed):
    market, pricing, priorities, _ = random_instance(rng_for("io", seed))
    text = dumps_market(market, pricing, priorities)
    assert loads_market(text) == (market, pricing, priorities)
    assert dumps_market(*loads_market(text)) == text
