import io
from fractions import Fraction as F

import pytest

from fishercomp.duopoly import (
    DEFAULT_GRID, DuopolyProfile, ce_profile, conjectured_profile, deviation_revenue_formula, duopoly_outcome,
    formula_applies, formula_deviation_profile, grid_deviations, induce_market, is_nash_on_grid, prop10_profile,
    sweep_rows, table3_market, write_sweep,
)
from fishercomp.errors import NotDuopoly, OutOfRegime, ValidationError
from fishercomp.market import Market, is_natural

THIRDS = (F(1, 3), F(1, 2), F(2, 3))


def test_family_market_drops_unvalued_items():
    assert table3_market(F(1, 2), F(1, 2)).items == ("g1", "g2", "g3", "g4")
    corner = table3_market(1, 0)
    assert corner.items == ("g1", "g3") and corner.item_seller == (0, 1)
    with pytest.raises(OutOfRegime):
        table3_market(2, 0)


def test_induce_ce_profile():
    market = table3_market(F(1, 2), F(1, 2))
    ind = induce_market(market, ce_profile())
    assert ind.pricing.prices == market.valuations
    assert ind.preferred_seller == (None, None)
    assert all(r == 0 for row in ind.preferences.ranks for r in row)
    assert is_natural(ind.priorities, ind.pricing)


def test_induce_crossed_profile():
    market = table3_market(1, 0)
    ind = induce_market(market, prop10_profile())
    assert ind.preferred_seller == (0, 1)
    assert ind.pricing.prices == ((F(4, 3), F(8, 3)), (F(8, 3), F(4, 3)))
    assert ind.preferences.ranks == ((0, 1), (1, 0))


def test_induce_raised_report():
    market = table3_market(F(1, 2), F(1, 2))
    ind = induce_market(market, DuopolyProfile.of([2, 1], [1, 1]))
    assert ind.preferred_seller[0] == 1
    assert ind.pricing.prices[0] == tuple(2 * v for v in market.valuations[0])


def test_induce_errors():
    market = Market.build([1], [[1]])
    with pytest.raises(NotDuopoly):
        induce_market(market, DuopolyProfile.uniform(1))
    with pytest.raises(ValidationError):
        induce_market(table3_market(1, 0), DuopolyProfile.uniform(3))
    with pytest.raises(ValidationError):
        DuopolyProfile.of([-1], [1])


def test_ce_outcome_selection_free():
    out = duopoly_outcome(table3_market(F(1, 2), F(1, 2)), ce_profile())
    assert out.seller_min == out.seller_max == (2, 2)
    assert out.selection_free


@pytest.mark.parametrize("s", THIRDS)
@pytest.mark.parametrize("t", THIRDS)
def test_ce_outcome_on_middle_square(s, t):
    out = duopoly_outcome(table3_market(s, t), ce_profile())
    assert out.selection_free and out.seller_min == (2 * s + 2 * t, 4 - 2 * s - 2 * t)


def test_crossed_profile_halves():
    out = duopoly_outcome(table3_market(1, 0), prop10_profile())
    assert out.seller_min == out.seller_max == (2, 2)
    for x in out.min_allocations + out.max_allocations:
        assert all(x[i, j] == F(1, 2) for i in range(2) for j in range(2))


def test_one_sided_market():
    out = duopoly_outcome(table3_market(F(1, 2), F(1, 2)), DuopolyProfile.of([1, 1], [100, 100]))
    assert out.seller_min == out.seller_max == (4, 0)


def test_formula_values():
    for s in THIRDS:
        for t in THIRDS[:2]:
            assert deviation_revenue_formula(s, t, 1) == 2 * s + 2 * t
    assert deviation_revenue_formula(F(1, 2), F(1, 2), 2) == 1
    with pytest.raises(OutOfRegime):
        deviation_revenue_formula(F(1, 2), F(2, 3), 2)
    with pytest.raises(OutOfRegime):
        deviation_revenue_formula(F(1, 2), F(1, 2), F(9, 10))


def test_formula_matches_oracle_where_shares_are_fractions():
    agree = 0
    for s in THIRDS:
        for t in THIRDS[:2]:
            for p in (F(5, 4), F(3, 2), 2, 3):
                if not formula_applies(s, t, p):
                    continue
                out = duopoly_outcome(table3_market(s, t), formula_deviation_profile(p))
                value = deviation_revenue_formula(s, t, p)
                assert out.seller_min[0] == out.seller_max[0] == value
                agree += 1
    assert agree == 9


def test_formula_outside_range_disagrees():
    out = duopoly_outcome(table3_market(F(1, 2), F(1, 2)), formula_deviation_profile(2))
    assert not formula_applies(F(1, 2), F(1, 2), 2)
    assert out.seller_min[0] == F(3, 2) != deviation_revenue_formula(F(1, 2), F(1, 2), 2)


def test_grid_pruning():
    devs = grid_deviations(ce_profile(), 0)
    # one representative below the opponent's 1, then 25 values from 1 up to 3
    assert len(devs) == 26 * 26 - 1
    assert all(d.b == (1, 1) for d in devs)
    small = grid_deviations(ce_profile(), 1, grid=(F(1, 2), F(3, 4), 1, 2))
    assert len(small) == 3 * 3 - 1
    assert len(DEFAULT_GRID) == 36 and DEFAULT_GRID[-1] == 3


def test_nash_examples():
    assert is_nash_on_grid(table3_market(F(1, 2), F(1, 2)), ce_profile()).passed
    res = is_nash_on_grid(table3_market(1, 0), ce_profile())
    assert not res.passed and res.seller == 0 and res.deviation_revenue > res.current[0]
    assert is_nash_on_grid(table3_market(1, 0), prop10_profile()).passed


def test_conjectured_profile():
    assert conjectured_profile(1, 0) == prop10_profile()
    assert conjectured_profile(F(3, 4), F(1, 4)) == DuopolyProfile.of([1, F(16, 15)], [F(16, 15), 1])
    with pytest.raises(OutOfRegime):
        conjectured_profile(F(1, 2), 0)


def test_sweep_csv():
    rows = list(sweep_rows([(F(1, 2), F(1, 2)), (F(1, 2), 0)], "conjecture", nash=False))
    assert rows[0]["nash_verdict"] == "OUT_OF_REGIME"
    rows = list(sweep_rows([(F(1, 2), F(1, 2))], "ce", nash=False))
    buf = io.StringIO()
    write_sweep(buf, rows)
    assert buf.getvalue().splitlines() == [
        "s,t,profile,seller1_min,seller1_max,seller2_min,seller2_max,nash_verdict",
        "1/2,1/2,ce,2,2,2,2,",
    ]
