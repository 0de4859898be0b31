"""Writes the bundled fixtures from the named instances.

Run ``python -m fishercomp.fixturegen DIR`` to regenerate; the test suite
checks the shipped files are byte-identical to a fresh run.
"""
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import instances
from .duopoly import ce_profile, induce_market, prop10_profile, table3_market
from .equilibrium import table1_best_response
from .market.io import allocation_to_dict, dumps_market

F = Fraction

TEXT_FIXTURES = {
    "sat_sample.cnf": "c two unit clauses on one variable\np cnf 1 2\n1 0\n-1 0\n",
    "sat_3var.cnf": "c one clause on three variables\np cnf 3 1\n1 2 3 0\n",
    "matching_path.txt": "# path i1 - j1 - i2\ni1 j1\ni2 j1\n",
    "matching_k22.txt": "i1 j1\ni1 j2\ni2 j1\ni2 j2\n",
}


def fixture_texts():
    out = {}

    def market(name, m, p=None, pr=None):
        out[f"{name}.json"] = dumps_market(m, p, pr)

    m, p, _ = instances.sec41()
    market("sec41", m, p)
    m, p, _ = instances.example1()
    market("example1_ce", m, p)
    out["example1_ce_allocation.json"] = json.dumps(
        allocation_to_dict(m, instances.example1_ce_allocation()), indent=2) + "\n"
    m, p, _ = instances.example1(prices=(F(4, 3), F(2, 3), 2))
    market("example1", m, p)
    m, p, _ = instances.example1(prices=(F(4, 3), F(2, 3), 2), owners=(0, 1, 0))
    market("example1_owners", m, p)
    m, p, pr = instances.section5_deviation()
    market("section5_deviation", m, p, pr)
    r = table1_best_response(2, 1)
    market("table1", instances.table1(), r.pricing, r.priorities)
    for name, (s, t), profile in [
        ("table3_corner_ce", (1, 0), ce_profile()),
        ("table3_corner_prop10", (1, 0), prop10_profile()),
        ("table3_center_ce", (F(1, 2), F(1, 2)), ce_profile()),
    ]:
        m = table3_market(s, t)
        ind = induce_market(m, profile)
        market(name, m, ind.pricing, ind.priorities)
    m, p, _ = instances.d3_tight()
    market("d3_tight", m, p)
    out.update(TEXT_FIXTURES)
    return out


def write_fixtures(directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, text in fixture_texts().items():
        (directory / name).write_text(text)


if __name__ == "__main__":
    write_fixtures(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "fixtures")
