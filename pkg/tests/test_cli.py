import json
import os
from fractions import Fraction as F
from pathlib import Path

import pytest

from fishercomp import cli, fixturegen
from fishercomp.market import Market, PricingProfile, dumps_market

GOLDEN_DIR = Path(__file__).parent / "golden"
UPDATE = os.environ.get("FISHERCOMP_UPDATE_GOLDEN") == "1"

GOLDEN = {
    "check_example1": ["check", "example1"],
    "stable_sec41": ["stable", "sec41"],
    "maxrev_sec41_certificate": ["maxrev", "sec41", "--emit-certificate"],
    "extrema_d3_tight": ["extrema", "d3_tight"],
    "extrema_section5": ["extrema", "section5_deviation.json"],
    "ce_example1": ["ce", "example1"],
    "maximin_example1": ["maximin", "example1", "--brief"],
    "maximin_owners": ["maximin", "example1_owners", "--brief"],
    "duopoly_prop10": ["duopoly", "table3", "--s", "1", "--t", "0", "--profile", "prop10"],
    "duopoly_ce_center": ["duopoly", "table3", "--no-nash"],
    "duopoly_sweep": ["duopoly", "table3", "--sweep", "1/3,1/2", "--no-nash"],
    "gadget_sat_solve": ["gadget", "sat", "--in", "sat_sample.cnf", "--solve"],
    "gadget_sat_market": ["gadget", "sat", "--in", "sat_sample.cnf"],
    "gadget_matching_solve": ["gadget", "matching", "--in", "matching_path.txt", "--solve"],
    "gadget_matching_select": ["gadget", "matching", "--in", "matching_path.txt", "--select", "j1", "--solve"],
    "fixtures": ["fixtures"],
}


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden_output(name, capsys):
    code, out, _ = run(GOLDEN[name], capsys)
    assert code == 0
    path = GOLDEN_DIR / f"{name}.out"
    if UPDATE:
        GOLDEN_DIR.mkdir(exist_ok=True)
        path.write_text(out)
    assert out == path.read_text()
    # byte-stable across runs
    assert run(GOLDEN[name], capsys)[1] == out


def test_stem_resolution(capsys):
    a = run(["stable", "examples/sec41.json"], capsys)[1]
    b = run(["stable", "sec41"], capsys)[1]
    assert json.loads(a)["allocation"] == json.loads(b)["allocation"]


def test_file_path_input(tmp_path, capsys):
    market = Market.build([1], [[1]])
    path = tmp_path / "one.json"
    path.write_text(dumps_market(market, PricingProfile.uniform([2], 1)))
    code, out, _ = run(["stable", str(path)], capsys)
    assert code == 0 and "1/2" in out


def test_float_and_timing(capsys):
    out = json.loads(run(["extrema", "d3_tight", "--float", "--timing"], capsys)[1])
    assert "wall_time_s" in out
    assert out["total_min"]["value"] == 1.0
    assert out["total_min"]["allocation"]["b1"]["g1"] == 1.0


def test_expect_failure_exit_code(capsys):
    code, _, err = run(["maximin", "example1_owners", "--grid", "none", "--expect", "refuted"], capsys)
    assert code == cli.EXIT_EXPECTATION and "expectation failed" in err
    code, _, _ = run(["duopoly", "table3", "--s", "1", "--t", "0", "--expect", "pass"], capsys)
    assert code == cli.EXIT_EXPECTATION
    assert run(["maximin", "example1", "--expect", "certified", "--brief"], capsys)[0] == cli.EXIT_OK


def test_invalid_input_exit_codes(tmp_path, capsys):
    assert run(["stable", "no_such_market.json"], capsys)[0] == cli.EXIT_VALIDATION
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(["check", str(bad)], capsys)
    assert code == cli.EXIT_VALIDATION and err.startswith("PARSE_ERROR")
    code, _, _ = run(["duopoly", "table3", "--profile", "conjecture", "--s", "3/4", "--t", "1/4"], capsys)
    assert code == cli.EXIT_VALIDATION
    cnf = tmp_path / "bad.cnf"
    cnf.write_text("p cnf 1 1\n1 2 0\n")
    assert run(["gadget", "sat", "--in", str(cnf)], capsys)[0] == cli.EXIT_VALIDATION


def test_size_cap_exit_code(tmp_path, capsys):
    market = Market.build([1] * 6, [[1]] * 6)
    path = tmp_path / "big.json"
    path.write_text(dumps_market(market, PricingProfile.uniform([1], 6)))
    code, _, err = run(["extrema", str(path)], capsys)
    assert code == cli.EXIT_SIZE_CAP and err.startswith("SIZE_CAP_EXCEEDED")


def test_conjecture_is_labelled(capsys):
    argv = ["duopoly", "table3", "--profile", "conjecture", "--s", "3/4", "--t", "1/4", "--experimental", "--no-nash"]
    code, out, _ = run(argv, capsys)
    assert code == 0 and "CONJECTURE" in out and "16/15" in out


def test_fixtures_match_generator():
    root = Path(cli.__file__).parent / "fixtures"
    texts = fixturegen.fixture_texts()
    assert sorted(texts) == cli.fixture_names()
    for name, text in texts.items():
        assert (root / name).read_text() == text


def test_seed_variable_accepted(monkeypatch, capsys):
    monkeypatch.setenv("FF_SEED", "7")
    assert run(["check", "sec41"], capsys)[0] == 0


def test_ce_report_values(capsys):
    out = json.loads(run(["ce", "example1"], capsys)[1])
    assert out["exact"] and out["verified"]
    assert out["prices"] == {"g1": "2", "g2": "1", "g3": "1"}
    assert F(out["revenue"]["total"]) == 4
