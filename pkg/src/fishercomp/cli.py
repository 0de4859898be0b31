"""Command-line interface.

Every command prints one JSON document (or CSV for sweeps) to stdout.
Numbers are exact rational strings unless ``--float`` is given.  Exit codes:
0 success, 2 invalid input, 3 size cap, 4 failed ``--expect``, 1 anything
else.
"""
import argparse
import hashlib
import json
import os
import re
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import __version__
from .errors import FisherCompError, NoConvergence, SizeCapExceeded
from .exactnum import parse_rational, render_rational
from .market.io import allocation_from_dict, allocation_to_dict, dumps_market, loads_market
from .market.model import PricingProfile, natural_priority, revenue

EXIT_OK, EXIT_ERROR, EXIT_VALIDATION, EXIT_SIZE_CAP, EXIT_EXPECTATION = 0, 1, 2, 3, 4

_INTERNAL = {"EVENT_BUDGET_EXCEEDED", "ASSERTION_FAILED", "INTERNAL_INCONSISTENCY", "STABILITY_CHECK_FAILED"}


class ExpectationFailed(Exception):
    pass


# -- input helpers ---------------------------------------------------------


def fixture_names():
    root = resources.files("fishercomp") / "fixtures"
    return sorted(p.name for p in root.iterdir() if not p.name.startswith("."))


def resolve_input(name):
    """A file path, or the name of a bundled fixture (with or without
    directory and extension)."""
    path = Path(name)
    if path.is_file():
        return path.read_bytes(), str(path)
    root = resources.files("fishercomp") / "fixtures"
    res = root / path.name
    if res.is_file():
        return res.read_bytes(), f"fixture:{path.name}"
    for candidate in fixture_names():
        if Path(candidate).stem == path.stem:
            return (root / candidate).read_bytes(), f"fixture:{candidate}"
    raise FileNotFoundError(f"no such file or fixture: {name}")


def _digest(data):
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _load(args):
    data, origin = resolve_input(args.market)
    market, pricing, priorities = loads_market(data.decode("utf-8"))
    return market, pricing, priorities, data, origin


def _need_pricing(market, pricing):
    if pricing is None:
        from .errors import ValidationError
        raise ValidationError("this command needs a market file with a pricing block")
    return pricing


def _priorities(market, pricing, priorities):
    return priorities if priorities is not None else natural_priority(market, pricing)


def _rational_list(text):
    return [parse_rational(t) for t in text.split(",") if t.strip()]


# -- output ----------------------------------------------------------------


_NUMERIC = re.compile(r"-?\d+(/\d+)?")


class Renderer:
    def __init__(self, as_float):
        self.as_float = as_float

    def num(self, q):
        if isinstance(q, float):
            return q
        return float(q) if self.as_float else render_rational(q)

    def convert(self, obj):
        if isinstance(obj, Fraction):
            return self.num(obj)
        if isinstance(obj, dict):
            return {k: self.convert(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [self.convert(v) for v in obj]
        if isinstance(obj, str) and self.as_float and _NUMERIC.fullmatch(obj):
            try:
                return float(parse_rational(obj))
            except ValueError:
                return obj
        return obj


def _allocation(market, allocation):
    return allocation_to_dict(market, allocation)


def _revenue_block(market, pricing, allocation):
    rev = revenue(market, pricing, allocation)
    return {"total": rev.total, "per_seller": dict(zip(market.sellers, rev.per_seller))}


def _emit(args, report, started):
    report = {"command": args.command, **report}
    if getattr(args, "timing", False):
        report["wall_time_s"] = round(time.perf_counter() - started, 6)
    out = Renderer(args.float).convert(report)
    sys.stdout.write(json.dumps(out, indent=2, sort_keys=False) + "\n")


# -- commands --------------------------------------------------------------


def cmd_check(args):
    market, pricing, priorities, data, origin = _load(args)
    return {
        "input": origin,
        "input_digest": _digest(data),
        "valid": True,
        "buyers": market.n,
        "items": market.m,
        "sellers": len(market.sellers),
        "pricing": None if pricing is None else pricing.mode.value,
        "priorities": "explicit" if priorities is not None else "natural",
    }


def cmd_stable(args):
    from .stability import is_stable, run_gale_shapley
    market, pricing, priorities, data, origin = _load(args)
    pricing = _need_pricing(market, pricing)
    prio = _priorities(market, pricing, priorities)
    result = run_gale_shapley(market, pricing, prio, debug=args.debug)
    report = is_stable(market, pricing, prio, result.allocation)
    s = result.stats
    return {
        "input": origin,
        "input_digest": _digest(data),
        "allocation": _allocation(market, result.allocation),
        "revenue": _revenue_block(market, pricing, result.allocation),
        "stable": report.stable,
        "violations": [
            {"buyer": market.buyers[v.buyer], "item": None if v.item is None else market.items[v.item],
             "reason": v.reason.value if hasattr(v.reason, "value") else v.reason}
            for v in report.violations
        ],
        "events": {"rounds": s.rounds, "proposals": s.proposals, "cycles": s.cycles,
                   "newly_full": s.newly_full, "leaves": s.leaves, "deactivations": s.deactivations},
    }


def cmd_maxrev(args):
    from .errors import InternalInconsistency
    from .revenue import build_flow_network, certificate_to_dict, max_revenue_lp, stable_edmonds_karp, structured_min_cut
    market, pricing, _, data, origin = _load(args)
    pricing = _need_pricing(market, pricing)
    out = {"input": origin, "input_digest": _digest(data), "method": args.method}
    if args.method in ("lp", "both"):
        lp = max_revenue_lp(market, pricing)
        out["lp"] = {"revenue": lp.revenue, "allocation": _allocation(market, lp.allocation)}
    if args.method in ("flow", "both"):
        ek = stable_edmonds_karp(market, pricing)
        out["flow"] = {"revenue": ek.revenue, "allocation": _allocation(market, ek.allocation)}
        if args.emit_certificate:
            cut = structured_min_cut(build_flow_network(market, pricing), ek.flow)
            out["certificate"] = certificate_to_dict(market, pricing, ek, cut)
    if args.method == "both" and out["lp"]["revenue"] != out["flow"]["revenue"]:
        raise InternalInconsistency("LP and flow revenues disagree")
    out["R"] = out.get("lp", out.get("flow"))["revenue"]
    return out


def _extremum(market, pricing, ext):
    return {"value": ext.value, "allocation": _allocation(market, ext.allocation)}


def cmd_extrema(args):
    from .oracle import stable_set_extrema
    market, pricing, priorities, data, origin = _load(args)
    pricing = _need_pricing(market, pricing)
    prio = _priorities(market, pricing, priorities)
    s = stable_set_extrema(market, pricing, prio)
    return {
        "input": origin,
        "input_digest": _digest(data),
        "cases_explored": s.cases_explored,
        "feasible_cases": s.feasible_cases,
        "total_min": _extremum(market, pricing, s.total_min),
        "total_max": _extremum(market, pricing, s.total_max),
        "seller_min": {market.sellers[k]: _extremum(market, pricing, e) for k, e in enumerate(s.seller_min)},
        "seller_max": {market.sellers[k]: _extremum(market, pricing, e) for k, e in enumerate(s.seller_max)},
        "selection_free": s.selection_free,
    }


def cmd_ce(args):
    from .equilibrium import competitive_equilibrium, verify_ce
    market, _, _, data, origin = _load(args)
    ce = competitive_equilibrium(market, tolerance=args.tol)
    out = {"input": origin, "input_digest": _digest(data), "exact": ce.exact}
    out["prices"] = dict(zip(market.items, ce.prices))
    if ce.exact:
        verdict = verify_ce(market, ce.prices, ce.allocation)
        out["allocation"] = _allocation(market, ce.allocation)
        out["utilities"] = dict(zip(market.buyers, ce.utilities))
        out["verified"] = verdict.ok
        out["revenue"] = _revenue_block(market, PricingProfile.uniform(ce.prices, market.n), ce.allocation)
    else:
        out["utilities"] = dict(zip(market.buyers, ce.utilities))
        out["gap"] = ce.gap
    out["iterations"] = ce.iterations
    return out


def _read_allocation(market, path):
    data, _ = resolve_input(path)
    try:
        block = json.loads(data.decode("utf-8"))
    except json.JSONDecodeError as exc:
        from .errors import ParseError
        raise ParseError(f"allocation file: {exc.msg}") from None
    return allocation_from_dict(market, block)


def _read_deviations(market, pricing, path):
    from .errors import ParseError
    data, _ = resolve_input(path)
    try:
        block = json.loads(data.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"deviations file: {exc.msg}") from None
    if not isinstance(block, list):
        raise ParseError("deviations file: expected a list of {item: price} objects")
    idx = {g: j for j, g in enumerate(market.items)}
    out = []
    for k, dev in enumerate(block):
        if not isinstance(dev, dict):
            raise ParseError(f"deviations[{k}]: expected an object")
        prices = list(pricing.item_prices())
        for g, p in dev.items():
            if g not in idx:
                raise ParseError(f"deviations[{k}]: unknown item {g!r}")
            prices[idx[g]] = parse_rational(p)
        out.append(tuple(prices))
    return out


def cmd_maximin(args):
    from .equilibrium.maximin import DEFAULT_FACTORS, verify_maximin
    from .revenue import max_revenue_lp
    market, pricing, _, data, origin = _load(args)
    pricing = _need_pricing(market, pricing)
    if args.allocation:
        allocation = _read_allocation(market, args.allocation)
    else:
        allocation = max_revenue_lp(market, pricing).allocation
    deviations = _read_deviations(market, pricing, args.deviations) if args.deviations else None
    use_grid = args.grid != "none"
    factors = DEFAULT_FACTORS if args.grid in (None, "none", "default") else tuple(_rational_list(args.grid))
    verdict = verify_maximin(market, pricing, allocation, deviations=deviations, factors=factors,
                             use_grid=use_grid, jobs=args.jobs)
    evidence = []
    for ev in verdict.evidence:
        item = {
            "seller": market.sellers[ev.seller],
            "prices": dict(zip(market.items, ev.prices)),
            "current": ev.current,
            "status": ev.status,
        }
        if ev.bound is not None:
            item["bound"] = ev.bound
        if ev.witness is not None:
            item["witness"] = _allocation(market, ev.witness)
            item["covering"] = _allocation(market, ev.covering)
        if args.brief and ev.status in ("WITNESS", "ORACLE"):
            item.pop("witness", None)
            item.pop("covering", None)
        evidence.append(item)
    out = {
        "input": origin,
        "input_digest": _digest(data),
        "allocation": _allocation(market, allocation),
        "verdict": verdict.verdict.value,
        "deviations_checked": len(verdict.evidence),
        "evidence": evidence,
    }
    if args.expect and verdict.verdict.value != args.expect.upper():
        _emit(args, out, args._started)
        raise ExpectationFailed(f"verdict {verdict.verdict.value}, expected {args.expect.upper()}")
    return out


def _profile_from_args(args):
    from .duopoly import NAMED_PROFILES, DuopolyProfile
    from .errors import ValidationError
    if args.profile == "values":
        if not (args.a and args.b):
            raise ValidationError("--profile values needs --a and --b")
        return DuopolyProfile.of(_rational_list(args.a), _rational_list(args.b))
    if args.profile == "conjecture" and not args.experimental:
        raise ValidationError("the conjectured profile is experimental; pass --experimental")
    return NAMED_PROFILES[args.profile](parse_rational(args.s), parse_rational(args.t))


def cmd_duopoly(args):
    from .duopoly import DEFAULT_GRID, duopoly_outcome, is_nash_on_grid, sweep_rows, table3_market, write_sweep
    from .errors import ValidationError
    if args.profile == "conjecture" and not args.experimental:
        raise ValidationError("the conjectured profile is experimental; pass --experimental")
    if args.sweep:
        values = _rational_list(args.sweep)
        points = [(s, t) for s in values for t in values]
        rows = sweep_rows(points, args.profile if args.profile != "values" else "ce", DEFAULT_GRID,
                          nash=not args.no_nash, jobs=args.jobs)
        if args.float:
            rows = ({k: (float(v) if isinstance(v, Fraction) else v) for k, v in r.items()} for r in rows)
        else:
            rows = ({k: (render_rational(v) if isinstance(v, Fraction) else v) for k, v in r.items()} for r in rows)
        write_sweep(sys.stdout, rows)
        return None
    s, t = parse_rational(args.s), parse_rational(args.t)
    market = table3_market(s, t)
    profile = _profile_from_args(args)
    outcome = duopoly_outcome(market, profile)
    out = {
        "family": "table3",
        "s": s,
        "t": t,
        "profile": {"name": args.profile, "a": list(profile.a), "b": list(profile.b)},
        "items": list(market.items),
        "seller_min": dict(zip(market.sellers, outcome.seller_min)),
        "seller_max": dict(zip(market.sellers, outcome.seller_max)),
        "selection_free": outcome.selection_free,
        "min_allocations": {market.sellers[k]: _allocation(market, a) for k, a in enumerate(outcome.min_allocations)},
    }
    if args.profile == "conjecture":
        out["label"] = "CONJECTURE"
    if not args.no_nash:
        nash = is_nash_on_grid(market, profile, DEFAULT_GRID, jobs=args.jobs)
        out["nash_verdict"] = "PASS" if nash.passed else "FAIL"
        out["deviations_checked"] = nash.deviations_checked
        if not nash.passed:
            out["profitable_deviation"] = {
                "seller": market.sellers[nash.seller],
                "a": list(nash.deviation.a),
                "b": list(nash.deviation.b),
                "worst_case_revenue": nash.deviation_revenue,
                "current_worst_case": nash.current[nash.seller],
            }
        if args.expect:
            want = args.expect.upper()
            if out["nash_verdict"] != want:
                _emit(args, out, args._started)
                raise ExpectationFailed(f"nash verdict {out['nash_verdict']}, expected {want}")
    return out


def _parse_assignment(text, n_vars):
    from .errors import ValidationError
    values = [True] * n_vars
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        lit = int(tok)
        if lit == 0 or abs(lit) > n_vars:
            raise ValidationError(f"assignment literal {lit} out of range")
        values[abs(lit) - 1] = lit > 0
    return tuple(values)


def cmd_gadget(args):
    from .oracle import (
        matching_gadget_build, matching_gadget_seller_variant, min_maximal_matching, parse_dimacs,
        parse_edge_list, sat_gadget_build, sat_gadget_max_revenue, stable_set_extrema,
    )
    data, origin = resolve_input(args.input)
    text = data.decode("utf-8")
    if args.kind == "sat":
        inst = parse_dimacs(text)
        assignment = _parse_assignment(args.assignment, inst.n_vars) if args.assignment else None
        gadget = sat_gadget_build(inst, args.variant, assignment)
        if not args.solve:
            sys.stdout.write(dumps_market(gadget.market, gadget.pricing, gadget.priorities))
            return None
        res = sat_gadget_max_revenue(gadget)
        return {
            "input": origin,
            "input_digest": _digest(data),
            "variant": args.variant,
            "variables": inst.n_vars,
            "clauses": len(inst.clauses),
            "gadget_budget": gadget.gadget_budget,
            "opt": res.opt,
            "max_revenue": res.revenue,
            "assignment": {f"x{v + 1}": b for v, b in enumerate(res.assignment)},
        }
    graph = parse_edge_list(text)
    if args.select is not None:
        market, pricing, prio = matching_gadget_seller_variant(graph, [s for s in args.select.split(",") if s])
    else:
        gadget = matching_gadget_build(graph)
        market, pricing, prio = gadget.market, gadget.pricing, gadget.priorities
    if not args.solve:
        sys.stdout.write(dumps_market(market, pricing, prio))
        return None
    out = {
        "input": origin,
        "input_digest": _digest(data),
        "left": len(graph.left),
        "right": len(graph.right),
        "edges": len(graph.edges),
        "min_maximal_matching": min_maximal_matching(graph),
    }
    if market.m:
        s = stable_set_extrema(market, pricing, prio)
        out["stable_revenue_min"] = s.total_min.value
        out["stable_revenue_max"] = s.total_max.value
        if args.select is not None:
            out["selected_seller_min"] = s.seller_min[0].value
            out["selected_seller_max"] = s.seller_max[0].value
    else:
        out["stable_revenue_min"] = out["stable_revenue_max"] = Fraction(0)
    return out


def cmd_fixtures(args):
    return {"fixtures": fixture_names()}


# -- parser ----------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="fishercomp", description="Stable allocations and seller pricing in Fisher markets.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--float", action="store_true", help="print decimals instead of exact fractions")
    common.add_argument("--timing", action="store_true", help="include wall time in the report")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for grid evaluations")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common], help="validate a market file")
    s.add_argument("market")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("stable", parents=[common], help="compute a stable allocation")
    s.add_argument("market")
    s.add_argument("--debug", action="store_true", help="check solver invariants every round")
    s.set_defaults(func=cmd_stable)

    s = sub.add_parser("maxrev", parents=[common], help="revenue-optimal stable allocation (uniform prices)")
    s.add_argument("market")
    s.add_argument("--method", choices=("lp", "flow", "both"), default="both")
    s.add_argument("--emit-certificate", action="store_true", help="include the flow and a minimum cut")
    s.set_defaults(func=cmd_maxrev)

    s = sub.add_parser("extrema", parents=[common], help="revenue extrema over all stable allocations")
    s.add_argument("market")
    s.set_defaults(func=cmd_extrema)

    s = sub.add_parser("ce", parents=[common], help="competitive equilibrium")
    s.add_argument("market")
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_ce)

    s = sub.add_parser("maximin", parents=[common], help="check one-seller price deviations")
    s.add_argument("market")
    s.add_argument("--allocation", help="allocation file (default: a revenue-optimal stable allocation)")
    s.add_argument("--deviations", help="JSON list of {item: price} deviations")
    s.add_argument("--grid", help="comma-separated price factors, 'default' or 'none'")
    s.add_argument("--expect", choices=("certified", "refuted", "unknown"))
    s.add_argument("--brief", action="store_true", help="omit witness allocations of certified deviations")
    s.set_defaults(func=cmd_maximin)

    s = sub.add_parser("duopoly", parents=[common], help="competitive duopoly on the (s, t) family")
    s.add_argument("family", choices=("table3",))
    s.add_argument("--s", default="1/2")
    s.add_argument("--t", default="1/2")
    s.add_argument("--profile", choices=("ce", "prop10", "conjecture", "values"), default="ce")
    s.add_argument("--a", help="seller 1 reports, comma-separated (with --profile values)")
    s.add_argument("--b", help="seller 2 reports, comma-separated (with --profile values)")
    s.add_argument("--sweep", help="comma-separated values used for both s and t; prints CSV")
    s.add_argument("--no-nash", action="store_true", help="skip the grid Nash check")
    s.add_argument("--experimental", action="store_true", help="allow the conjectured profile")
    s.add_argument("--expect", choices=("pass", "fail"))
    s.set_defaults(func=cmd_duopoly)

    s = sub.add_parser("gadget", parents=[common], help="hardness gadgets as market generators")
    s.add_argument("kind", choices=("sat", "matching"))
    s.add_argument("--in", dest="input", required=True, help="DIMACS CNF or edge list")
    s.add_argument("--variant", choices=("personalized", "uniform", "forced"), default="personalized")
    s.add_argument("--assignment", help="literals such as 1,-2,3 (forced variant)")
    s.add_argument("--select", help="right vertices owned by the first seller (adds the sentinel item)")
    s.add_argument("--solve", action="store_true", help="report optima instead of emitting the market")
    s.set_defaults(func=cmd_gadget)

    s = sub.add_parser("fixtures", parents=[common], help="list bundled fixtures")
    s.set_defaults(func=cmd_fixtures)
    return p


def _exit_code(exc):
    if isinstance(exc, SizeCapExceeded):
        return EXIT_SIZE_CAP
    if isinstance(exc, NoConvergence) or exc.code in _INTERNAL:
        return EXIT_ERROR
    return EXIT_VALIDATION


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args._started = time.perf_counter()
    seed = os.environ.get("FF_SEED")
    if seed is not None:
        import random
        random.seed(int(seed))
    try:
        report = args.func(args)
    except ExpectationFailed as exc:
        print(f"expectation failed: {exc}", file=sys.stderr)
        return EXIT_EXPECTATION
    except FisherCompError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except FileNotFoundError as exc:
        print(f"VALIDATION_ERROR: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"VALIDATION_ERROR: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if report is not None:
        _emit(args, report, args._started)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
