"""JSON market and allocation files.

Market file::

    {
      "buyers":  [{"id": "b1", "budget": "2"}, ...],
      "sellers": [{"id": "s1"}, ...],
      "items":   [{"id": "g1", "seller": "s1"}, ...],
      "valuations": {"b1": {"g1": "2", "g2": "1"}, ...},
      "pricing": {"mode": "uniform", "prices": {"g1": "2", ...}},
      "priorities": {"g1": [["b1"], ["b2"]], ...}
    }

``pricing`` and ``priorities`` are optional.  Personalized prices map buyer
to item to price.  Missing valuations and personalized prices are zero; a
missing priority entry means all buyers tie.  Unknown fields are rejected.
"""
import json
from pathlib import Path

from ..errors import ParseError, ValidationError
from ..exactnum import parse_rational, render_rational
from .model import Allocation, Market, PricingMode, PricingProfile, PriorityProfile, validate_pricing

_TOP_FIELDS = {"buyers", "sellers", "items", "valuations", "pricing", "priorities"}


def _check_fields(obj, allowed, where, required=()):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ParseError(f"{where}: unknown field(s) {sorted(unknown)}")
    for f in required:
        if f not in obj:
            raise ParseError(f"{where}: missing field {f!r}")


def _rat(value, where):
    try:
        return parse_rational(value)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def market_from_dict(data):
    """Returns ``(market, pricing or None, priorities or None)``."""
    _check_fields(data, _TOP_FIELDS, "market", required=("buyers", "sellers", "items", "valuations"))
    buyers, budgets = [], []
    for k, b in enumerate(data["buyers"]):
        _check_fields(b, {"id", "budget"}, f"buyers[{k}]", required=("id", "budget"))
        buyers.append(str(b["id"]))
        budgets.append(_rat(b["budget"], f"buyers[{k}].budget"))
    sellers = []
    for k, s in enumerate(data["sellers"]):
        _check_fields(s, {"id"}, f"sellers[{k}]", required=("id",))
        sellers.append(str(s["id"]))
    seller_idx = {s: k for k, s in enumerate(sellers)}
    items, owners = [], []
    for k, it in enumerate(data["items"]):
        _check_fields(it, {"id", "seller"}, f"items[{k}]", required=("id", "seller"))
        if it["seller"] not in seller_idx:
            raise ValidationError(
                f"items[{k}]: seller {it['seller']!r} unknown; ownership must partition the items"
            )
        items.append(str(it["id"]))
        owners.append(seller_idx[it["seller"]])
    buyer_idx = {b: i for i, b in enumerate(buyers)}
    item_idx = {g: j for j, g in enumerate(items)}
    if len(item_idx) != len(items):
        raise ValidationError("duplicate item ids: ownership must partition the items")

    def matrix(block, where):
        rows = [[0] * len(items) for _ in buyers]
        if not isinstance(block, dict):
            raise ParseError(f"{where}: expected an object")
        for b, row in block.items():
            if b not in buyer_idx:
                raise ParseError(f"{where}: unknown buyer {b!r}")
            if not isinstance(row, dict):
                raise ParseError(f"{where}.{b}: expected an object")
            for g, v in row.items():
                if g not in item_idx:
                    raise ParseError(f"{where}.{b}: unknown item {g!r}")
                rows[buyer_idx[b]][item_idx[g]] = _rat(v, f"{where}.{b}.{g}")
        return rows

    market = Market(
        buyers=tuple(buyers),
        budgets=tuple(budgets),
        sellers=tuple(sellers),
        items=tuple(items),
        item_seller=tuple(owners),
        valuations=tuple(tuple(r) for r in matrix(data["valuations"], "valuations")),
    )

    pricing = None
    if "pricing" in data:
        pr = data["pricing"]
        _check_fields(pr, {"mode", "prices"}, "pricing", required=("mode", "prices"))
        try:
            mode = PricingMode(pr["mode"])
        except ValueError:
            raise ParseError(f"pricing.mode: expected 'uniform' or 'personalized', got {pr['mode']!r}") from None
        if mode == PricingMode.UNIFORM:
            row = [0] * len(items)
            if not isinstance(pr["prices"], dict):
                raise ParseError("pricing.prices: expected an object")
            for g, v in pr["prices"].items():
                if g not in item_idx:
                    raise ParseError(f"pricing.prices: unknown item {g!r}")
                row[item_idx[g]] = _rat(v, f"pricing.prices.{g}")
            pricing = PricingProfile.uniform(row, len(buyers))
        else:
            pricing = PricingProfile.personalized(matrix(pr["prices"], "pricing.prices"))
        validate_pricing(market, pricing)

    priorities = None
    if "priorities" in data:
        block = data["priorities"]
        if not isinstance(block, dict):
            raise ParseError("priorities: expected an object")
        groups = [[list(range(len(buyers)))] for _ in items]
        for g, ranked in block.items():
            if g not in item_idx:
                raise ParseError(f"priorities: unknown item {g!r}")
            try:
                groups[item_idx[g]] = [[buyer_idx[b] for b in grp] for grp in ranked]
            except (KeyError, TypeError):
                raise ParseError(f"priorities.{g}: rank groups must list known buyer ids") from None
        priorities = PriorityProfile.from_groups(groups, len(buyers))
    return market, pricing, priorities


def market_to_dict(market, pricing=None, priorities=None):
    out = {
        "buyers": [{"id": b, "budget": render_rational(B)} for b, B in zip(market.buyers, market.budgets)],
        "sellers": [{"id": s} for s in market.sellers],
        "items": [{"id": g, "seller": market.sellers[k]} for g, k in zip(market.items, market.item_seller)],
        "valuations": {
            b: {g: render_rational(v) for g, v in zip(market.items, row) if v}
            for b, row in zip(market.buyers, market.valuations)
        },
    }
    if pricing is not None:
        if pricing.is_uniform:
            prices = {g: render_rational(p) for g, p in zip(market.items, pricing.item_prices())}
        else:
            prices = {
                b: {g: render_rational(p) for g, p in zip(market.items, row) if p}
                for b, row in zip(market.buyers, pricing.prices)
            }
        out["pricing"] = {"mode": pricing.mode.value, "prices": prices}
    if priorities is not None:
        out["priorities"] = {
            g: [[market.buyers[i] for i in grp] for grp in priorities.groups(j)]
            for j, g in enumerate(market.items)
        }
    return out


def load_market(path):
    text = Path(path).read_text(encoding="utf-8")
    return loads_market(text)


def loads_market(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return market_from_dict(data)


def dumps_market(market, pricing=None, priorities=None):
    return json.dumps(market_to_dict(market, pricing, priorities), indent=2) + "\n"


def save_market(path, market, pricing=None, priorities=None):
    Path(path).write_text(dumps_market(market, pricing, priorities), encoding="utf-8")


def allocation_to_dict(market, allocation):
    return {
        b: {g: render_rational(v) for g, v in zip(market.items, row) if v}
        for b, row in zip(market.buyers, allocation.x)
    }


def allocation_from_dict(market, data):
    buyer_idx = {b: i for i, b in enumerate(market.buyers)}
    item_idx = {g: j for j, g in enumerate(market.items)}
    entries = {}
    if not isinstance(data, dict):
        raise ParseError("allocation: expected an object")
    for b, row in data.items():
        if b not in buyer_idx:
            raise ParseError(f"allocation: unknown buyer {b!r}")
        for g, v in row.items():
            if g not in item_idx:
                raise ParseError(f"allocation.{b}: unknown item {g!r}")
            entries[(buyer_idx[b], item_idx[g])] = _rat(v, f"allocation.{b}.{g}")
    return Allocation.from_entries(market.n, market.m, entries)
