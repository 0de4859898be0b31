"""MAX-3SAT-3 instances turned into personalised-pricing markets.

Every variable gets a choice buyer, two literal buyers and ten items (two
choice items, three clause-literal items per literal, one buffer per
literal); every clause gets a buyer with budget 1 who may buy the
clause-literal items associated with it.  A stable allocation's revenue is
the gadget budgets plus one per clause satisfied by the assignment read off
the choice items, so the maximum stable revenue is ``37n + OPT``.
"""
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

from ..errors import Not3SAT3, ParseError, SizeCapExceeded, InternalInconsistency
from ..market.model import Allocation, Market, PricingProfile, PriorityProfile, natural_priority, revenue
from ..stability import is_stable

F = Fraction
MAX_EXACT_VARIABLES = 4
VARIANTS = ("personalized", "uniform", "forced")

# prices and values seen by each role; literal buyers are indifferent between
# the choice item and their clause-literal items and like the buffer less
CHOICE_PRICE = {"choice": 13, "literal": 12}
CLAUSE_LITERAL_PRICE = {"literal": 2, "clause": 1}
BUFFER_PRICE = 6
VALUES = {"choice": 13, "literal_choice": 12, "literal_clause": 2, "literal_buffer": 1, "clause": 1}


@dataclass(frozen=True)
class SatInstance:
    n_vars: int
    clauses: Tuple[Tuple[int, ...], ...]  # DIMACS literals: +v / -v, v in 1..n_vars

    def __post_init__(self):
        if self.n_vars < 0:
            raise Not3SAT3("negative variable count")
        count = {}
        for c in self.clauses:
            if not 1 <= len(c) <= 3:
                raise Not3SAT3(f"clause {c} must have one to three literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise Not3SAT3(f"literal {lit} is outside 1..{self.n_vars}")
                count[abs(lit)] = count.get(abs(lit), 0) + 1
        for v, k in count.items():
            if k > 3:
                raise Not3SAT3(f"variable {v} appears {k} times (at most 3 allowed)")

    def satisfied(self, assignment):
        """Number of clauses satisfied; ``assignment[v - 1]`` is variable v's value."""
        return sum(any((lit > 0) == assignment[abs(lit) - 1] for lit in c) for c in self.clauses)


def max_sat(instance):
    """Brute-force MAX-SAT optimum and the first assignment attaining it."""
    best, arg = -1, None
    for bits in itertools.product((False, True), repeat=instance.n_vars):
        k = instance.satisfied(bits)
        if k > best:
            best, arg = k, bits
    return best, arg


def parse_dimacs(text):
    n_vars, declared, clauses, current = None, None, [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad problem line: {line!r}")
            n_vars, declared = int(parts[2]), int(parts[3])
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if n_vars is None:
        raise ParseError("missing 'p cnf' line")
    if declared != len(clauses):
        raise ParseError(f"header declares {declared} clauses, found {len(clauses)}")
    return SatInstance(n_vars, tuple(clauses))


def _lit_name(lit):
    return f"{'+' if lit > 0 else '-'}x{abs(lit)}"


@dataclass(frozen=True)
class SatGadget:
    instance: SatInstance
    variant: str
    market: Market
    pricing: PricingProfile
    priorities: PriorityProfile
    choice_buyer: Dict[int, int]  # variable -> buyer index
    literal_buyer: Dict[int, int]  # literal -> buyer index
    clause_buyer: Tuple[int, ...]
    choice_item: Dict[int, int]  # literal -> item index
    clause_literal_items: Dict[int, Tuple[Tuple[int, Optional[int]], ...]]  # literal -> (item, clause or None)
    buffer_item: Dict[int, int]
    forced: Optional[Tuple[bool, ...]] = field(default=None)

    @property
    def gadget_budget(self):
        return sum(self.market.budgets[b] for b in self.choice_buyer.values()) + sum(
            self.market.budgets[b] for b in self.literal_buyer.values())


def sat_gadget_build(instance, variant="personalized", assignment=None):
    """Build the market.  ``uniform`` charges every buyer the same price per
    item (choice items 12, clause-literal items 2) with choice buyers first
    on choice items; ``forced`` additionally puts the literal buyer of the
    TRUE literal (per ``assignment``) first on its choice item."""
    if variant not in VARIANTS:
        raise Not3SAT3(f"unknown variant {variant!r}")
    if variant == "forced":
        assignment = tuple(assignment) if assignment is not None else (True,) * instance.n_vars
        if len(assignment) != instance.n_vars:
            raise Not3SAT3("assignment must give one value per variable")
    uniform = variant != "personalized"
    buyers, budgets, items = [], [], []
    choice_buyer, literal_buyer, choice_item, cl_items, buffer_item = {}, {}, {}, {}, {}
    associated = {}
    for c_idx, clause in enumerate(instance.clauses):
        for lit in clause:
            associated.setdefault(lit, []).append(c_idx)
    for v in range(1, instance.n_vars + 1):
        choice_buyer[v] = len(buyers)
        buyers.append(f"choice:x{v}")
        budgets.append(12 if uniform else 13)
        for lit in (v, -v):
            literal_buyer[lit] = len(buyers)
            buyers.append(f"lit:{_lit_name(lit)}")
            budgets.append(12)
        for lit in (v, -v):
            choice_item[lit] = len(items)
            items.append(f"choice:{_lit_name(lit)}")
        for lit in (v, -v):
            owners = associated.get(lit, [])
            slots = []
            for k in range(3):
                slots.append((len(items), owners[k] if k < len(owners) else None))
                items.append(f"cl{k + 1}:{_lit_name(lit)}")
            cl_items[lit] = tuple(slots)
        for lit in (v, -v):
            buffer_item[lit] = len(items)
            items.append(f"buffer:{_lit_name(lit)}")
    clause_buyer = []
    for c_idx in range(len(instance.clauses)):
        clause_buyer.append(len(buyers))
        buyers.append(f"clause:C{c_idx + 1}")
        budgets.append(1)
    n, m = len(buyers), len(items)
    val = [[F(0)] * m for _ in range(n)]
    price = [[F(0)] * m for _ in range(n)]
    for v in range(1, instance.n_vars + 1):
        cb = choice_buyer[v]
        for lit in (v, -v):
            lb = literal_buyer[lit]
            g = choice_item[lit]
            val[cb][g] = F(VALUES["choice"])
            price[cb][g] = F(12 if uniform else CHOICE_PRICE["choice"])
            val[lb][g] = F(VALUES["literal_choice"])
            price[lb][g] = F(CHOICE_PRICE["literal"])
            for j, c_idx in cl_items[lit]:
                val[lb][j] = F(VALUES["literal_clause"])
                price[lb][j] = F(CLAUSE_LITERAL_PRICE["literal"])
                if c_idx is not None:
                    val[clause_buyer[c_idx]][j] = F(VALUES["clause"])
                    price[clause_buyer[c_idx]][j] = F(
                        CLAUSE_LITERAL_PRICE["literal"] if uniform else CLAUSE_LITERAL_PRICE["clause"])
            val[lb][buffer_item[lit]] = F(VALUES["literal_buffer"])
            price[lb][buffer_item[lit]] = F(BUFFER_PRICE)
    market = Market.build(budgets, val, buyers=buyers, items=items)
    if uniform:
        item_prices = [max(price[i][j] for i in range(n)) for j in range(m)]
        pricing = PricingProfile.uniform(item_prices, n)
    else:
        pricing = PricingProfile.personalized(price)
    if not uniform:
        priorities = natural_priority(market, pricing)
    else:
        groups = []
        for j in range(m):
            interested = [i for i in range(n) if val[i][j] > 0]
            ranked = _uniform_groups(j, interested, choice_item, choice_buyer, literal_buyer,
                                     clause_buyer, assignment if variant == "forced" else None)
            others = [i for i in range(n) if val[i][j] == 0]
            groups.append(ranked + ([others] if others else []))
        priorities = PriorityProfile.from_groups(groups, n)
    return SatGadget(instance, variant, market, pricing, priorities, choice_buyer, literal_buyer,
                     tuple(clause_buyer), choice_item, cl_items, buffer_item,
                     assignment if variant == "forced" else None)


def _uniform_groups(j, interested, choice_item, choice_buyer, literal_buyer, clause_buyer, assignment):
    """Priority groups (best first) for item j when prices are uniform."""
    by_item = {g: lit for lit, g in choice_item.items()}
    if j in by_item:
        lit = by_item[j]
        cb, lb = choice_buyer[abs(lit)], literal_buyer[lit]
        if assignment is not None and assignment[abs(lit) - 1] == (lit > 0):
            return [[lb], [cb]] + _rest(interested, {cb, lb})
        return [[cb], [lb]] + _rest(interested, {cb, lb})
    # clause-literal items rank their literal buyer above clause buyers
    clause_set = set(clause_buyer)
    first = [i for i in interested if i not in clause_set]
    second = [i for i in interested if i in clause_set]
    return [g for g in (first, second) if g] + _rest(interested, set(first) | set(second))


def _rest(interested, placed):
    left = [i for i in interested if i not in placed]
    return [left] if left else []


def induced_allocation(gadget, assignment):
    """The stable allocation implementing a truth assignment."""
    inst = gadget.instance
    entries = {}
    choice_pay = gadget.pricing.prices
    for v in range(1, inst.n_vars + 1):
        true_lit = v if assignment[v - 1] else -v
        false_lit = -true_lit
        cb = gadget.choice_buyer[v]
        # the choice buyer fills its budget on the FALSE literal's choice item
        g_false = gadget.choice_item[false_lit]
        entries[(cb, g_false)] = gadget.market.budgets[cb] / choice_pay[cb][g_false]
        entries[(gadget.literal_buyer[true_lit], gadget.choice_item[true_lit])] = F(1)
        lb = gadget.literal_buyer[false_lit]
        for j, _ in gadget.clause_literal_items[false_lit]:
            entries[(lb, j)] = F(1)
        entries[(lb, gadget.buffer_item[false_lit])] = F(1)
    for c_idx, clause in enumerate(inst.clauses):
        cb = gadget.clause_buyer[c_idx]
        for lit in clause:
            if (lit > 0) != assignment[abs(lit) - 1]:
                continue
            slot = next(j for j, c in gadget.clause_literal_items[lit] if c == c_idx and (cb, j) not in entries)
            entries[(cb, slot)] = gadget.market.budgets[cb] / choice_pay[cb][slot]
            break
    return Allocation.from_entries(gadget.market.n, gadget.market.m, entries)


def extract_assignment(gadget, allocation):
    """TRUE for literals whose literal buyer spends more than 6 on its choice
    item; ties (both spend 6) default to FALSE."""
    out = []
    prices = gadget.pricing.prices
    for v in range(1, gadget.instance.n_vars + 1):
        lb, g = gadget.literal_buyer[v], gadget.choice_item[v]
        out.append(prices[lb][g] * allocation.x[lb][g] > 6)
    return tuple(out)


@dataclass(frozen=True)
class SatMaxResult:
    revenue: Fraction
    opt: int  # brute-force MAX-SAT optimum
    assignment: Tuple[bool, ...]
    allocation: Allocation


def sat_gadget_max_revenue(gadget):
    """Best revenue over the stable allocations implementing each assignment.

    Each candidate is checked with ``is_stable``; the best must equal the
    gadget budgets plus the brute-force MAX-SAT optimum.
    """
    inst = gadget.instance
    if inst.n_vars > MAX_EXACT_VARIABLES:
        raise SizeCapExceeded(f"exact gadget optimum is capped at {MAX_EXACT_VARIABLES} variables")
    if gadget.variant == "forced":
        candidates = [gadget.forced]
    else:
        candidates = list(itertools.product((False, True), repeat=inst.n_vars))
    best = None
    for bits in candidates:
        alloc = induced_allocation(gadget, bits)
        if not is_stable(gadget.market, gadget.pricing, gadget.priorities, alloc).stable:
            raise InternalInconsistency(f"induced allocation for {bits} is not stable")
        r = revenue(gadget.market, gadget.pricing, alloc).total
        if best is None or r > best.revenue:
            best = SatMaxResult(r, 0, tuple(bits), alloc)
    opt = inst.satisfied(best.assignment) if gadget.variant == "forced" else max_sat(inst)[0]
    if best.revenue != gadget.gadget_budget + opt:
        raise InternalInconsistency(
            f"best induced revenue {best.revenue} differs from gadget budget {gadget.gadget_budget} + optimum {opt}")
    return SatMaxResult(best.revenue, opt, best.assignment, best.allocation)


def canonical_instance(instance):
    """Representative under variable renaming and sign flips."""
    n = instance.n_vars
    best = None
    for perm in itertools.permutations(range(1, n + 1)):
        for signs in itertools.product((1, -1), repeat=n):
            def image(lit):
                return perm[abs(lit) - 1] * signs[abs(lit) - 1] * (1 if lit > 0 else -1)
            clauses = tuple(sorted(tuple(sorted(image(l) for l in c)) for c in instance.clauses))
            if best is None or clauses < best:
                best = clauses
    return SatInstance(n, best)


def all_small_instances(max_vars=3, max_clauses=4):
    """Every 3SAT-3 instance with up to ``max_vars`` declared variables and
    ``max_clauses`` clauses, one per symmetry class.  Clauses use distinct
    variables."""
    seen = set()
    for n in range(1, max_vars + 1):
        lits = [s * v for v in range(1, n + 1) for s in (1, -1)]
        kinds = set()
        for size in (1, 2, 3):
            for combo in itertools.combinations(lits, size):
                if len({abs(l) for l in combo}) == size:
                    kinds.add(tuple(sorted(combo)))
        kinds = sorted(kinds)
        for k in range(max_clauses + 1):
            for clauses in itertools.combinations_with_replacement(kinds, k):
                counts = {}
                for c in clauses:
                    for lit in c:
                        counts[abs(lit)] = counts.get(abs(lit), 0) + 1
                if any(c > 3 for c in counts.values()):
                    continue
                inst = canonical_instance(SatInstance(n, clauses))
                key = (n, inst.clauses)
                if key not in seen:
                    seen.add(key)
                    yield inst
