"""Bipartite graphs as unit markets.

Buyers are the left vertices, items the right vertices; every price and
budget is 1 and a buyer values an item (at 1) iff they share an edge.
Integral stable allocations are then exactly the maximal matchings, and the
least revenue of a stable allocation is the size of a minimum maximal
matching.
"""
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from ..errors import NotBipartite, ParseError
from ..market.model import Market, PricingProfile, natural_priority

F = Fraction


@dataclass(frozen=True)
class BipartiteGraph:
    left: Tuple[str, ...]
    right: Tuple[str, ...]
    edges: Tuple[Tuple[int, int], ...]  # (left index, right index)

    def __post_init__(self):
        if set(self.left) & set(self.right):
            raise NotBipartite(f"vertices on both sides: {sorted(set(self.left) & set(self.right))}")
        if len(set(self.left)) != len(self.left) or len(set(self.right)) != len(self.right):
            raise NotBipartite("duplicate vertex names")
        for a, b in self.edges:
            if not (0 <= a < len(self.left) and 0 <= b < len(self.right)):
                raise NotBipartite(f"edge {(a, b)} refers to a missing vertex")
        if len(set(self.edges)) != len(self.edges):
            raise NotBipartite("repeated edge")

    @classmethod
    def from_pairs(cls, pairs, left=(), right=()):
        """Edges given as (left name, right name); extra isolated vertices may
        be listed in ``left`` / ``right``."""
        L, R = list(left), list(right)
        for a, b in pairs:
            if a not in L:
                L.append(a)
            if b not in R:
                R.append(b)
        edges = tuple(sorted({(L.index(a), R.index(b)) for a, b in pairs}))
        return cls(tuple(L), tuple(R), edges)

    @classmethod
    def from_matrix(cls, rows):
        """0/1 adjacency rows, left vertices i1.., right vertices j1.."""
        n = len(rows)
        m = len(rows[0]) if rows else 0
        edges = tuple((i, j) for i in range(n) for j in range(m) if rows[i][j])
        return cls(tuple(f"i{i + 1}" for i in range(n)), tuple(f"j{j + 1}" for j in range(m)), edges)


def parse_edge_list(text):
    """One edge per line as ``left right``; ``#`` starts a comment."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected two vertex names")
        pairs.append((parts[0], parts[1]))
    return BipartiteGraph.from_pairs(pairs)


def is_matching(edges):
    lefts = [a for a, _ in edges]
    rights = [b for _, b in edges]
    return len(set(lefts)) == len(lefts) and len(set(rights)) == len(rights)


def is_maximal_matching(graph, edges):
    if not is_matching(edges):
        return False
    used_l = {a for a, _ in edges}
    used_r = {b for _, b in edges}
    return all(a in used_l or b in used_r for a, b in graph.edges)


def min_maximal_matching(graph):
    """Smallest maximal matching, by trying edge subsets in order of size."""
    for size in range(len(graph.edges) + 1):
        for subset in itertools.combinations(graph.edges, size):
            if is_maximal_matching(graph, subset):
                return size
    raise AssertionError("the full edge set always contains a maximal matching")


def max_matching(graph):
    for size in range(min(len(graph.left), len(graph.right)), -1, -1):
        for subset in itertools.combinations(graph.edges, size):
            if is_matching(subset):
                return size
    return 0


def maximal_matchings(graph):
    for size in range(len(graph.edges) + 1):
        for subset in itertools.combinations(graph.edges, size):
            if is_maximal_matching(graph, subset):
                yield subset


@dataclass(frozen=True)
class MatchingGadget:
    graph: BipartiteGraph
    market: Market
    pricing: PricingProfile
    priorities: object
    item_vertex: Tuple[int, ...]  # right-vertex index of each market item


def matching_gadget_build(graph):
    """Unit market of the graph.  Right vertices without edges are left out
    (nobody would value them)."""
    covered = sorted({b for _, b in graph.edges})
    col = {b: j for j, b in enumerate(covered)}
    val = [[F(0)] * len(covered) for _ in graph.left]
    for a, b in graph.edges:
        val[a][col[b]] = F(1)
    market = Market.build([1] * len(graph.left), val, buyers=graph.left,
                          items=[graph.right[b] for b in covered])
    pricing = PricingProfile.uniform([1] * len(covered), len(graph.left))
    return MatchingGadget(graph, market, pricing, natural_priority(market, pricing), tuple(covered))


def allocation_of_matching(gadget, edges):
    from ..market.model import Allocation
    col = {b: j for j, b in enumerate(gadget.item_vertex)}
    return Allocation.from_entries(gadget.market.n, gadget.market.m, {(a, col[b]): F(1) for a, b in edges})


def matching_gadget_seller_variant(graph, selected):
    """The unit market plus a sentinel item every buyer values at |I| and
    pays 2|I| for.  Items of the right vertices in ``selected`` (names)
    belong to seller 0, the rest and the sentinel to seller 1."""
    base = matching_gadget_build(graph)
    selected = set(selected)
    unknown = selected - set(graph.right)
    if unknown:
        raise NotBipartite(f"unknown right vertices {sorted(unknown)}")
    n = len(graph.left)
    if n == 0:
        raise NotBipartite("the sentinel needs at least one buyer")
    val = [list(row) + [F(n)] for row in base.market.valuations]
    owners = [0 if graph.right[b] in selected else 1 for b in base.item_vertex] + [1]
    market = Market.build([1] * n, val, owners=owners, buyers=graph.left,
                          items=list(base.market.items) + ["j0"], sellers=("selected", "rest"))
    pricing = PricingProfile.uniform([1] * base.market.m + [2 * n], n)
    return market, pricing, natural_priority(market, pricing)


def canonical_graph(n_left, n_right, rows):
    """Canonical 0/1 matrix under row and column permutations."""
    best = None
    for perm in itertools.permutations(range(n_right)):
        key = tuple(sorted(tuple(r[c] for c in perm) for r in rows))
        if best is None or key < best:
            best = key
    return best


def all_small_graphs(max_left=4, max_right=4):
    """Every bipartite graph with at most ``max_left`` + ``max_right``
    vertices, one per isomorphism class that fixes the sides, with no
    isolated right vertex (those never affect matchings)."""
    seen = set()
    for a in range(max_left + 1):
        for b in range(max_right + 1):
            patterns = list(itertools.product((0, 1), repeat=b))
            for rows in itertools.combinations_with_replacement(patterns, a):
                if b and any(all(r[c] == 0 for r in rows) for c in range(b)):
                    continue
                key = (a, b, canonical_graph(a, b, rows))
                if key in seen:
                    continue
                seen.add(key)
                yield BipartiteGraph.from_matrix([list(r) for r in key[2]])
