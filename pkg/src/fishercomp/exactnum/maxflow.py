"""Edmonds-Karp maximum flow over exact capacities."""
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Tuple


@dataclass(frozen=True)
class FlowNetwork:
    """Directed network; ``capacity`` maps ``(u, v)`` to a non-negative Fraction.

    Missing pairs have capacity zero.  ``vertices`` fixes the iteration order
    used by breadth-first search, which makes every run reproducible.
    """

    vertices: Tuple[Hashable, ...]
    capacity: Dict[Tuple[Hashable, Hashable], Fraction]
    source: Hashable
    sink: Hashable

    def cap(self, u, v):
        return self.capacity.get((u, v), Fraction(0))

    def neighbours(self):
        """Adjacency in vertex order, including reverse edges for residuals."""
        order = {v: k for k, v in enumerate(self.vertices)}
        adj = {v: set() for v in self.vertices}
        for (u, v), c in self.capacity.items():
            adj[u].add(v)
            adj[v].add(u)
        return {v: sorted(ns, key=order.__getitem__) for v, ns in adj.items()}


@dataclass
class Flow:
    """Skew-symmetric flow: ``f(u, v) == -f(v, u)``."""

    network: FlowNetwork
    values: Dict[Tuple[Hashable, Hashable], Fraction] = field(default_factory=dict)

    def __call__(self, u, v):
        return self.values.get((u, v), Fraction(0))

    def push(self, u, v, amount):
        self.values[(u, v)] = self(u, v) + amount
        self.values[(v, u)] = self(v, u) - amount

    def residual(self, u, v):
        return self.network.cap(u, v) - self(u, v)

    @property
    def value(self):
        s = self.network.source
        return sum((self(s, v) for v in self.network.vertices if v != s), Fraction(0))

    def check(self):
        """Capacity and conservation, exactly.  Raises AssertionError."""
        net = self.network
        for (u, v), f in self.values.items():
            assert f == -self(v, u), f"skew symmetry broken on {(u, v)}"
            assert f <= net.cap(u, v), f"capacity exceeded on {(u, v)}"
        for w in net.vertices:
            if w in (net.source, net.sink):
                continue
            out = sum((self(w, v) for v in net.vertices), Fraction(0))
            assert out == 0, f"conservation broken at {w}"


def bfs_path(flow, adj=None):
    """Shortest augmenting s-t path in the residual graph, or None."""
    net = flow.network
    adj = adj or net.neighbours()
    parent = {net.source: None}
    queue = deque([net.source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in parent and flow.residual(u, v) > 0:
                parent[v] = u
                if v == net.sink:
                    path = [v]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return path[::-1]
                queue.append(v)
    return None


def residual_reachable(flow, adj=None):
    net = flow.network
    adj = adj or net.neighbours()
    seen = {net.source}
    queue = deque([net.source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen and flow.residual(u, v) > 0:
                seen.add(v)
                queue.append(v)
    return seen


def augment(flow, path):
    amount = min(flow.residual(u, v) for u, v in zip(path, path[1:]))
    for u, v in zip(path, path[1:]):
        flow.push(u, v, amount)
    return amount


def max_flow(network: FlowNetwork, start: Flow = None) -> Flow:
    """Edmonds-Karp, optionally warm-started from a feasible flow."""
    flow = Flow(network, dict(start.values)) if start is not None else Flow(network)
    adj = network.neighbours()
    while True:
        path = bfs_path(flow, adj)
        if path is None:
            return flow
        augment(flow, path)


def cut_capacity(network: FlowNetwork, source_side) -> Fraction:
    source_side = set(source_side)
    return sum(
        (c for (u, v), c in network.capacity.items() if u in source_side and v not in source_side),
        Fraction(0),
    )
