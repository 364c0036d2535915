from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import cached_property

KINDS = ("grid", "uniform", "random")


@dataclass(frozen=True)
class Topology:
    """Node positions in metres; node ``i`` (1-based) sits at ``positions[i-1]``.

    Two nodes are in range when their distance is strictly below ``radius``.
    """

    kind: str
    positions: tuple
    radius: float
    field: float

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def node_ids(self) -> range:
        return range(1, self.n + 1)

    def position(self, node_id: int) -> tuple:
        return self.positions[node_id - 1]

    def distance(self, a: int, b: int) -> float:
        (xa, ya), (xb, yb) = self.position(a), self.position(b)
        return math.hypot(xa - xb, ya - yb)

    def in_range(self, a: int, b: int) -> bool:
        return a != b and self.distance(a, b) < self.radius

    @cached_property
    def adjacency(self) -> dict:
        adj = {i: [] for i in self.node_ids}
        for a in self.node_ids:
            for b in range(a + 1, self.n + 1):
                if self.in_range(a, b):
                    adj[a].append(b)
                    adj[b].append(a)
        return {i: tuple(sorted(v)) for i, v in adj.items()}

    def in_range_pairs(self) -> list:
        return [(a, b) for a in self.node_ids for b in self.adjacency[a] if a < b]

    def degree_stats(self) -> tuple:
        degs = [len(v) for v in self.adjacency.values()]
        return min(degs), max(degs), sum(degs) / len(degs)


def build_topology(
    kind: str,
    n: int,
    field: float = 750.0,
    spacing: float = 25.0,
    radius: float = 50.0,
    seed=0,
) -> Topology:
    """Lay out ``n`` nodes.

    grid     sqrt(n) x sqrt(n) lattice points ``spacing`` apart, sidelines included
    uniform  one node at a random spot inside each cell of a sqrt(n) x sqrt(n)
             partition of the field
    random   i.i.d. uniform positions in the field
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    rng = random.Random(f"topology|{kind}|{n}|{seed}")
    side = math.isqrt(n)
    if kind == "grid":
        if side * side != n:
            raise ValueError(f"grid layout needs a square node count, got {n}")
        pos = [(c * spacing, r * spacing) for r in range(side) for c in range(side)]
        field = spacing * (side - 1)
    elif kind == "uniform":
        if side * side != n:
            raise ValueError(f"uniform layout needs a square node count, got {n}")
        cell = field / side
        pos = [
            ((c + rng.random()) * cell, (r + rng.random()) * cell) for r in range(side) for c in range(side)
        ]
    else:
        pos = [(rng.random() * field, rng.random() * field) for _ in range(n)]
    return Topology(kind, tuple(pos), float(radius), float(field))


def line_topology(xs, radius: float = 50.0) -> Topology:
    """Nodes on the x axis; handy for hand-built scenarios."""
    pos = tuple((float(x), 0.0) for x in xs)
    return Topology("line", pos, float(radius), float(max(xs) - min(xs)))
