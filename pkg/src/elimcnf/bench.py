"""Instance generators: Hamiltonian cycles on grids and random constrained digraphs."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations

from .formula import Acyclic, Cnf, CONSTRAINT_TYPES, GraphInstance
from .graph import DirectedGraph


@dataclass(frozen=True)
class GridSpec:
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows < 2 or self.cols < 2:
            raise ValueError(f"grid needs at least 2 rows and 2 columns, got {self.rows}x{self.cols}")

    def node(self, r: int, c: int) -> int:
        return r * self.cols + c + 1


def gen_grid_hc(spec: GridSpec | tuple[int, int]) -> GraphInstance:
    """Directed Hamiltonian cycle on a grid.

    Cells are numbered row-major from 1. Every node gets exactly one enabled
    outgoing and one enabled incoming arc. Corner cell 1 is the anchor: the
    cycle leaves it to the right and re-enters it from below (the reverse
    arcs are left out of the graph), and acyclicity is required after
    dropping arcs into the anchor, so the enabled arcs form one cycle.
    """
    if not isinstance(spec, GridSpec):
        spec = GridSpec(*spec)
    anchor = spec.node(0, 0)
    right, below = spec.node(0, 1), spec.node(1, 0)
    omitted = {(anchor, below), (right, anchor)}
    arcs = []
    for r in range(spec.rows):
        for c in range(spec.cols):
            u = spec.node(r, c)
            for dr, dc in ((0, 1), (1, 0)):
                if r + dr < spec.rows and c + dc < spec.cols:
                    v = spec.node(r + dr, c + dc)
                    arcs.extend(a for a in ((u, v), (v, u)) if a not in omitted)
    arcs.sort()
    arc_var = {a: k for k, a in enumerate(arcs, 1)}
    graph = DirectedGraph(spec.rows * spec.cols, arcs)
    clauses: list[tuple[int, ...]] = []
    for groups in (graph.successors, graph.predecessors):
        for v in graph.nodes:
            if groups is graph.successors:
                xs = [arc_var[(v, w)] for w in groups[v]]
            else:
                xs = [arc_var[(w, v)] for w in groups[v]]
            clauses.append(tuple(xs))
            clauses.extend((-a, -b) for a, b in combinations(xs, 2))
    clauses.append((arc_var[(anchor, right)],))
    clauses.append((arc_var[(below, anchor)],))
    return GraphInstance(Cnf(len(arcs), clauses), graph, arc_var, [Acyclic(skip_into=anchor)])


def gen_random(n: int, m: int, kind: str, seed: int) -> GraphInstance:
    """``m`` distinct non-loop arcs on ``n`` nodes, each with its own free variable."""
    if kind not in CONSTRAINT_TYPES:
        raise ValueError(f"unknown constraint kind {kind!r}")
    if n < 1:
        raise ValueError("need at least one node")
    if not 0 <= m <= n * (n - 1):
        raise ValueError(f"arc count {m} outside 0..{n * (n - 1)}")
    rng = random.Random(seed)
    pairs = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if u != v]
    arcs = sorted(rng.sample(pairs, m))
    arc_var = {a: k for k, a in enumerate(arcs, 1)}
    if kind == "acyclic":
        constraint = Acyclic()
    else:
        if n < 2:
            raise ValueError(f"{kind} needs two distinct nodes")
        s, t = rng.sample(range(1, n + 1), 2)
        constraint = CONSTRAINT_TYPES[kind](s, t)
    return GraphInstance(Cnf(m), DirectedGraph(n, arcs), arc_var, [constraint])


def free_instance(graph: DirectedGraph, constraints=()) -> GraphInstance:
    """Empty base formula, one variable per arc in sorted order."""
    arc_var = {a: k for k, a in enumerate(graph.sorted_arcs, 1)}
    return GraphInstance(Cnf(len(arc_var)), graph, arc_var, constraints)
