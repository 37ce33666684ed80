"""Directed graphs, vertex elimination and greedy elimination orderings."""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

Arc = tuple[int, int]


@dataclass(frozen=True)
class DirectedGraph:
    """Graph on nodes ``1..node_count``. Self-loops are allowed, parallel arcs are not."""

    node_count: int
    arcs: frozenset[Arc] = field(default_factory=frozenset)

    def __init__(self, node_count: int, arcs: Iterable[Arc] = ()):
        if node_count < 0:
            raise ValueError(f"node_count must be nonnegative, got {node_count}")
        arc_list = [(int(u), int(v)) for u, v in arcs]
        arc_set = frozenset(arc_list)
        if len(arc_set) != len(arc_list):
            raise ValueError("parallel arcs are not allowed")
        for u, v in arc_set:
            if not (1 <= u <= node_count and 1 <= v <= node_count):
                raise ValueError(f"arc ({u}, {v}) has an endpoint outside 1..{node_count}")
        object.__setattr__(self, "node_count", int(node_count))
        object.__setattr__(self, "arcs", arc_set)

    @property
    def nodes(self) -> range:
        return range(1, self.node_count + 1)

    @cached_property
    def sorted_arcs(self) -> tuple[Arc, ...]:
        return tuple(sorted(self.arcs))

    @cached_property
    def successors(self) -> dict[int, tuple[int, ...]]:
        succ: dict[int, list[int]] = {v: [] for v in self.nodes}
        for u, v in self.sorted_arcs:
            succ[u].append(v)
        return {v: tuple(s) for v, s in succ.items()}

    @cached_property
    def predecessors(self) -> dict[int, tuple[int, ...]]:
        pred: dict[int, list[int]] = {v: [] for v in self.nodes}
        for u, v in self.sorted_arcs:
            pred[v].append(u)
        return {v: tuple(p) for v, p in pred.items()}

    def __len__(self) -> int:
        return len(self.arcs)

    def __contains__(self, arc: object) -> bool:
        return arc in self.arcs


@dataclass(frozen=True)
class EliminationOrdering:
    """A permutation of ``1..n``; ``order[0]`` is eliminated first."""

    order: tuple[int, ...]

    def __init__(self, order: Iterable[int]):
        order = tuple(int(v) for v in order)
        if sorted(order) != list(range(1, len(order) + 1)):
            raise ValueError(f"ordering is not a permutation of 1..{len(order)}: {order}")
        object.__setattr__(self, "order", order)

    @cached_property
    def pos(self) -> dict[int, int]:
        """Node -> 1-based elimination position."""
        return {v: i + 1 for i, v in enumerate(self.order)}

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)


@dataclass(frozen=True)
class EliminationResult:
    ordering: EliminationOrdering
    estar: frozenset[Arc]
    delta: tuple[tuple[int, int, int], ...]
    width: int
    fill_per_step: tuple[int, ...]

    @cached_property
    def triangles_by_arc(self) -> dict[Arc, tuple[int, ...]]:
        """Map an arc ``(a, b)`` of E* to the middle vertices ``m`` with ``(a, m, b)`` in delta."""
        out: dict[Arc, list[int]] = {}
        for a, m, b in self.delta:
            out.setdefault((a, b), []).append(m)
        return {k: tuple(v) for k, v in out.items()}


def _check_ordering(g: DirectedGraph, o: EliminationOrdering) -> None:
    if len(o) != g.node_count:
        raise ValueError(
            f"ordering has {len(o)} nodes but the graph has {g.node_count}"
        )


def eliminate(g: DirectedGraph, o: EliminationOrdering | Sequence[int]) -> EliminationResult:
    """Eliminate the vertices of ``g`` in order, recording E*, triangles and width.

    Eliminating ``m`` connects every in-neighbour ``a`` to every out-neighbour
    ``b`` with ``a != b``. A triangle ``(a, m, b)`` is recorded for each such
    pair even when ``(a, b)`` is already present. The width is the largest
    out-degree (self-loop excluded) of a vertex at the moment it is removed.
    """
    if not isinstance(o, EliminationOrdering):
        o = EliminationOrdering(o)
    _check_ordering(g, o)
    succ = {v: set(s) for v, s in g.successors.items()}
    pred = {v: set(p) for v, p in g.predecessors.items()}
    estar = set(g.arcs)
    delta: list[tuple[int, int, int]] = []
    fills: list[int] = []
    width = 0
    for m in o.order:
        ins = sorted(pred[m] - {m})
        outs = sorted(succ[m] - {m})
        width = max(width, len(outs))
        added = 0
        for a in ins:
            for b in outs:
                if a == b:
                    continue
                delta.append((a, m, b))
                if b not in succ[a]:
                    succ[a].add(b)
                    pred[b].add(a)
                    estar.add((a, b))
                    added += 1
        for a in ins:
            succ[a].discard(m)
        for b in outs:
            pred[b].discard(m)
        del succ[m], pred[m]
        fills.append(added)
    return EliminationResult(o, frozenset(estar), tuple(delta), width, tuple(fills))


def _fill_count(m: int, succ: dict[int, set[int]], pred: dict[int, set[int]]) -> int:
    outs = succ[m] - {m}
    count = 0
    for a in pred[m]:
        if a == m:
            continue
        sa = succ[a]
        for b in outs:
            if b != a and b not in sa:
                count += 1
    return count


def _degree(m: int, succ: dict[int, set[int]], pred: dict[int, set[int]]) -> int:
    # a self-loop sits in both sets and so counts twice
    return len(succ[m]) + len(pred[m])


def _greedy_order(g: DirectedGraph, pinned_tail: Sequence[int], score) -> EliminationOrdering:
    pinned = [int(v) for v in pinned_tail]
    if len(set(pinned)) != len(pinned):
        raise ValueError(f"pinned nodes are not distinct: {pinned}")
    for v in pinned:
        if not 1 <= v <= g.node_count:
            raise ValueError(f"pinned node {v} is not in the graph")
    pinned_set = set(pinned)
    succ = {v: set(s) for v, s in g.successors.items()}
    pred = {v: set(p) for v, p in g.predecessors.items()}
    current = {v: score(v, succ, pred) for v in g.nodes if v not in pinned_set}
    heap = [(s, v) for v, s in current.items()]
    heapq.heapify(heap)
    order: list[int] = []
    while heap:
        s, m = heapq.heappop(heap)
        if current.get(m) != s:
            continue
        del current[m]
        order.append(m)
        ins = pred[m] - {m}
        outs = succ[m] - {m}
        dirty = set(ins) | set(outs)
        for a in ins:
            for b in outs:
                if a != b and b not in succ[a]:
                    succ[a].add(b)
                    pred[b].add(a)
                    # a new arc changes the fill of every vertex sitting between a and b
                    dirty.update(succ[a] & pred[b])
        for a in ins:
            succ[a].discard(m)
        for b in outs:
            pred[b].discard(m)
        del succ[m], pred[m]
        for v in dirty:
            if v in current:
                new = score(v, succ, pred)
                if new != current[v]:
                    current[v] = new
                    heapq.heappush(heap, (new, v))
    return EliminationOrdering(order + pinned)


def order_min_degree(g: DirectedGraph, pinned_tail: Sequence[int] = ()) -> EliminationOrdering:
    """Greedy minimum (in + out) degree ordering, ties to the lowest id.

    ``pinned_tail`` nodes are kept out of the greedy phase and placed last,
    in the given order.
    """
    return _greedy_order(g, pinned_tail, _degree)


def order_min_fill(g: DirectedGraph, pinned_tail: Sequence[int] = ()) -> EliminationOrdering:
    """Greedy minimum fill-in ordering, ties to the lowest id."""
    return _greedy_order(g, pinned_tail, _fill_count)


HEURISTICS = {
    "mindegree": order_min_degree,
    "minfill": order_min_fill,
}


def transitive_closure(g: DirectedGraph) -> DirectedGraph:
    """Arcs ``(u, v)`` for every nonempty path from ``u`` to ``v``."""
    succ = g.successors
    arcs = []
    for u in g.nodes:
        seen: set[int] = set()
        queue = deque(succ[u])
        while queue:
            v = queue.popleft()
            if v in seen:
                continue
            seen.add(v)
            queue.extend(succ[v])
        arcs.extend((u, v) for v in seen)
    return DirectedGraph(g.node_count, arcs)


def cycle_graph(n: int) -> DirectedGraph:
    """Simple directed cycle ``1 -> 2 -> ... -> n -> 1``."""
    return DirectedGraph(n, [(i, i % n + 1) for i in range(1, n + 1)])
