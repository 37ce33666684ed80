"""Clause generators for graph constraints.

Every public encoder takes a :class:`GraphInstance` and returns an
:class:`EncodedFormula` whose clauses, conjoined with the base formula,
enforce one constraint on the decoded graph. Literal-level helpers
(``_acyclic_*``, ``_forward_reach`` ...) work on an arbitrary arc->literal map
so the reachability-by-acyclicity encoders can reuse them on primed arcs.
"""

from __future__ import annotations

import time
from typing import Mapping, Sequence, Union

from .formula import (
    Acyclic,
    Clause,
    Constraint,
    EncodedFormula,
    EReach,
    GraphInstance,
    NoReach,
    Reach,
    VarPool,
    effective_arcs,
)
from .graph import (
    HEURISTICS,
    Arc,
    DirectedGraph,
    EliminationOrdering,
    EliminationResult,
    eliminate,
)

OrderSpec = Union[str, EliminationOrdering, Sequence[int], None]

ACYCLIC_METHODS = ("ve", "tc", "tr")
REACH_METHODS = ("ve", "explicit", "via-acyclic:ve", "via-acyclic:tc", "via-acyclic:tr")
METHODS = ("ve", "tc", "tr", "explicit", "via-acyclic:ve", "via-acyclic:tc", "via-acyclic:tr")


class MethodError(ValueError):
    """Encoding method does not apply to the constraint."""


def resolve_ordering(graph: DirectedGraph, order: OrderSpec,
                     pinned_tail: Sequence[int] = ()) -> EliminationOrdering:
    """Turn a heuristic name or an explicit sequence into an ordering.

    Explicit orderings must already end with ``pinned_tail``.
    """
    if order is None:
        order = "mindegree"
    if isinstance(order, str):
        try:
            heuristic = HEURISTICS[order]
        except KeyError:
            raise ValueError(f"unknown ordering heuristic {order!r}") from None
        return heuristic(graph, pinned_tail)
    if not isinstance(order, EliminationOrdering):
        order = EliminationOrdering(order)
    if len(order) != graph.node_count:
        raise ValueError(f"ordering has {len(order)} nodes, graph has {graph.node_count}")
    k = len(pinned_tail)
    if k and tuple(order.order[-k:]) != tuple(pinned_tail):
        raise ValueError(f"ordering must end with {list(pinned_tail)}, got {list(order.order)}")
    return order


def _check_nodes(inst: GraphInstance, *nodes: int) -> None:
    for v in nodes:
        if not 1 <= v <= inst.graph.node_count:
            raise ValueError(f"node {v} is not in the graph (1..{inst.graph.node_count})")


def _finish(pool: VarPool, before: set[str], top0: int, clauses: list[Clause],
            stats: dict | None = None) -> EncodedFormula:
    aux = {f: m for f, m in pool.aux.items() if f not in before}
    st = {"aux_vars": pool.top - top0, "clauses": len(clauses)}
    st.update(stats or {})
    return EncodedFormula(clauses, pool.top, aux, st)


def _elim_stats(elim: EliminationResult) -> dict:
    return {
        "width": elim.width,
        "estar": len(elim.estar),
        "delta": len(elim.delta),
        "order": list(elim.ordering.order),
    }


# -- acyclicity on a literal map ---------------------------------------------

def _acyclic_tc(n: int, arcs: Sequence[Arc], lit: Mapping[Arc, int], pool: VarPool) -> list[Clause]:
    t = pool.block("tc", ((i, k) for i in range(1, n + 1) for k in range(1, n + 1)))
    out: list[Clause] = []
    for i, j in arcs:
        e = lit[(i, j)]
        if i == j:
            out.append((-e,))
            continue
        for k in range(1, n + 1):
            if k == j:
                # j reaches itself by the empty path
                out.append((-e, t[(i, j)]))
            else:
                out.append((-e, -t[(j, k)], t[(i, k)]))
        out.append((-e, -t[(j, i)]))
    return out


def _acyclic_tr(n: int, arcs: Sequence[Arc], lit: Mapping[Arc, int], pool: VarPool) -> list[Clause]:
    d = pool.block("depth", ((i, m) for i in range(1, n + 1) for m in range(n)))
    out: list[Clause] = [tuple(d[(i, m)] for m in range(n)) for i in range(1, n + 1)]
    for i, j in arcs:
        out.append((-lit[(i, j)], -d[(i, 0)]))
    for i in range(1, n + 1):
        for m in range(n - 1):
            out.append((-d[(i, m)], d[(i, m + 1)]))
    for i, j in arcs:
        for m in range(1, n):
            out.append((-d[(i, m)], -lit[(i, j)], d[(j, m - 1)]))
    out.extend((-lit[(i, i)],) for i, j in arcs if i == j)
    return out


def _acyclic_ve(elim: EliminationResult, arcs: Sequence[Arc], lit: Mapping[Arc, int],
                pool: VarPool) -> list[Clause]:
    ep = pool.block("eprime", sorted(elim.estar))
    out: list[Clause] = [(-lit[a], ep[a]) for a in arcs]
    for i, j in sorted(elim.estar):
        if i < j and (j, i) in ep:
            out.append((-ep[(i, j)], -ep[(j, i)]))
    for a, m, b in elim.delta:
        out.append((-ep[(a, m)], -ep[(m, b)], ep[(a, b)]))
    out.extend((-lit[(i, i)],) for i, j in arcs if i == j)
    return out


def _acyclic_clauses(method: str, graph: DirectedGraph, lit: Mapping[Arc, int], pool: VarPool,
                     order: OrderSpec) -> tuple[list[Clause], EliminationResult | None]:
    arcs = graph.sorted_arcs
    if method == "tc":
        return _acyclic_tc(graph.node_count, arcs, lit, pool), None
    if method == "tr":
        return _acyclic_tr(graph.node_count, arcs, lit, pool), None
    if method == "ve":
        elim = eliminate(graph, resolve_ordering(graph, order))
        return _acyclic_ve(elim, arcs, lit, pool), elim
    raise MethodError(f"unknown acyclicity method {method!r}")


# -- reachability building blocks --------------------------------------------

def _forward_reach(graph: DirectedGraph, lit: Mapping[Arc, int], s: int, pool: VarPool,
                   family: str = "reach_from") -> tuple[list[Clause], dict[tuple, int]]:
    """r[i] is forced true for every node enabled arcs lead to from ``s``."""
    r = pool.block(family, ((i,) for i in graph.nodes))
    out: list[Clause] = [(r[(s,)],)]
    for i, j in graph.sorted_arcs:
        out.append((-lit[(i, j)], -r[(i,)], r[(j,)]))
    return out, r


def _layered_reach(graph: DirectedGraph, lit: Mapping[Arc, int], t: int,
                   pool: VarPool) -> tuple[list[Clause], dict[tuple, int]]:
    """r[(i, n)] implies a path of length at most n from i to t."""
    n = graph.node_count
    r = pool.block("reach_n", ((i, m) for m in range(n) for i in graph.nodes))
    out: list[Clause] = [(r[(t, 0)],)]
    out.extend((-r[(i, 0)],) for i in graph.nodes if i != t)
    succ = graph.successors
    for m in range(1, n):
        for i in graph.nodes:
            outs = [j for j in succ[i] if j != i]
            head = (-r[(i, m)], r[(i, m - 1)])
            if len(outs) == 1:
                j = outs[0]
                out.append(head + (lit[(i, j)],))
                out.append(head + (r[(j, m - 1)],))
            else:
                steps = []
                for j in outs:
                    st = pool.new("step", (i, j, m))
                    out.append((-st, lit[(i, j)]))
                    out.append((-st, r[(j, m - 1)]))
                    steps.append(st)
                out.append(head + tuple(steps))
    return out, r


def _acyclic_support(graph: DirectedGraph, lit: Mapping[Arc, int], t: int,
                     pool: VarPool) -> tuple[list[Clause], dict[Arc, int], dict[tuple, int]]:
    """Sub-graph selector e' whose selected nodes all lead to t (needs acyclic e')."""
    ep = pool.block("eprime", graph.sorted_arcs)
    r = pool.block("reach", ((i,) for i in graph.nodes))
    out: list[Clause] = []
    for a in graph.sorted_arcs:
        out.append((-ep[a], lit[a]))
    for i, j in graph.sorted_arcs:
        out.append((-ep[(i, j)], r[(j,)]))
    succ = graph.successors
    for i in graph.nodes:
        if i != t:
            out.append((-r[(i,)],) + tuple(ep[(i, j)] for j in succ[i]))
    out.append((r[(t,)],))
    return out, ep, r


def _ve_paths(graph: DirectedGraph, lit: Mapping[Arc, int], elim: EliminationResult,
              pool: VarPool) -> tuple[list[Clause], dict[Arc, int]]:
    """e'[(i, j)] implies a real path i -> j, witnessed through triangle variables."""
    ep = pool.block("eprime", sorted(elim.estar))
    tri = pool.block("tri", elim.delta)
    out: list[Clause] = []
    mids = elim.triangles_by_arc
    for i, j in sorted(elim.estar):
        clause = [-ep[(i, j)]]
        if (i, j) in graph.arcs:
            clause.append(lit[(i, j)])
        clause.extend(tri[(i, k, j)] for k in mids.get((i, j), ()))
        out.append(tuple(clause))
    for i, k, j in elim.delta:
        x = tri[(i, k, j)]
        out.append((-x, ep[(i, k)]))
        out.append((-x, ep[(k, j)]))
    return out, ep


def _new_pool(inst: GraphInstance, pool: VarPool | None) -> VarPool:
    return VarPool(inst.base.var_count) if pool is None else pool


def _base_lits(inst: GraphInstance) -> dict[Arc, int]:
    return dict(inst.arc_var)


def _effective_graph(inst: GraphInstance, skip_into: int | None) -> DirectedGraph:
    if skip_into is None:
        return inst.graph
    _check_nodes(inst, skip_into)
    return DirectedGraph(inst.graph.node_count, effective_arcs(inst.graph, Acyclic(skip_into)))


# -- acyclicity ---------------------------------------------------------------

def _encode_acyclic(method: str, inst: GraphInstance, skip_into: int | None,
                    pool: VarPool | None, order: OrderSpec = None) -> EncodedFormula:
    pool = _new_pool(inst, pool)
    before, top0 = set(pool.aux), pool.top
    graph = _effective_graph(inst, skip_into)
    clauses, elim = _acyclic_clauses(method, graph, _base_lits(inst), pool, order)
    return _finish(pool, before, top0, clauses, _elim_stats(elim) if elim else None)


def encode_acyclicity_tc(inst: GraphInstance, *, skip_into: int | None = None,
                         pool: VarPool | None = None) -> EncodedFormula:
    """Transitive-closure acyclicity: one t variable per ordered node pair."""
    return _encode_acyclic("tc", inst, skip_into, pool)


def encode_acyclicity_tr(inst: GraphInstance, *, skip_into: int | None = None,
                         pool: VarPool | None = None) -> EncodedFormula:
    """Tree-reduction acyclicity: layered lower bounds on the longest path to a sink."""
    return _encode_acyclic("tr", inst, skip_into, pool)


def encode_acyclicity_ve(inst: GraphInstance, order: OrderSpec = None, *,
                         skip_into: int | None = None,
                         pool: VarPool | None = None) -> EncodedFormula:
    """Vertex-elimination acyclicity.

    One variable per arc of the elimination graph E*; clauses copy enabled
    arcs into E*, close E* under the recorded triangles and forbid every
    2-cycle of E*.
    """
    return _encode_acyclic("ve", inst, skip_into, pool, order)


# -- unreachability / reachability ---------------------------------------------

def encode_noreach(inst: GraphInstance, s: int, t: int, *,
                   pool: VarPool | None = None) -> EncodedFormula:
    _check_nodes(inst, s, t)
    pool = _new_pool(inst, pool)
    before, top0 = set(pool.aux), pool.top
    clauses, r = _forward_reach(inst.graph, _base_lits(inst), s, pool)
    clauses.append((-r[(t,)],))
    return _finish(pool, before, top0, clauses)


def _distinct(s: int, t: int) -> None:
    if s == t:
        raise ValueError("reachability encoders need distinct source and target")


def encode_reach_explicit(inst: GraphInstance, s: int, t: int, *,
                          pool: VarPool | None = None) -> EncodedFormula:
    _check_nodes(inst, s, t)
    _distinct(s, t)
    pool = _new_pool(inst, pool)
    before, top0 = set(pool.aux), pool.top
    clauses, r = _layered_reach(inst.graph, _base_lits(inst), t, pool)
    clauses.append((r[(s, inst.graph.node_count - 1)],))
    return _finish(pool, before, top0, clauses)


def encode_reach_via_acyclicity(inst: GraphInstance, s: int, t: int, acyc_method: str = "ve",
                                order: OrderSpec = None, *,
                                pool: VarPool | None = None) -> EncodedFormula:
    _check_nodes(inst, s, t)
    _distinct(s, t)
    pool = _new_pool(inst, pool)
    before, top0 = set(pool.aux), pool.top
    clauses, ep, r = _acyclic_support(inst.graph, _base_lits(inst), t, pool)
    clauses.append((r[(s,)],))
    support = {"aux_vars": pool.top - top0, "clauses": len(clauses)}
    acyc, elim = _acyclic_clauses(acyc_method, inst.graph, ep, pool, order)
    stats = {"parts": {"support": support,
                       "acyclic": {"aux_vars": pool.top - top0 - support["aux_vars"],
                                   "clauses": len(acyc)}}}
    if elim:
        stats.update(_elim_stats(elim))
    return _finish(pool, before, top0, clauses + acyc, stats)


def encode_reach_ve(inst: GraphInstance, s: int, t: int, order: OrderSpec = None, *,
                    pool: VarPool | None = None) -> EncodedFormula:
    """Reachability through E*; ``s`` and ``t`` must be eliminated last."""
    _check_nodes(inst, s, t)
    _distinct(s, t)
    graph = inst.graph
    if order is None or isinstance(order, str):
        ordering = resolve_ordering(graph, order, (s, t))
    else:
        ordering = resolve_ordering(graph, order)
        if set(ordering.order[-2:]) != {s, t}:
            raise ValueError(f"ordering must place {s} and {t} last, got {list(ordering.order)}")
    elim = eliminate(graph, ordering)
    pool = _new_pool(inst, pool)
    before, top0 = set(pool.aux), pool.top
    clauses, ep = _ve_paths(graph, _base_lits(inst), elim, pool)
    # without any s -> t path in the graph E* lacks (s, t): the constraint is false
    clauses.append((ep[(s, t)],) if (s, t) in ep else ())
    return _finish(pool, before, top0, clauses, _elim_stats(elim))


# -- eventual reachability --------------------------------------------------------

def encode_ereach_explicit(inst: GraphInstance, s: int, t: int, *,
                           pool: VarPool | None = None) -> EncodedFormula:
    _check_nodes(inst, s, t)
    pool = _new_pool(inst, pool)
    before, top0 = set(pool.aux), pool.top
    lits = _base_lits(inst)
    fwd, rs = _forward_reach(inst.graph, lits, s, pool)
    back, rt = _layered_reach(inst.graph, lits, t, pool)
    last = inst.graph.node_count - 1
    link = [(-rs[(i,)], rt[(i, last)]) for i in inst.graph.nodes]
    return _finish(pool, before, top0, fwd + back + link)


def encode_ereach_via_acyclicity(inst: GraphInstance, s: int, t: int, acyc_method: str = "ve",
                                 order: OrderSpec = None, *,
                                 pool: VarPool | None = None) -> EncodedFormula:
    _check_nodes(inst, s, t)
    pool = _new_pool(inst, pool)
    before, top0 = set(pool.aux), pool.top
    lits = _base_lits(inst)
    fwd, rs = _forward_reach(inst.graph, lits, s, pool)
    support, ep, rt = _acyclic_support(inst.graph, lits, t, pool)
    link = [(-rs[(i,)], rt[(i,)]) for i in inst.graph.nodes]
    acyc, elim = _acyclic_clauses(acyc_method, inst.graph, ep, pool, order)
    return _finish(pool, before, top0, fwd + support + link + acyc,
                   _elim_stats(elim) if elim else None)


def encode_ereach_ve(inst: GraphInstance, s: int, t: int, order: OrderSpec = None, *,
                     pool: VarPool | None = None) -> EncodedFormula:
    """Eventual reachability through E*; ``t`` must be eliminated last.

    Every node reachable from ``s`` other than ``t`` needs a usable E* arc to
    a node eliminated later, which bottoms out at ``t``.
    """
    _check_nodes(inst, s, t)
    graph = inst.graph
    if order is None or isinstance(order, str):
        ordering = resolve_ordering(graph, order, (t,))
    else:
        ordering = resolve_ordering(graph, order)
        if ordering.order[-1] != t:
            raise ValueError(f"ordering must place {t} last, got {list(ordering.order)}")
    elim = eliminate(graph, ordering)
    pool = _new_pool(inst, pool)
    before, top0 = set(pool.aux), pool.top
    lits = _base_lits(inst)
    fwd, rs = _forward_reach(graph, lits, s, pool)
    paths, ep = _ve_paths(graph, lits, elim, pool)
    pos = ordering.pos
    later: dict[int, list[int]] = {i: [] for i in graph.nodes}
    for i, j in sorted(elim.estar):
        if pos[i] < pos[j]:
            later[i].append(ep[(i, j)])
    forward = [(-rs[(i,)],) + tuple(later[i]) for i in graph.nodes if i != t]
    return _finish(pool, before, top0, fwd + paths + forward, _elim_stats(elim))


# -- whole instances --------------------------------------------------------------

def applicable_methods(constraint: Constraint) -> tuple[str, ...]:
    if isinstance(constraint, Acyclic):
        return ACYCLIC_METHODS
    if isinstance(constraint, NoReach):
        return METHODS
    return REACH_METHODS


def encode_constraint(inst: GraphInstance, constraint: Constraint, method: str,
                      order: OrderSpec = None, *, pool: VarPool | None = None) -> EncodedFormula:
    """Dispatch one constraint to the encoder named by ``method``.

    Unreachability has a single encoding and accepts any method name.
    """
    if method not in METHODS:
        raise MethodError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if method not in applicable_methods(constraint):
        raise MethodError(f"method {method!r} does not apply to {constraint.kind} constraints")
    if isinstance(constraint, Acyclic):
        return _encode_acyclic(method, inst, constraint.skip_into, pool, order)
    if isinstance(constraint, NoReach):
        return encode_noreach(inst, constraint.source, constraint.target, pool=pool)
    s, t = constraint.source, constraint.target
    via = method.split(":", 1)[1] if method.startswith("via-acyclic:") else None
    if isinstance(constraint, Reach):
        if method == "ve":
            return encode_reach_ve(inst, s, t, order, pool=pool)
        if method == "explicit":
            return encode_reach_explicit(inst, s, t, pool=pool)
        return encode_reach_via_acyclicity(inst, s, t, via, order, pool=pool)
    if isinstance(constraint, EReach):
        if method == "ve":
            return encode_ereach_ve(inst, s, t, order, pool=pool)
        if method == "explicit":
            return encode_ereach_explicit(inst, s, t, pool=pool)
        return encode_ereach_via_acyclicity(inst, s, t, via, order, pool=pool)
    raise MethodError(f"unsupported constraint {constraint!r}")


def encode_instance(inst: GraphInstance, method: str | Sequence[str] = "ve",
                    order: OrderSpec = "mindegree") -> EncodedFormula:
    """Encode every constraint of ``inst`` against one shared variable allocator.

    ``method`` is either one name for all constraints or one name per
    constraint. Auxiliary families are namespaced ``c<index>:<family>``.
    """
    methods = [method] * len(inst.constraints) if isinstance(method, str) else list(method)
    if len(methods) != len(inst.constraints):
        raise MethodError(f"{len(methods)} methods given for {len(inst.constraints)} constraints")
    start = time.perf_counter()
    pool = VarPool(inst.base.var_count)
    clauses: list[Clause] = []
    per_constraint = []
    for idx, (c, m) in enumerate(zip(inst.constraints, methods)):
        pool.prefix = f"c{idx}:"
        enc = encode_constraint(inst, c, m, order, pool=pool)
        clauses.extend(enc.added_clauses)
        per_constraint.append({"kind": c.kind, "method": m, **enc.stats})
    stats = {
        "aux_vars": pool.top - inst.base.var_count,
        "clauses": len(clauses),
        "constraints": per_constraint,
        "encode_ms": (time.perf_counter() - start) * 1000.0,
    }
    return EncodedFormula(clauses, pool.top, pool.aux, stats)
