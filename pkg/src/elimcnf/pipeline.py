"""Encode, solve and verify in one call; also the elimination profile used in stats."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

from .encoders import OrderSpec, encode_instance, resolve_ordering
from .formula import Acyclic, EncodedFormula, EReach, GraphInstance, Reach, effective_arcs
from .graph import DirectedGraph, EliminationOrdering, EliminationResult, eliminate
from .oracle import VerificationReport, verify
from .solver import SAT, SolveResult, solve, solve_external


@dataclass
class RunStats:
    nodes: int
    arcs: int
    constraint_kinds: list[str]
    order_heuristic: str
    width: int
    estar: int
    delta: int
    aux_vars: int | None = None
    added_clauses: int | None = None
    encode_ms: float | None = None
    solver_status: str | None = None
    solver_ms: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def elimination_profile(inst: GraphInstance, order: OrderSpec = "mindegree") -> EliminationResult:
    """Elimination of the graph the first constraint acts on.

    Reachability constraints pin their endpoints last, as the ``ve``
    encoders do; an acyclicity constraint with ``skip_into`` drops the arcs
    entering that node first.
    """
    graph = inst.graph
    pins: tuple[int, ...] = ()
    if inst.constraints:
        c = inst.constraints[0]
        if isinstance(c, Acyclic):
            graph = DirectedGraph(graph.node_count, effective_arcs(graph, c))
        elif isinstance(c, Reach):
            pins = (c.source, c.target)
        elif isinstance(c, EReach):
            pins = (c.target,)
    if isinstance(order, str) or order is None:
        ordering = resolve_ordering(graph, order, pins)
    else:
        ordering = order if isinstance(order, EliminationOrdering) else EliminationOrdering(order)
    return eliminate(graph, ordering)


def order_name(order: OrderSpec) -> str:
    if order is None:
        return "mindegree"
    return order if isinstance(order, str) else "given"


def run_stats(inst: GraphInstance, order: OrderSpec = "mindegree",
              encoded: EncodedFormula | None = None) -> RunStats:
    elim = elimination_profile(inst, order)
    stats = RunStats(
        nodes=inst.graph.node_count,
        arcs=len(inst.graph),
        constraint_kinds=[c.kind for c in inst.constraints],
        order_heuristic=order_name(order),
        width=elim.width,
        estar=len(elim.estar),
        delta=len(elim.delta),
    )
    if encoded is not None:
        stats.aux_vars = encoded.new_var_count - inst.base.var_count
        stats.added_clauses = len(encoded.added_clauses)
        stats.encode_ms = encoded.stats.get("encode_ms")
    return stats


@dataclass
class SolveOutcome:
    encoded: EncodedFormula
    result: SolveResult
    report: VerificationReport | None
    stats: RunStats


def solve_instance(inst: GraphInstance, method="ve", order: OrderSpec = "mindegree",
                   solver: str = "internal", seed: int = 0,
                   conflict_budget: int | None = None) -> SolveOutcome:
    """Encode all constraints, solve, and verify a SAT model against the oracle.

    ``solver`` is ``"internal"`` or ``"cmd:<template>"`` with ``{cnf}`` in
    the template.
    """
    encoded = encode_instance(inst, method, order)
    cnf = encoded.to_cnf(inst.base)
    start = time.perf_counter()
    if solver == "internal":
        result = solve(cnf, seed=seed, conflict_budget=conflict_budget)
    elif solver.startswith("cmd:"):
        result = solve_external(cnf, solver[4:])
    else:
        raise ValueError(f"solver must be 'internal' or 'cmd:<template>', got {solver!r}")
    elapsed = (time.perf_counter() - start) * 1000.0
    report = verify(inst, result.model) if result.status == SAT else None
    stats = run_stats(inst, order, encoded)
    stats.solver_status = result.status
    stats.solver_ms = elapsed
    return SolveOutcome(encoded, result, report, stats)
