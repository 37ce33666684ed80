"""Input checks shared by the estimator and the command line."""

from __future__ import annotations

from os import PathLike
from pathlib import Path
from typing import Sequence

from .encoders import METHODS, MethodError, applicable_methods
from .formula import GraphInstance, parse_gcnf
from .graph import HEURISTICS, DirectedGraph, EliminationOrdering


def check_instance(X) -> GraphInstance:
    """Accept a GraphInstance, GCNF text/bytes, or a path to a GCNF file."""
    if isinstance(X, GraphInstance):
        return X
    if isinstance(X, (str, bytes)) and (isinstance(X, bytes) or "\n" in X or X.startswith("p ")):
        return parse_gcnf(X)
    if isinstance(X, (str, PathLike)):
        return parse_gcnf(Path(X).read_bytes())
    raise TypeError(f"expected a GraphInstance, GCNF text or a path, got {type(X).__name__}")


def check_order_spec(order):
    """Heuristic name, an EliminationOrdering, or a node sequence."""
    if isinstance(order, str):
        if order not in HEURISTICS:
            raise ValueError(f"unknown ordering heuristic {order!r}; choose from {sorted(HEURISTICS)}")
        return order
    if isinstance(order, EliminationOrdering):
        return order
    if isinstance(order, Sequence):
        return EliminationOrdering(order)
    raise TypeError(f"cannot interpret {order!r} as an ordering")


def check_ordering(order, graph: DirectedGraph) -> EliminationOrdering:
    order = check_order_spec(order)
    if isinstance(order, str):
        raise TypeError("an explicit ordering is required here")
    if len(order) != graph.node_count:
        raise ValueError(f"ordering covers {len(order)} nodes, graph has {graph.node_count}")
    return order


def check_methods(method, inst: GraphInstance) -> list[str]:
    """One method per constraint, each applicable to its constraint."""
    methods = [method] * len(inst.constraints) if isinstance(method, str) else list(method)
    if len(methods) != len(inst.constraints):
        raise MethodError(f"{len(methods)} methods for {len(inst.constraints)} constraints")
    for m, c in zip(methods, inst.constraints):
        if m not in METHODS:
            raise MethodError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
        if m not in applicable_methods(c):
            raise MethodError(f"method {m!r} does not apply to {c.kind} constraints")
    return methods


def read_ordering_file(path) -> EliminationOrdering:
    """One node id per line, first-eliminated first; blank and ``c`` lines ignored."""
    nodes = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("c"):
            nodes.append(int(line))
    return EliminationOrdering(nodes)
