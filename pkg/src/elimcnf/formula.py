"""CNF containers, graph-annotated instances and their text formats.

GCNF is line oriented::

    c comment
    p gcnf <var_count> <clause_count> <node_count>
    g a <u> <v> <var>
    g c acyclic [<v>]
    g c reach <s> <t>
    g c noreach <s> <t>
    g c ereach <s> <t>
    1 -2 0

``g c acyclic <v>`` asks for acyclicity after dropping every arc that enters
node ``v``. Clause lines follow DIMACS and may span several lines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Union

from .graph import Arc, DirectedGraph

Clause = tuple[int, ...]


class FormatError(ValueError):
    """Malformed input; ``lineno`` is 1-based when known."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


@dataclass(frozen=True)
class Cnf:
    var_count: int
    clauses: tuple[Clause, ...] = ()

    def __init__(self, var_count: int, clauses: Iterable[Iterable[int]] = ()):
        clauses = tuple(tuple(int(l) for l in c) for c in clauses)
        for c in clauses:
            for lit in c:
                if lit == 0:
                    raise ValueError("clause contains literal 0")
                if abs(lit) > var_count:
                    raise ValueError(f"literal {lit} exceeds var_count {var_count}")
        object.__setattr__(self, "var_count", int(var_count))
        object.__setattr__(self, "clauses", clauses)


@dataclass(frozen=True)
class Acyclic:
    """Acyclicity of the decoded graph, ignoring arcs into ``skip_into`` when set."""

    skip_into: int | None = None
    kind = "acyclic"

    @property
    def endpoints(self) -> tuple[int, ...]:
        return () if self.skip_into is None else (self.skip_into,)


@dataclass(frozen=True)
class Reach:
    source: int
    target: int
    kind = "reach"

    @property
    def endpoints(self) -> tuple[int, ...]:
        return (self.source, self.target)


@dataclass(frozen=True)
class NoReach:
    source: int
    target: int
    kind = "noreach"

    @property
    def endpoints(self) -> tuple[int, ...]:
        return (self.source, self.target)


@dataclass(frozen=True)
class EReach:
    """Every node reachable from ``source`` reaches ``target``."""

    source: int
    target: int
    kind = "ereach"

    @property
    def endpoints(self) -> tuple[int, ...]:
        return (self.source, self.target)


Constraint = Union[Acyclic, Reach, NoReach, EReach]
CONSTRAINT_TYPES = {c.kind: c for c in (Acyclic, Reach, NoReach, EReach)}


def effective_arcs(graph: DirectedGraph, constraint: Constraint) -> list[Arc]:
    """Arcs the constraint talks about, sorted."""
    if isinstance(constraint, Acyclic) and constraint.skip_into is not None:
        return [a for a in graph.sorted_arcs if a[1] != constraint.skip_into]
    return list(graph.sorted_arcs)


@dataclass(frozen=True)
class GraphInstance:
    """A base CNF whose variables name the arcs of ``graph``."""

    base: Cnf
    graph: DirectedGraph
    arc_var: dict[Arc, int]
    constraints: tuple[Constraint, ...] = ()

    def __init__(self, base: Cnf, graph: DirectedGraph, arc_var: dict[Arc, int],
                 constraints: Iterable[Constraint] = ()):
        arc_var = {(int(u), int(v)): int(x) for (u, v), x in arc_var.items()}
        if set(arc_var) != set(graph.arcs):
            raise ValueError("arc_var keys must be exactly the graph arcs")
        for arc, x in arc_var.items():
            if not 1 <= x <= base.var_count:
                raise ValueError(f"arc {arc} uses variable {x} outside 1..{base.var_count}")
        constraints = tuple(constraints)
        for c in constraints:
            for v in c.endpoints:
                if not 1 <= v <= graph.node_count:
                    raise ValueError(f"constraint {c} names node {v} outside the graph")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "arc_var", arc_var)
        object.__setattr__(self, "constraints", constraints)

    def __hash__(self):
        return hash((self.base, self.graph, tuple(sorted(self.arc_var.items())), self.constraints))


class VarPool:
    """Allocates fresh variables above ``top`` and remembers them by family and key."""

    def __init__(self, top: int, prefix: str = ""):
        self.top = top
        self.prefix = prefix
        self.aux: dict[str, dict[tuple, int]] = {}

    def new(self, family: str, key: tuple) -> int:
        self.top += 1
        self.aux.setdefault(self.prefix + family, {})[key] = self.top
        return self.top

    def block(self, family: str, keys: Iterable[tuple]) -> dict[tuple, int]:
        return {k: self.new(family, k) for k in keys}


@dataclass
class EncodedFormula:
    """Clauses added on top of the base formula plus bookkeeping."""

    added_clauses: list[Clause]
    new_var_count: int
    aux: dict[str, dict[tuple, int]] = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    @property
    def aux_var_count(self) -> int:
        return sum(len(f) for f in self.aux.values())

    def to_cnf(self, base: Cnf) -> Cnf:
        return Cnf(self.new_var_count, base.clauses + tuple(self.added_clauses))

    def aux_json(self) -> str:
        doc = {
            family: {",".join(map(str, key)): var for key, var in members.items()}
            for family, members in self.aux.items()
        }
        return json.dumps(doc, indent=1, sort_keys=True)


class Model:
    """Total assignment over ``1..var_count``."""

    __slots__ = ("values",)

    def __init__(self, var_count: int, true_vars: Iterable[int] = ()):
        values = [False] * (var_count + 1)
        for v in true_vars:
            if not 1 <= v <= var_count:
                raise ValueError(f"variable {v} out of range 1..{var_count}")
            values[v] = True
        self.values = values

    @classmethod
    def from_values(cls, values: Iterable[bool]) -> "Model":
        m = cls(0)
        m.values = [False] + [bool(x) for x in values]
        return m

    @property
    def var_count(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, var: int) -> bool:
        if not 1 <= var <= self.var_count:
            raise IndexError(f"variable {var} out of range 1..{self.var_count}")
        return self.values[var]

    def lit(self, lit: int) -> bool:
        v = self[abs(lit)]
        return v if lit > 0 else not v

    def satisfies(self, clause: Iterable[int]) -> bool:
        return any(self.lit(l) for l in clause)

    def as_dict(self) -> dict[int, bool]:
        return {v: self.values[v] for v in range(1, len(self.values))}

    def __eq__(self, other):
        return isinstance(other, Model) and self.values == other.values

    def __repr__(self):
        true = [v for v in range(1, len(self.values)) if self.values[v]]
        return f"Model(var_count={self.var_count}, true={true})"


def _text(data: bytes | str) -> str:
    return data.decode() if isinstance(data, (bytes, bytearray)) else data


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"expected an integer, got {tok!r}", lineno) from None


def _node(tok: str, n: int, lineno: int) -> int:
    v = _int(tok, lineno)
    if not 1 <= v <= n:
        raise FormatError(f"node {v} outside 1..{n}", lineno)
    return v


def parse_gcnf(data: bytes | str) -> GraphInstance:
    header = None
    arc_var: dict[Arc, int] = {}
    constraints: list[Constraint] = []
    clauses: list[Clause] = []
    pending: list[int] = []
    for lineno, line in enumerate(_text(data).splitlines(), 1):
        toks = line.split()
        if not toks or toks[0] == "c" or toks[0].startswith("%"):
            continue
        if toks[0] == "p":
            if header is not None:
                raise FormatError("duplicate header", lineno)
            if len(toks) != 5 or toks[1] != "gcnf":
                raise FormatError("header must be 'p gcnf <vars> <clauses> <nodes>'", lineno)
            header = tuple(_int(t, lineno) for t in toks[2:])
            if min(header) < 0:
                raise FormatError("negative header field", lineno)
            continue
        if header is None:
            raise FormatError("content before the 'p gcnf' header", lineno)
        n_vars, n_clauses, n_nodes = header
        if toks[0] == "g":
            if len(toks) < 2:
                raise FormatError("truncated graph line", lineno)
            if toks[1] == "a":
                if len(toks) != 5:
                    raise FormatError("arc line must be 'g a <u> <v> <var>'", lineno)
                u, v = _node(toks[2], n_nodes, lineno), _node(toks[3], n_nodes, lineno)
                x = _int(toks[4], lineno)
                if not 1 <= x <= n_vars:
                    raise FormatError(f"arc variable {x} outside 1..{n_vars}", lineno)
                if (u, v) in arc_var:
                    raise FormatError(f"duplicate arc ({u}, {v})", lineno)
                arc_var[(u, v)] = x
            elif toks[1] == "c":
                if len(toks) < 3:
                    raise FormatError("missing constraint keyword", lineno)
                kind, args = toks[2], toks[3:]
                if kind == "acyclic":
                    if len(args) > 1:
                        raise FormatError("'acyclic' takes at most one node", lineno)
                    skip = _node(args[0], n_nodes, lineno) if args else None
                    constraints.append(Acyclic(skip))
                elif kind in ("reach", "noreach", "ereach"):
                    if len(args) != 2:
                        raise FormatError(f"'{kind}' takes two nodes", lineno)
                    s, t = (_node(a, n_nodes, lineno) for a in args)
                    constraints.append(CONSTRAINT_TYPES[kind](s, t))
                else:
                    raise FormatError(f"unknown constraint keyword {kind!r}", lineno)
            else:
                raise FormatError(f"unknown graph line type {toks[1]!r}", lineno)
            continue
        for tok in toks:
            lit = _int(tok, lineno)
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            elif abs(lit) > n_vars:
                raise FormatError(f"literal {lit} exceeds var_count {n_vars}", lineno)
            else:
                pending.append(lit)
    if header is None:
        raise FormatError("missing 'p gcnf' header")
    if pending:
        raise FormatError("last clause is not terminated by 0")
    n_vars, n_clauses, n_nodes = header
    if len(clauses) != n_clauses:
        raise FormatError(f"header declares {n_clauses} clauses, found {len(clauses)}")
    graph = DirectedGraph(n_nodes, arc_var)
    return GraphInstance(Cnf(n_vars, clauses), graph, arc_var, constraints)


def _clause_line(c: Iterable[int]) -> str:
    return " ".join(map(str, c)) + (" 0" if c else "0")


def write_gcnf(inst: GraphInstance) -> bytes:
    lines = [f"p gcnf {inst.base.var_count} {len(inst.base.clauses)} {inst.graph.node_count}"]
    for (u, v) in inst.graph.sorted_arcs:
        lines.append(f"g a {u} {v} {inst.arc_var[(u, v)]}")
    for c in inst.constraints:
        if isinstance(c, Acyclic):
            lines.append("g c acyclic" + ("" if c.skip_into is None else f" {c.skip_into}"))
        else:
            lines.append(f"g c {c.kind} {c.source} {c.target}")
    lines.extend(_clause_line(c) for c in inst.base.clauses)
    return ("\n".join(lines) + "\n").encode()


def write_dimacs(cnf: Cnf, comments: Iterable[str] = ()) -> bytes:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {cnf.var_count} {len(cnf.clauses)}")
    lines.extend(_clause_line(c) for c in cnf.clauses)
    return ("\n".join(lines) + "\n").encode()


def parse_dimacs(data: bytes | str) -> Cnf:
    header = None
    clauses: list[Clause] = []
    pending: list[int] = []
    for lineno, line in enumerate(_text(data).splitlines(), 1):
        toks = line.split()
        if not toks or toks[0] == "c":
            continue
        if toks[0] == "%":
            break
        if toks[0] == "p":
            if len(toks) != 4 or toks[1] != "cnf":
                raise FormatError("header must be 'p cnf <vars> <clauses>'", lineno)
            header = (_int(toks[2], lineno), _int(toks[3], lineno))
            continue
        if header is None:
            raise FormatError("clause before the 'p cnf' header", lineno)
        for tok in toks:
            lit = _int(tok, lineno)
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            elif abs(lit) > header[0]:
                raise FormatError(f"literal {lit} exceeds var_count {header[0]}", lineno)
            else:
                pending.append(lit)
    if header is None:
        raise FormatError("missing 'p cnf' header")
    if pending:
        clauses.append(tuple(pending))
    if len(clauses) != header[1]:
        raise FormatError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return Cnf(header[0], clauses)


def parse_model(data: bytes | str, var_count: int) -> Model:
    """Read a model from solver ``v`` lines or a bare literal list.

    ``s``/``c`` lines are skipped and unmentioned variables are false.
    """
    true_vars = []
    for lineno, line in enumerate(_text(data).splitlines(), 1):
        toks = line.split()
        if not toks or toks[0] in ("c", "s"):
            continue
        if toks[0] == "v":
            toks = toks[1:]
        for tok in toks:
            lit = _int(tok, lineno)
            if abs(lit) > var_count:
                raise FormatError(f"literal {lit} exceeds var_count {var_count}", lineno)
            if lit > 0:
                true_vars.append(lit)
    return Model(var_count, true_vars)


def write_model(model: Model) -> bytes:
    lits = [v if model.values[v] else -v for v in range(1, model.var_count + 1)]
    return ("v " + " ".join(map(str, lits + [0])) + "\n").encode()
