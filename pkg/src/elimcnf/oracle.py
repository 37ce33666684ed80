"""Ground truth: decode models, check graph properties, enumerate encodings exhaustively."""

from __future__ import annotations

from collections import deque
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .formula import (
    Acyclic,
    Clause,
    Constraint,
    EncodedFormula,
    EReach,
    GraphInstance,
    Model,
    NoReach,
    Reach,
    effective_arcs,
)
from .graph import Arc, DirectedGraph

ENUMERATION_LIMIT = 24


def decode_model(inst: GraphInstance, m: Model) -> DirectedGraph:
    """The sub-graph of enabled arcs."""
    if m.var_count < inst.base.var_count:
        raise ValueError(
            f"model covers {m.var_count} variables, instance needs {inst.base.var_count}"
        )
    return DirectedGraph(inst.graph.node_count,
                         [a for a, x in inst.arc_var.items() if m[x]])


def find_cycle(g: DirectedGraph) -> list[int] | None:
    """Some directed cycle as a vertex list, or None when ``g`` is acyclic."""
    indeg = {v: 0 for v in g.nodes}
    for _, v in g.arcs:
        indeg[v] += 1
    queue = deque(v for v in g.nodes if indeg[v] == 0)
    removed = 0
    succ = g.successors
    while queue:
        u = queue.popleft()
        removed += 1
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    if removed == g.node_count:
        return None
    # every leftover vertex has a leftover predecessor; walk backwards until a repeat
    pred = g.predecessors
    v = next(v for v in g.nodes if indeg[v] > 0)
    seen: dict[int, int] = {}
    walk = []
    while v not in seen:
        seen[v] = len(walk)
        walk.append(v)
        v = next(u for u in pred[v] if indeg[u] > 0)
    cycle = walk[seen[v]:]
    cycle.reverse()
    return cycle


def check_acyclic(g: DirectedGraph) -> bool:
    return find_cycle(g) is None


def reachable_from(g: DirectedGraph, s: int) -> set[int]:
    """Nodes reachable from ``s``, ``s`` included."""
    succ = g.successors
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in succ[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def check_reach(g: DirectedGraph, s: int, t: int) -> bool:
    return t in reachable_from(g, s)


def ereach_witness(g: DirectedGraph, s: int, t: int) -> int | None:
    """A node reachable from ``s`` that cannot reach ``t``, if any."""
    rev = DirectedGraph(g.node_count, [(v, u) for u, v in g.arcs])
    reaches_t = reachable_from(rev, t)
    bad = sorted(reachable_from(g, s) - reaches_t)
    return bad[0] if bad else None


def check_ereach(g: DirectedGraph, s: int, t: int) -> bool:
    return ereach_witness(g, s, t) is None


def _restrict(g: DirectedGraph, c: Constraint) -> DirectedGraph:
    if isinstance(c, Acyclic) and c.skip_into is not None:
        return DirectedGraph(g.node_count, effective_arcs(g, c))
    return g


def check_constraint(g: DirectedGraph, c: Constraint) -> tuple[bool, object]:
    """Verdict and a witness (cycle, offending node or None)."""
    g = _restrict(g, c)
    if isinstance(c, Acyclic):
        cycle = find_cycle(g)
        return cycle is None, cycle
    if isinstance(c, Reach):
        ok = check_reach(g, c.source, c.target)
        return ok, None if ok else c.target
    if isinstance(c, NoReach):
        ok = not check_reach(g, c.source, c.target)
        return ok, None if ok else c.target
    if isinstance(c, EReach):
        bad = ereach_witness(g, c.source, c.target)
        return bad is None, bad
    raise TypeError(f"unknown constraint {c!r}")


@dataclass
class Verdict:
    constraint: Constraint
    passed: bool
    witness: object = None


@dataclass
class VerificationReport:
    base_ok: bool
    verdicts: list[Verdict]
    arcs: list[Arc]
    violated_clause: Clause | None = None

    @property
    def passed(self) -> bool:
        return self.base_ok and all(v.passed for v in self.verdicts)

    def lines(self) -> list[str]:
        out = [f"base formula: {'pass' if self.base_ok else 'FAIL'}"
               + ("" if self.violated_clause is None else f" (clause {list(self.violated_clause)})")]
        for v in self.verdicts:
            c = v.constraint
            name = c.kind if isinstance(c, Acyclic) else f"{c.kind} {c.source} {c.target}"
            line = f"{name}: {'pass' if v.passed else 'FAIL'}"
            if not v.passed and v.witness is not None:
                line += f" (witness {v.witness})"
            out.append(line)
        return out


def verify(inst: GraphInstance, m: Model) -> VerificationReport:
    violated = next((c for c in inst.base.clauses if not m.satisfies(c)), None)
    g = decode_model(inst, m)
    verdicts = [Verdict(c, *check_constraint(g, c)) for c in inst.constraints]
    return VerificationReport(violated is None, verdicts, list(g.sorted_arcs), violated)


# -- exhaustive soundness / completeness ------------------------------------------

@lru_cache(maxsize=1 << 16)
def _satisfies_all(n: int, arcs: frozenset, constraints: tuple) -> bool:
    g = DirectedGraph(n, arcs)
    return all(check_constraint(g, c)[0] for c in constraints)


class _Propagator:
    """Two-watched-literal propagation with a trail, for enumeration only.

    Literal ``x`` is stored as ``2x`` and ``-x`` as ``2x + 1``; ``val`` is
    indexed by stored literal (1 true, -1 false, 0 free).
    """

    def __init__(self, var_count: int, clauses: Iterable[Clause]):
        self.val = [0] * (2 * var_count + 2)
        self.trail: list[int] = []
        self.watches: list[list[list[int]]] = [[] for _ in range(2 * var_count + 2)]
        self.units: list[int] = []
        self.empty = False
        for c in clauses:
            c = list(dict.fromkeys(c))
            if any(-l in c for l in c):
                continue
            enc = [2 * l if l > 0 else -2 * l + 1 for l in c]
            if not enc:
                self.empty = True
            elif len(enc) == 1:
                self.units.append(enc[0])
            else:
                # stored under the literal whose truth falsifies the watch
                self.watches[enc[0] ^ 1].append(enc)
                self.watches[enc[1] ^ 1].append(enc)

    def assign(self, lit: int) -> bool:
        """Make stored literal ``lit`` true and propagate; False on conflict."""
        val = self.val
        watches = self.watches
        trail = self.trail
        if val[lit] == 1:
            return True
        if val[lit] == -1:
            return False
        val[lit] = 1
        val[lit ^ 1] = -1
        trail.append(lit)
        head = len(trail) - 1
        while head < len(trail):
            p = trail[head]
            head += 1
            false_lit = p ^ 1
            ws = watches[p]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    x = c[k]
                    if val[x] != -1:
                        c[1] = x
                        c[k] = false_lit
                        watches[x ^ 1].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] == -1:
                        ws[j:i] = []
                        return False
                    val[first] = 1
                    val[first ^ 1] = -1
                    trail.append(first)
            del ws[j:]
        return True

    def undo(self, mark: int) -> None:
        val = self.val
        trail = self.trail
        while len(trail) > mark:
            lit = trail.pop()
            val[lit] = 0
            val[lit ^ 1] = 0

    def satisfiable(self, free: Sequence[int], start: int = 0) -> bool:
        """DPLL over the unassigned variables of ``free[start:]`` (false first)."""
        val = self.val
        k = start
        while k < len(free) and val[2 * free[k]] != 0:
            k += 1
        if k == len(free):
            return True
        v = free[k]
        for lit in (2 * v + 1, 2 * v):
            mark = len(self.trail)
            if self.assign(lit) and self.satisfiable(free, k + 1):
                self.undo(mark)
                return True
            self.undo(mark)
        return False


def extendable_base_assignments(base_vars: int, total_vars: int,
                                clauses: Iterable[Clause]) -> set[int]:
    """Bit masks over variables ``1..base_vars`` that extend to a model of ``clauses``.

    Bit ``v - 1`` of a mask is the value of variable ``v``. Branches on base
    variables first, sharing propagation between neighbouring assignments.
    """
    prop = _Propagator(total_vars, clauses)
    found: set[int] = set()
    if prop.empty:
        return found
    for u in prop.units:
        if not prop.assign(u):
            return found
    aux = list(range(base_vars + 1, total_vars + 1))
    val = prop.val

    def walk(v: int) -> None:
        if v > base_vars:
            mark = len(prop.trail)
            if prop.satisfiable(aux):
                mask = 0
                for x in range(1, base_vars + 1):
                    if val[2 * x] == 1:
                        mask |= 1 << (x - 1)
                found.add(mask)
            prop.undo(mark)
            return
        if val[2 * v] != 0:
            walk(v + 1)
            return
        for lit in (2 * v + 1, 2 * v):
            mark = len(prop.trail)
            if prop.assign(lit):
                walk(v + 1)
            prop.undo(mark)

    walk(1)
    return found


@dataclass
class BruteForceResult:
    sound: bool
    complete: bool
    unsound_examples: list[int] = field(default_factory=list)
    incomplete_examples: list[int] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.sound and self.complete


def brute_force_check(inst: GraphInstance, encoded: EncodedFormula,
                      constraints: Sequence[Constraint] | None = None) -> BruteForceResult:
    """Enumerate every base assignment and compare extendability with the oracle.

    Sound: each base assignment that extends to a model of base and added
    clauses decodes to a graph meeting every constraint. Complete: each base
    model whose graph meets the constraints extends. Base variables are
    enumerated exhaustively (at most ``ENUMERATION_LIMIT`` of them); auxiliary
    variables are searched per base assignment.
    """
    nb = inst.base.var_count
    if nb > ENUMERATION_LIMIT:
        raise ValueError(f"{nb} base variables exceed the enumeration limit {ENUMERATION_LIMIT}")
    constraints = inst.constraints if constraints is None else tuple(constraints)
    ext = extendable_base_assignments(
        nb, encoded.new_var_count, list(inst.base.clauses) + list(encoded.added_clauses))
    arcs = inst.graph.sorted_arcs
    arc_bits = [1 << (inst.arc_var[a] - 1) for a in arcs]
    n = inst.graph.node_count
    verdict_cache: dict[int, bool] = {}
    constraints = tuple(constraints)
    base_clauses = [[(1 << (abs(l) - 1), l > 0) for l in c] for c in inst.base.clauses]
    # arc k on variable k + 1 (free instances): the base mask is the arc mask
    identity = arc_bits == [1 << k for k in range(nb)]
    result = BruteForceResult(True, True)
    for mask in range(1 << nb):
        if base_clauses and not all(
                any(bool(mask & bit) == pos for bit, pos in c) for c in base_clauses):
            continue
        if identity:
            arc_mask = mask
        else:
            arc_mask = 0
            for k, bit in enumerate(arc_bits):
                if mask & bit:
                    arc_mask |= 1 << k
        ok = verdict_cache.get(arc_mask)
        if ok is None:
            sub = frozenset(a for k, a in enumerate(arcs) if arc_mask >> k & 1)
            ok = verdict_cache[arc_mask] = _satisfies_all(n, sub, constraints)
        extends = mask in ext
        if extends and not ok:
            result.sound = False
            result.unsound_examples.append(mask)
        elif ok and not extends:
            result.complete = False
            result.incomplete_examples.append(mask)
    return result
