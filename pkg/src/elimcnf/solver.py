"""A compact CDCL SAT solver plus a file-based bridge to external solvers.

The internal solver exists so that encode/solve/verify pipelines run without
third-party binaries. It is complete but makes no attempt at competition speed.
"""

from __future__ import annotations

import os
import random
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field

from .formula import Cnf, Model, write_dimacs

SAT, UNSAT, ABORTED = "sat", "unsat", "aborted"


@dataclass
class SolveResult:
    status: str
    model: Model | None = None
    stats: dict = field(default_factory=dict)

    @property
    def is_sat(self) -> bool:
        return self.status == SAT


def _luby(i: int) -> int:
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class _Heap:
    """Max-heap of variables keyed by activity, with position index."""

    def __init__(self, act: list[float]):
        self.act = act
        self.heap: list[int] = []
        self.index: dict[int, int] = {}

    def __contains__(self, v: int) -> bool:
        return v in self.index

    def __bool__(self) -> bool:
        return bool(self.heap)

    def _up(self, i: int) -> None:
        heap, index, act = self.heap, self.index, self.act
        v = heap[i]
        a = act[v]
        while i > 0:
            p = (i - 1) >> 1
            pv = heap[p]
            if act[pv] > a or (act[pv] == a and pv < v):
                break
            heap[i] = pv
            index[pv] = i
            i = p
        heap[i] = v
        index[v] = i

    def _down(self, i: int) -> None:
        heap, index, act = self.heap, self.index, self.act
        n = len(heap)
        v = heap[i]
        a = act[v]
        while True:
            c = 2 * i + 1
            if c >= n:
                break
            if c + 1 < n:
                l, r = heap[c], heap[c + 1]
                if act[r] > act[l] or (act[r] == act[l] and r < l):
                    c += 1
            cv = heap[c]
            if act[cv] < a or (act[cv] == a and cv > v):
                break
            heap[i] = cv
            index[cv] = i
            i = c
        heap[i] = v
        index[v] = i

    def push(self, v: int) -> None:
        if v in self.index:
            return
        self.heap.append(v)
        self.index[v] = len(self.heap) - 1
        self._up(len(self.heap) - 1)

    def bumped(self, v: int) -> None:
        i = self.index.get(v)
        if i is not None:
            self._up(i)

    def pop(self) -> int:
        heap = self.heap
        top = heap[0]
        last = heap.pop()
        del self.index[top]
        if heap:
            heap[0] = last
            self.index[last] = 0
            self._down(0)
        return top


class CdclSolver:
    """Conflict-driven clause learning with two watched literals.

    Literals are encoded as ``2*v`` (positive) and ``2*v + 1`` (negative).
    """

    def __init__(self, cnf: Cnf, seed: int = 0):
        self.n = cnf.var_count
        n = self.n
        self.value = [0] * (2 * n + 2)  # per literal: 1 true, -1 false, 0 unassigned
        self.level = [0] * (n + 1)
        self.reason: list[list[int] | None] = [None] * (n + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: list[list[list[int]]] = [[] for _ in range(2 * n + 2)]
        self.learnts: list[list[int]] = []
        self.lbd: dict[int, int] = {}
        self.act = [0.0] * (n + 1)
        self.var_inc = 1.0
        self.phase = [False] * (n + 1)
        self.seen = [False] * (n + 1)
        self.ok = True
        self.stats = {"decisions": 0, "propagations": 0, "conflicts": 0, "restarts": 0, "learned": 0}
        rng = random.Random(seed)
        if seed:
            for v in range(1, n + 1):
                self.act[v] = rng.random() * 1e-5
        self.heap = _Heap(self.act)
        for v in range(1, n + 1):
            self.heap.push(v)
        for c in cnf.clauses:
            if not self._add_input(c):
                self.ok = False
                break

    @staticmethod
    def _enc(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def _add_input(self, clause) -> bool:
        lits = []
        seen = set()
        for l in clause:
            x = self._enc(l)
            if x ^ 1 in seen:
                return True
            if x not in seen:
                seen.add(x)
                lits.append(x)
        lits = [x for x in lits if self.value[x] != -1]
        if any(self.value[x] == 1 for x in lits):
            return True
        if not lits:
            return False
        if len(lits) == 1:
            self._enqueue(lits[0], None)
            return self._propagate() is None
        self.watches[lits[0] ^ 1].append(lits)
        self.watches[lits[1] ^ 1].append(lits)
        return True

    def _enqueue(self, lit: int, reason) -> None:
        v = lit >> 1
        self.value[lit] = 1
        self.value[lit ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        value = self.value
        watches = self.watches
        trail = self.trail
        props = 0
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            props += 1
            # clauses watching the negation of p are stored under p
            ws = watches[p]
            false_lit = p ^ 1
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if value[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    x = c[k]
                    if value[x] != -1:
                        c[1] = x
                        c[k] = false_lit
                        watches[x ^ 1].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if value[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        self.stats["propagations"] += props
                        return c
                    self._enqueue(first, c)
            del ws[j:]
        self.stats["propagations"] += props
        return None

    def _bump(self, v: int) -> None:
        self.act[v] += self.var_inc
        if self.act[v] > 1e100:
            for u in range(1, self.n + 1):
                self.act[u] *= 1e-100
            self.var_inc *= 1e-100
        self.heap.bumped(v)

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        seen = self.seen
        level = self.level
        cur = len(self.trail_lim)
        learnt = [0]
        counter = 0
        p = -1
        idx = len(self.trail) - 1
        touched = []
        while True:
            for q in confl:
                if q == p:
                    continue
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    touched.append(v)
                    self._bump(v)
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            confl = self.reason[p >> 1]
            seen[p >> 1] = False
            counter -= 1
            if counter == 0:
                break
            if confl is not None and confl[0] != p:
                # reason clauses keep the implied literal first
                k = confl.index(p)
                confl[0], confl[k] = confl[k], confl[0]
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause (local minimisation)
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = self.reason[q >> 1]
            if r is None or any(not seen[x >> 1] and level[x >> 1] > 0 for x in r if x != q ^ 1):
                keep.append(q)
        for v in touched:
            seen[v] = False
        learnt = keep
        if len(learnt) == 1:
            back = 0
        else:
            mi = max(range(1, len(learnt)), key=lambda k: level[learnt[k] >> 1])
            learnt[1], learnt[mi] = learnt[mi], learnt[1]
            back = level[learnt[1] >> 1]
        self.var_inc /= 0.95
        return learnt, back

    def _cancel(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        value = self.value
        start = self.trail_lim[lvl]
        for lit in self.trail[start:]:
            v = lit >> 1
            value[lit] = 0
            value[lit ^ 1] = 0
            self.reason[v] = None
            self.phase[v] = not (lit & 1)
            self.heap.push(v)
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _reduce(self) -> None:
        locked = set()
        for lit in self.trail:
            r = self.reason[lit >> 1]
            if r is not None:
                locked.add(id(r))
        ranked = sorted(self.learnts, key=lambda c: (self.lbd[id(c)], len(c)))
        keep_n = len(ranked) // 2
        survivors = []
        dropped = set()
        for k, c in enumerate(ranked):
            if k < keep_n or self.lbd[id(c)] <= 2 or id(c) in locked:
                survivors.append(c)
            else:
                dropped.add(id(c))
        if not dropped:
            return
        for ws in self.watches:
            if ws:
                ws[:] = [c for c in ws if id(c) not in dropped]
        for cid in dropped:
            del self.lbd[cid]
        self.learnts = survivors

    def _pick(self) -> int:
        heap = self.heap
        value = self.value
        while heap:
            v = heap.pop()
            if value[2 * v] == 0:
                return 2 * v if self.phase[v] else 2 * v + 1
        return -1

    def solve(self, conflict_budget: int | None = None) -> SolveResult:
        start = time.perf_counter()
        if not self.ok or self._propagate() is not None:
            return self._result(UNSAT, start)
        restart_no = 0
        next_restart = 100 * _luby(restart_no)
        since_restart = 0
        reduce_at = 2000
        while True:
            confl = self._propagate()
            if confl is not None:
                self.stats["conflicts"] += 1
                since_restart += 1
                if not self.trail_lim:
                    return self._result(UNSAT, start)
                learnt, back = self._analyze(confl)
                self._cancel(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self.watches[learnt[0] ^ 1].append(learnt)
                    self.watches[learnt[1] ^ 1].append(learnt)
                    self.learnts.append(learnt)
                    self.lbd[id(learnt)] = len({self.level[x >> 1] for x in learnt})
                    self.stats["learned"] += 1
                    self._enqueue(learnt[0], learnt)
                if conflict_budget is not None and self.stats["conflicts"] >= conflict_budget:
                    return self._result(ABORTED, start)
                continue
            if since_restart >= next_restart:
                self.stats["restarts"] += 1
                restart_no += 1
                next_restart = 100 * _luby(restart_no)
                since_restart = 0
                self._cancel(0)
            if self.stats["conflicts"] >= reduce_at and len(self.learnts) > 1000:
                self._reduce()
                reduce_at = self.stats["conflicts"] + 2000 + 300 * self.stats["restarts"]
            lit = self._pick()
            if lit < 0:
                return self._result(SAT, start)
            self.stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, None)

    def _result(self, status: str, start: float) -> SolveResult:
        stats = dict(self.stats, seconds=time.perf_counter() - start)
        if status != SAT:
            return SolveResult(status, None, stats)
        true_vars = [v for v in range(1, self.n + 1) if self.value[2 * v] == 1]
        return SolveResult(SAT, Model(self.n, true_vars), stats)


def solve(cnf: Cnf, seed: int = 0, conflict_budget: int | None = None) -> SolveResult:
    """Decide ``cnf``; a SAT answer carries a model checked against every clause."""
    result = CdclSolver(cnf, seed).solve(conflict_budget)
    if result.is_sat:
        for c in cnf.clauses:
            if not result.model.satisfies(c):
                raise AssertionError(f"internal solver produced a model violating {c}")
    return result


class ExternalSolverError(RuntimeError):
    pass


def parse_solver_output(text: str, var_count: int) -> SolveResult:
    """Read SAT-competition style ``s``/``v`` output."""
    status = None
    true_vars = []
    for line in text.splitlines():
        toks = line.split()
        if not toks:
            continue
        if toks[0] == "s":
            word = " ".join(toks[1:]).upper()
            if word == "SATISFIABLE":
                status = SAT
            elif word == "UNSATISFIABLE":
                status = UNSAT
            elif word in ("UNKNOWN", "INDETERMINATE"):
                status = ABORTED
            else:
                raise ExternalSolverError(f"unrecognised status line {line!r}")
        elif toks[0] == "v":
            for tok in toks[1:]:
                try:
                    lit = int(tok)
                except ValueError:
                    raise ExternalSolverError(f"bad literal {tok!r} in value line") from None
                if abs(lit) > var_count:
                    raise ExternalSolverError(f"literal {lit} exceeds var_count {var_count}")
                if lit > 0:
                    true_vars.append(lit)
    if status is None:
        raise ExternalSolverError("solver output has no 's' line")
    return SolveResult(status, Model(var_count, true_vars) if status == SAT else None)


def solve_external(cnf: Cnf, template: str, timeout: float | None = None) -> SolveResult:
    """Write ``cnf`` to a temp file and run ``template`` with ``{cnf}`` substituted.

    Exit codes 0, 10 and 20 are accepted; the answer is read from stdout.
    """
    if "{cnf}" not in template:
        raise ExternalSolverError("solver template must contain the {cnf} placeholder")
    start = time.perf_counter()
    fd, path = tempfile.mkstemp(suffix=".cnf")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(write_dimacs(cnf))
        argv = [tok.replace("{cnf}", path) for tok in shlex.split(template)]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except FileNotFoundError:
            raise ExternalSolverError(f"solver executable not found: {argv[0]}") from None
        except subprocess.TimeoutExpired:
            return SolveResult(ABORTED, None, {"seconds": time.perf_counter() - start})
    finally:
        os.unlink(path)
    if proc.returncode not in (0, 10, 20):
        raise ExternalSolverError(
            f"solver exited with status {proc.returncode}: {proc.stderr.strip()[:200]}"
        )
    result = parse_solver_output(proc.stdout, cnf.var_count)
    result.stats["seconds"] = time.perf_counter() - start
    result.stats["exit_code"] = proc.returncode
    return result
