import random
import sys
import textwrap

import pytest

from elimcnf.encoders import encode_acyclicity_ve
from elimcnf.formula import Cnf
from elimcnf.solver import (
    ABORTED,
    SAT,
    UNSAT,
    CdclSolver,
    ExternalSolverError,
    _luby,
    parse_solver_output,
    solve,
    solve_external,
)

from conftest import RING_ORDER, all_true, brute_force_sat

FAKE_SOLVER = textwrap.dedent("""
    import sys
    from elimcnf.formula import parse_dimacs
    from elimcnf.solver import solve
    cnf = parse_dimacs(open(sys.argv[1]).read())
    res = solve(cnf)
    if res.status == "sat":
        print("s SATISFIABLE")
        print("v " + " ".join(str(v if res.model[v] else -v) for v in range(1, cnf.var_count + 1)) + " 0")
        sys.exit(10)
    print("s UNSATISFIABLE")
    sys.exit(20)
""")


def random_cnf(rng, n):
    m = rng.randint(0, 5 * n)
    clauses = []
    for _ in range(m):
        k = rng.choice([1, 2, 2, 3, 3, 3, 4])
        clauses.append([rng.choice([1, -1]) * rng.randint(1, n) for _ in range(k)])
    return Cnf(n, clauses)


class TestSolve:
    def test_empty(self):
        res = solve(Cnf(0))
        assert res.status == SAT and res.model.var_count == 0

    def test_contradiction(self):
        assert solve(Cnf(1, [(1,), (-1,)])).status == UNSAT

    def test_empty_clause(self):
        assert solve(Cnf(2, [(1, 2), ()])).status == UNSAT

    def test_ring8(self, ring8):
        enc = encode_acyclicity_ve(ring8, RING_ORDER)
        assert solve(enc.to_cnf(ring8.base)).status == SAT
        forced = all_true(ring8)
        assert solve(enc.to_cnf(forced.base)).status == UNSAT

    def test_fuzz_against_enumeration(self):
        rng = random.Random(2024)
        for case in range(1200):
            cnf = random_cnf(rng, rng.randint(1, 16))
            res = solve(cnf, seed=case)
            assert (res.status == SAT) == brute_force_sat(cnf.var_count, cnf.clauses), cnf
            if res.status == SAT:
                assert all(res.model.satisfies(c) for c in cnf.clauses)

    def test_pigeonhole(self):
        # 6 pigeons, 5 holes: needs real conflict analysis
        p = lambda i, j: i * 5 + j + 1
        clauses = [[p(i, j) for j in range(5)] for i in range(6)]
        clauses += [[-p(i, j), -p(k, j)] for j in range(5) for i in range(6) for k in range(i + 1, 6)]
        res = solve(Cnf(30, clauses))
        assert res.status == UNSAT and res.stats["conflicts"] > 0

    def test_deterministic(self):
        cnf = random_cnf(random.Random(3), 40)
        a, b = solve(cnf, seed=7), solve(cnf, seed=7)
        assert a.status == b.status and a.model == b.model and a.stats["decisions"] == b.stats["decisions"]

    def test_budget(self):
        p = lambda i, j: i * 7 + j + 1
        clauses = [[p(i, j) for j in range(7)] for i in range(8)]
        clauses += [[-p(i, j), -p(k, j)] for j in range(7) for i in range(8) for k in range(i + 1, 8)]
        res = CdclSolver(Cnf(56, clauses)).solve(conflict_budget=5)
        assert res.status == ABORTED and res.model is None

    def test_luby(self):
        assert [_luby(i) for i in range(15)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


class TestExternal:
    def test_parse_output(self):
        res = parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3)
        assert res.status == SAT and res.model.as_dict() == {1: True, 2: False, 3: True}
        assert parse_solver_output("s UNSATISFIABLE\n", 3).status == UNSAT
        assert parse_solver_output("s UNKNOWN\n", 3).status == ABORTED

    @pytest.mark.parametrize("text", ["", "s MAYBE\n", "s SATISFIABLE\nv 9 0\n", "s SATISFIABLE\nv x\n"])
    def test_parse_errors(self, text):
        with pytest.raises(ExternalSolverError):
            parse_solver_output(text, 3)

    def test_round_trip_through_process(self, tmp_path, ring8):
        script = tmp_path / "fake_solver.py"
        script.write_text(FAKE_SOLVER)
        template = f"{sys.executable} {script} {{cnf}}"
        enc = encode_acyclicity_ve(ring8, RING_ORDER)
        sat = solve_external(enc.to_cnf(ring8.base), template)
        assert sat.status == SAT and sat.stats["exit_code"] == 10
        unsat = solve_external(enc.to_cnf(all_true(ring8).base), template)
        assert unsat.status == UNSAT

    def test_missing_placeholder(self):
        with pytest.raises(ExternalSolverError):
            solve_external(Cnf(1), "true")

    def test_missing_binary(self):
        with pytest.raises(ExternalSolverError):
            solve_external(Cnf(1), "/nonexistent/solver {cnf}")

    def test_bad_exit(self, tmp_path):
        script = tmp_path / "crash.py"
        script.write_text("import sys; sys.exit(3)\n")
        with pytest.raises(ExternalSolverError):
            solve_external(Cnf(1), f"{sys.executable} {script} {{cnf}}")
