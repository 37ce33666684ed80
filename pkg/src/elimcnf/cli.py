"""Command-line front end.

Exit codes: ``solve`` returns 10 (SAT) / 20 (UNSAT) / 0 (budget exhausted);
every command returns 1 on input or solver errors and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import GridSpec, gen_grid_hc, gen_random
from .encoders import METHODS, MethodError, encode_instance
from .formula import FormatError, parse_model, write_dimacs, write_gcnf
from .pipeline import run_stats, solve_instance
from .solver import ExternalSolverError, SAT, UNSAT
from .validation import check_instance, check_methods, read_ordering_file
from .oracle import verify

EXIT_SAT, EXIT_UNSAT, EXIT_ERROR, EXIT_USAGE = 10, 20, 1, 2


class UsageError(Exception):
    pass


def _method(value: str) -> str:
    if value not in METHODS:
        raise argparse.ArgumentTypeError(
            f"invalid method {value!r}; choose from {', '.join(METHODS)}")
    return value


def _order(value: str):
    if value in ("mindegree", "minfill"):
        return value
    if value.startswith("given:"):
        return read_ordering_file(value[len("given:"):])
    raise argparse.ArgumentTypeError(
        f"invalid order {value!r}; use mindegree, minfill or given:<file>")


def _write(path: str | None, data: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(path).write_bytes(data)


def _load(args):
    return check_instance(Path(args.input).read_bytes())


def cmd_encode(args) -> int:
    inst = _load(args)
    check_methods(args.method, inst)
    encoded = encode_instance(inst, args.method, args.order)
    cnf = encoded.to_cnf(inst.base)
    _write(args.out, write_dimacs(cnf))
    if args.map:
        Path(args.map).write_text(encoded.aux_json() + "\n")
    stats = run_stats(inst, args.order, encoded).to_dict()
    stats["constraints"] = encoded.stats["constraints"]
    doc = json.dumps(stats, indent=1) + "\n"
    if args.stats:
        Path(args.stats).write_text(doc)
    elif args.out not in (None, "-"):
        sys.stdout.write(doc)
    return 0


def cmd_solve(args) -> int:
    inst = _load(args)
    check_methods(args.method, inst)
    outcome = solve_instance(inst, args.method, args.order, args.solver,
                             args.seed, args.conflict_budget)
    if args.stats:
        Path(args.stats).write_text(json.dumps(outcome.stats.to_dict(), indent=1) + "\n")
    status = outcome.result.status
    if status == SAT:
        if not outcome.report.passed:
            sys.stderr.write("error: solver model fails verification\n")
            for line in outcome.report.lines():
                sys.stderr.write(f"  {line}\n")
            return EXIT_ERROR
        print("s SATISFIABLE")
        arcs = "".join(f"{u} {v}\n" for u, v in outcome.report.arcs)
        if args.out:
            Path(args.out).write_text(arcs)
        else:
            sys.stdout.write("".join(f"a {line}" for line in arcs.splitlines(True)))
        if args.model:
            m = outcome.result.model
            base = [v if m[v] else -v for v in range(1, inst.base.var_count + 1)]
            Path(args.model).write_text("v " + " ".join(map(str, base + [0])) + "\n")
        return EXIT_SAT
    if status == UNSAT:
        print("s UNSATISFIABLE")
        return EXIT_UNSAT
    print("s UNKNOWN")
    return 0


def cmd_verify(args) -> int:
    inst = _load(args)
    model = parse_model(Path(args.model).read_bytes(), inst.base.var_count)
    report = verify(inst, model)
    for line in report.lines():
        print(line)
    print(f"arcs enabled: {len(report.arcs)}")
    return 0 if report.passed else EXIT_ERROR


def cmd_gen(args) -> int:
    if args.family == "grid-hc":
        if len(args.params) != 2:
            raise UsageError("gen grid-hc takes <rows> <cols>")
        rows, cols = (int(p) for p in args.params)
        inst = gen_grid_hc(GridSpec(rows, cols))
    else:
        if len(args.params) != 4:
            raise UsageError("gen random takes <n> <m> <kind> <seed>")
        n, m, kind, seed = args.params
        inst = gen_random(int(n), int(m), kind, int(seed))
    _write(args.out, write_gcnf(inst))
    return 0


def cmd_stats(args) -> int:
    inst = _load(args)
    print(json.dumps(run_stats(inst, args.order).to_dict(), indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elimcnf",
        description="Compile acyclicity and reachability constraints on graphs into CNF.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, method=True, order=True):
        p.add_argument("--in", dest="input", required=True, help="GCNF instance")
        if method:
            p.add_argument("--method", type=_method, default="ve",
                           help="ve | tc | tr | explicit | via-acyclic:{ve,tc,tr}")
        if order:
            p.add_argument("--order", type=_order, default="mindegree",
                           help="mindegree | minfill | given:<file>")

    p = sub.add_parser("encode", help="write base + constraint clauses as DIMACS")
    common(p)
    p.add_argument("--out", help="DIMACS output (default stdout)")
    p.add_argument("--map", help="JSON sidecar of auxiliary variables")
    p.add_argument("--stats", help="JSON statistics output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("solve", help="encode, solve and verify")
    common(p)
    p.add_argument("--solver", default="internal", help="internal | cmd:<template with {cnf}>")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--conflict-budget", type=int, default=None)
    p.add_argument("--out", help="write enabled arcs, one 'u v' per line")
    p.add_argument("--model", help="write the base-variable model as a v-line")
    p.add_argument("--stats", help="JSON statistics output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a model against the instance")
    common(p, method=False, order=False)
    p.add_argument("--model", required=True, help="model file (v-lines or literals)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate benchmark instances")
    p.add_argument("family", choices=["grid-hc", "random"])
    p.add_argument("params", nargs="+",
                   help="grid-hc: <rows> <cols>; random: <n> <m> <kind> <seed>")
    p.add_argument("--out", help="GCNF output (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("stats", help="ordering and elimination statistics, no encoding")
    common(p, method=False)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"elimcnf: error: {exc}\n")
        return EXIT_USAGE
    except (FormatError, MethodError, ExternalSolverError, ValueError, OSError) as exc:
        sys.stderr.write(f"elimcnf: error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
