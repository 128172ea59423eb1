"""Command-line front end: ``blockmac solve | db | bench | profile``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import database
from .basis import BASES, ORDERS
from .errors import (
    DegreeCapExceeded,
    FormatError,
    MacaulayError,
    PositiveDimensionalAffine,
    RankAmbiguous,
    UnknownProblem,
    VersionError,
)
from .mlp import parse_problem
from .profile import FAIL, bench, performance_profile
from .realization import SolverOptions, solve

EXIT_CODES = [
    (VersionError, 5),
    (FormatError, 4),
    (UnknownProblem, 6),
    (RankAmbiguous, 7),
    (DegreeCapExceeded, 8),
    (PositiveDimensionalAffine, 9),
    (MacaulayError, 10),
    (OSError, 3),
]

BENCH_CONFIGS = {
    "column": dict(route="column", rank_mode="block", enlarge="iterative"),
    "null-row-iterative": dict(route="null", rank_mode="row", enlarge="iterative"),
    "null-block-iterative": dict(route="null", rank_mode="block", enlarge="iterative"),
    "null-block-recursive": dict(route="null", rank_mode="block", enlarge="recursive"),
    "null-block-recursive-posdim": dict(route="null", rank_mode="block", enlarge="recursive", posdim=True),
}


def _solver_flags(p):
    p.add_argument("--route", choices=["null", "column"], default="null")
    p.add_argument("--enlarge", choices=["iterative", "recursive"], default="recursive")
    p.add_argument("--rank", choices=["block", "row"], default="block")
    p.add_argument("--posdim", action="store_true")
    p.add_argument("--no-cluster", action="store_true")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--ctol", type=float, default=1e-6)
    p.add_argument("--maxdeg", type=int, default=25)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--basis", choices=BASES, default=None)
    p.add_argument("--order", choices=ORDERS, default="grevlex")


def options_from(args):
    return SolverOptions(
        route=args.route, enlarge=args.enlarge, rank_mode=args.rank, posdim=args.posdim,
        cluster=not args.no_cluster, tol=args.tol, ctol=args.ctol, maxdeg=args.maxdeg,
        seed=args.seed, basis_id=args.basis, order_id=args.order,
    )


def load(source):
    path = Path(source)
    if path.exists():
        return parse_problem(path.read_text(encoding="utf-8"))
    if source in database.DATABASE:
        return database.get(source)
    raise FileNotFoundError(f"no such file or database problem: {source}")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


def diagnostics_json(sol):
    diag = dict(sol.diagnostics)
    diag.pop("per_degree", None)
    return json.dumps(_jsonable({"degree": diag.get("final_degree"), **diag}), indent=2)


def per_degree_csv(sol):
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["d", "p", "q", "nullity", "increments", "gap"])
    for r in sol.diagnostics["per_degree"]:
        inc = " ".join(str(v) for v in r["increments"]) if r["increments"] else ""
        w.writerow([r["d"], r["p"], r["q"], r["nullity"], inc, int(r["gap"])])
    return out.getvalue()


def cmd_solve(args):
    problem = load(args.file)
    sol = solve(problem, options_from(args))
    text = sol.to_csv()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        Path(args.out + ".json").write_text(diagnostics_json(sol) + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.diag:
        Path(args.diag).write_text(diagnostics_json(sol) + "\n", encoding="utf-8")
    if args.verbose:
        sys.stderr.write(per_degree_csv(sol))
    return 0


def cmd_db(args):
    if args.action == "list":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["name", "kind", "s", "k", "l", "d", "m", "m_b", "m_a"])
        for name in database.names():
            info = database.show(name)
            w.writerow([name, info["kind"], info.get("s", 1), info["k"], info["l"], info["d"], info["m"],
                        info["m_b"] if info["m_b"] is not None else "", info["m_a"] if info["m_a"] is not None else ""])
        return 0
    if not args.name:
        raise UnknownProblem(f"db {args.action} needs a problem name")
    if args.action == "show":
        for key, val in database.show(args.name).items():
            print(f"{key}: {'' if val is None else val}")
        return 0
    text = database.export(args.name)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _table_csv(names, labels, table):
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["problem"] + labels)
    for name, row in zip(names, table):
        w.writerow([name] + ["FAIL" if not np.isfinite(v) else f"{v:.6g}" for v in row])
    return out.getvalue()


def cmd_bench(args):
    names = args.problems.split(",")
    problems = {n: load(n) for n in names}
    labels = args.configs.split(",")
    base = options_from(args)
    configs = {}
    for label in labels:
        if label not in BENCH_CONFIGS:
            raise ValueError(f"unknown configuration {label!r}; choose from {', '.join(BENCH_CONFIGS)}")
        opts = SolverOptions(**{**vars(base), **BENCH_CONFIGS[label]})
        configs[label] = opts
    times, rel, prof = bench(problems, configs, timeout=args.timeout, parallel=args.parallel)
    raw = _table_csv(names, labels, times)
    relative = _table_csv(names, labels, rel)
    if args.out:
        Path(args.out).write_text(prof.to_csv(), encoding="utf-8")
        Path(args.out + ".times.csv").write_text(raw, encoding="utf-8")
        Path(args.out + ".relative.csv").write_text(relative, encoding="utf-8")
    else:
        sys.stdout.write(raw + "\n" + relative + "\n" + prof.to_csv())
    return 0


def read_times(text):
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], [r for r in rows[1:] if r]
    solvers = header[1:]
    times = [[FAIL if c.strip().upper() == "FAIL" else float(c) for c in r[1:]] for r in body]
    return solvers, np.array(times, dtype=float)


def cmd_profile(args):
    solvers, times = read_times(Path(args.times).read_text(encoding="utf-8"))
    prof = performance_profile(times, solvers, tau_max=args.tau_max)
    text = prof.to_csv()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def make_parser():
    parser = argparse.ArgumentParser(prog="blockmac", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an MLP file or database problem")
    p.add_argument("file")
    _solver_flags(p)
    p.add_argument("--out")
    p.add_argument("--diag", help="write the diagnostics JSON here")
    p.add_argument("--verbose", action="store_true", help="per-degree table on stderr")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("db", help="inspect the embedded problem database")
    p.add_argument("action", choices=["list", "show", "export"])
    p.add_argument("name", nargs="?")
    p.add_argument("--out")
    p.set_defaults(func=cmd_db)

    p = sub.add_parser("bench", help="time solver configurations")
    p.add_argument("--problems", default="noon3,conics,mep_random_3x2")
    p.add_argument("--configs", default=",".join(BENCH_CONFIGS))
    _solver_flags(p)
    p.add_argument("--timeout", type=float, default=300.0)
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("profile", help="performance profile from a time table CSV")
    p.add_argument("times")
    p.add_argument("--tau-max", type=float, default=64.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_profile)
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Exception as exc:
        for cls, code in EXIT_CODES:
            if isinstance(exc, cls):
                print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
                return code
        if isinstance(exc, ValueError):
            print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
            return 2
        raise


if __name__ == "__main__":
    sys.exit(main())
