"""Command-line front end.

Exit codes for ``verify``: 0 Safe, 10 Unsafe, 20 Unknown, 2 input error.
Every numeric flag can also be set through an ``FCMTREE_<FLAG>`` environment
variable (for example ``FCMTREE_K_MAX=6``); explicit flags win.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from .encode import PtsProblem
from .finder import FinderConfig, InputError, Safe, Unsafe, encode, verify
from .fol import FolError, check_model, format_model, goal_holds, parse_model
from .ladr import emit_ladr
from .oracle import format_trace, search
from .grounding import ResourceLimit
from .problems import ProblemError, load_problem
from .trees import format_tree

EXIT = {"Safe": 0, "Unsafe": 10, "Unknown": 20}
INPUT_ERROR = 2
ENV_PREFIX = "FCMTREE_"


def _env(name, cast, default):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise SystemExit(f"error: {ENV_PREFIX}{name}={raw!r} is not a valid {cast.__name__}")


def _add_search_flags(sp):
    sp.add_argument("--seed", type=int, default=_env("SEED", int, 0))
    sp.add_argument("--k-max", type=int, default=_env("K_MAX", int, 8))
    sp.add_argument("--time-budget", type=float, default=_env("TIME_BUDGET", float, 120.0))
    sp.add_argument("--oracle-bound", type=int, default=_env("ORACLE_BOUND", int, 7))
    sp.add_argument("--json", action="store_true", help="machine-readable report")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fcmtree", description="Safety verification by finite countermodels")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", help="decide safety of a problem file")
    sp.add_argument("file")
    _add_search_flags(sp)

    sp = sub.add_parser("emit", help="print the encoded theory as LADR text")
    sp.add_argument("file")

    sp = sub.add_parser("oracle", help="bounded explicit-state search for an unsafe trace")
    sp.add_argument("file")
    sp.add_argument("--bound", type=int, default=_env("ORACLE_BOUND", int, 7))
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("check-model", help="check a printed model against a problem's theory")
    sp.add_argument("file")
    sp.add_argument("model")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("bench", help="verify every problem file in a directory")
    sp.add_argument("dir")
    _add_search_flags(sp)
    return ap


def _config(args) -> FinderConfig:
    return FinderConfig(k_max=args.k_max, time_budget=args.time_budget, seed=args.seed)


def report_of(verdict) -> dict:
    out = {"verdict": verdict.name, "stats": verdict.stats}
    if isinstance(verdict, Safe):
        out["k"] = verdict.k
        out["model"] = format_model(verdict.model)
    elif isinstance(verdict, Unsafe):
        out["trace"] = [format_tree(t) for t in verdict.trace]
    else:
        out["reason"] = verdict.reason
    return out


def cmd_verify(args, out) -> int:
    problem = load_problem(args.file)
    verdict = verify(problem, _config(args), oracle_bound=args.oracle_bound)
    rep = report_of(verdict)
    rep["problem"] = args.file
    if args.json:
        print(json.dumps(rep, indent=2, sort_keys=True), file=out)
    else:
        st = verdict.stats
        print(f"{verdict.name}  ({st['elapsed']:.2f}s)", file=out)
        if isinstance(verdict, Safe):
            print(f"countermodel of size {verdict.k} ({st.get('ground_clauses')} ground clauses)", file=out)
            print(rep["model"], file=out)
        elif isinstance(verdict, Unsafe):
            print(format_trace(verdict.trace), file=out)
        else:
            print(f"no model up to size {args.k_max} ({verdict.reason}); "
                  f"no unsafe trace within {args.oracle_bound} nodes", file=out)
    return EXIT[verdict.name]


def cmd_emit(args, out) -> int:
    problem = load_problem(args.file)
    th = encode(problem)
    comments = [problem.name] if problem.name else []
    comments += list(problem.notes)
    print(emit_ladr(th, comments), end="", file=out)
    return 0


def cmd_oracle(args, out) -> int:
    problem = load_problem(args.file)
    if args.bound < 1:
        raise InputError("--bound must be at least 1")
    t0 = time.monotonic()
    rs, trace = search(problem, args.bound)
    elapsed = time.monotonic() - t0
    if args.json:
        rep = {"bound": args.bound, "elapsed": elapsed,
               "trace": None if trace is None else [format_tree(t) for t in trace]}
        if trace is None:
            rep["visited"] = len(rs)
            rep["initial"] = len(rs.initial)
        print(json.dumps(rep, indent=2), file=out)
    elif trace is None:
        unit = "configuration" if isinstance(problem, PtsProblem) else "tree"
        print(f"no unsafe reachable; {len(rs)} {unit}s visited from {len(rs.initial)} initial ones; "
              f"shapes up to {args.bound} nodes fully explored ({elapsed:.2f}s)", file=out)
    else:
        print(format_trace(trace), file=out)
    return 0 if trace is None else EXIT["Unsafe"]


def cmd_check_model(args, out) -> int:
    problem = load_problem(args.file)
    th = encode(problem)
    m = parse_model(Path(args.model).read_text())
    report = check_model(m, th)
    goal = goal_holds(m, th)
    ok = report.satisfied and not goal
    if args.json:
        print(json.dumps({"ok": ok, "clauses_satisfied": report.satisfied, "goal_holds": goal,
                          "violations": [str(v) for v in report.violations]}, indent=2), file=out)
    else:
        if report.satisfied:
            print("all clauses satisfied", file=out)
        else:
            print(f"{len(report.violations)} violated clause instances, for example:", file=out)
            for v in report.violations[:5]:
                print(f"  {v}", file=out)
        print("goal falsified" if not goal else "goal holds: not a countermodel", file=out)
    return 0 if ok else 1


def bench_rows(directory, cfg: FinderConfig, oracle_bound: int) -> list:
    rows = []
    for path in sorted(Path(directory).glob("*.json")):
        t0 = time.monotonic()
        try:
            v = verify(load_problem(path), cfg, oracle_bound=oracle_bound)
            rows.append({"problem": path.stem, "verdict": v.name, "k": getattr(v, "k", None),
                         "time": time.monotonic() - t0})
        except (ProblemError, InputError, FolError) as exc:
            rows.append({"problem": path.stem, "verdict": "error", "k": None,
                         "time": time.monotonic() - t0, "error": str(exc)})
    return rows


def cmd_bench(args, out) -> int:
    if not Path(args.dir).is_dir():
        raise InputError(f"{args.dir}: not a directory")
    rows = bench_rows(args.dir, _config(args), args.oracle_bound)
    if args.json:
        print(json.dumps(rows, indent=2), file=out)
        return 0
    width = max([len("Problem")] + [len(r["problem"]) for r in rows])
    print(f"{'Problem':<{width}}  {'Verdict':<8} {'k':>3} {'Time (s)':>9}", file=out)
    for r in rows:
        k = "-" if r["k"] is None else str(r["k"])
        print(f"{r['problem']:<{width}}  {r['verdict']:<8} {k:>3} {r['time']:>9.2f}", file=out)
        if "error" in r:
            print(f"  {r['error']}", file=out)
    return 0


COMMANDS = {"verify": cmd_verify, "emit": cmd_emit, "oracle": cmd_oracle,
            "check-model": cmd_check_model, "bench": cmd_bench}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except (ProblemError, InputError, FolError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT["Unknown"]


if __name__ == "__main__":
    sys.exit(main())
