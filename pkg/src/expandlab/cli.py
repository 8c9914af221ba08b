"""Command-line front end: ``expandlab {eval,verify,trace,search}``.

Exit status is 0 on success, 1 when a verify row FAILs or errors, and 2 when
the command itself cannot run (bad input, budget exhausted, missing file).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import bounds, expanders, search, slopes
from .errors import ExpandLabError, MissingInput, ParseError
from .expr import evaluate, names, parse, to_text
from .finset import Budget, FiniteSet, dump_set, load_set, set_workers
from .numeric import format_scalar, parse_scalar

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
DEFAULT_SEED = 0


def _jsonable(value):
    if isinstance(value, Fraction):
        return format_scalar(value)
    if isinstance(value, FiniteSet):
        return [format_scalar(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _interval(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(part) for part in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer interval a..b, got {text!r}") from None
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty interval {text!r}")
    return lo, hi


def _binding(text: str) -> tuple[str, str]:
    name, sep, value = text.partition("=")
    if not sep or not name.isidentifier():
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    return name, value


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--budget", type=int, help="max distinct elements per intermediate set")
    g.add_argument("--threads", type=int, default=1, help="worker threads for set arithmetic")
    g.add_argument("--format", choices=("json", "csv", "text"), default="text")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED)
    g.add_argument("--set", dest="sets", action="append", type=_binding, default=[],
                   metavar="NAME=FILE", help="bind a set name to a set file (repeatable)")
    g.add_argument("--family", action="append", default=[], metavar="[NAME=]SPEC",
                   help="bind a generated family, e.g. ap:1:1:10 (binds A by default)")
    g.add_argument("--dump", metavar="FILE", help="write the resulting set to FILE")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="expandlab", description="Exact sum-product set computations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="cardinality of a set expression")
    p.add_argument("expr")

    p = sub.add_parser("verify", parents=[common], help="run a bound suite")
    p.add_argument("suite", choices=("exact", "asymptotic", "all"))
    p.add_argument("--k", type=int, default=2, help="k for PLUNNECKE")
    p.add_argument("--l", type=int, default=2, help="l for PLUNNECKE")
    p.add_argument("--alpha", default="1", help="shift for GS, GS1, GS2, JORN")
    p.add_argument("--f", default="reciprocal", choices=bounds.ENR_PRESETS, help="convex function for ENR")

    p = sub.add_parser("trace", parents=[common], help="JSON trace of a proof construction")
    p.add_argument("kind", choices=("thm1", "thm2-chain", "kfold", "slopes"))
    p.add_argument("--k", type=int, help="chain length (thm2-chain: 2, kfold: 3)")
    p.add_argument("--C", default="1", help="absolute constant for the slope trace")
    p.add_argument("--M", type=int, help="override the cluster half-size")
    p.add_argument("--all-clusters", action="store_true")
    p.add_argument("--target", action="store_true", help="also compute |(AA+A)/(AA+A)|")

    p = sub.add_parser("search", parents=[common], help="minimise |expr| over m-sets")
    p.add_argument("mode", choices=("exhaustive", "local"))
    p.add_argument("expr")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--universe", type=_interval, help="exhaustive: integers a..b")
    p.add_argument("--range", dest="range_", type=_interval, help="local: integers a..b")
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--restarts", type=int, default=4)
    return parser


def _environment(args) -> dict:
    env = {}
    for name, path in args.sets:
        env[name] = load_set(path)
    for text in args.family:
        name, sep, spec = text.partition("=")
        if not sep:
            name, spec = "A", text
        env[name] = search.generate(search.parse_family(spec))
    return env


def _budget(args) -> Budget:
    if args.budget is not None:
        return Budget(args.budget)
    return Budget.from_env()


# ---------------------------------------------------------------- rendering


def _render_record(record: dict, fmt: str) -> str:
    data = _jsonable(record)
    if fmt == "json":
        return json.dumps(data, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["field", "value"])
        for k, v in data.items():
            w.writerow([k, v if isinstance(v, (str, int, float, bool)) or v is None else json.dumps(v)])
        return buf.getvalue()
    lines = []
    for k, v in data.items():
        text = v if isinstance(v, str) else json.dumps(v)
        lines.append(f"{k}: {text}")
    return "\n".join(lines) + "\n"


def _render_rows(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    table = [list(bounds.CSV_FIELDS)] + [[str(r[f]) for f in bounds.CSV_FIELDS] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(table)
        return buf.getvalue()
    widths = [max(len(row[i]) for row in table) for i in range(len(bounds.CSV_FIELDS))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n" for row in table)


# ---------------------------------------------------------------- commands


def cmd_eval(args, env, budget, out) -> int:
    node = parse(args.expr)
    result = evaluate(node, env, budget)
    if args.dump:
        dump_set(result, args.dump)
    out.write(_render_record({"expr": to_text(node), "cardinality": len(result)}, args.format))
    return EXIT_OK


def _row_from_report(report: bounds.BoundReport) -> dict:
    return {"bound_id": report.bound_id, "lhs": report.lhs_cardinality, "rhs": report.rhs_text(),
            "ratio": repr(report.ratio), "verdict": report.verdict.value, "input": report.inputs_digest}


def _error_row(bound_id: str, exc: Exception) -> dict:
    return {"bound_id": bound_id, "lhs": "", "rhs": "", "ratio": "", "verdict": "ERROR",
            "input": f"{type(exc).__name__}: {exc}"}


def cmd_verify(args, env, budget, out) -> int:
    if "A" not in env:
        raise MissingInput("verify needs a set A (use --set A=FILE or --family SPEC)")
    sets = dict(env)
    for name in ("B", "C", "X", "Y", "Z"):
        sets.setdefault(name, env["A"])
    rows = []
    if args.suite in ("exact", "all"):
        for bid in bounds.EXACT_BOUNDS:
            try:
                rows.append(_row_from_report(
                    bounds.check_exact(bid, sets, k=args.k, l=args.l, budget=budget)))
            except ExpandLabError as exc:
                rows.append(_error_row(bid, exc))
    if args.suite in ("asymptotic", "all"):
        for bid in bounds.ASYMPTOTIC_BOUNDS:
            try:
                rows.append(_row_from_report(
                    bounds.report_asymptotic(bid, sets, alpha=args.alpha, f=args.f, budget=budget)))
            except (ExpandLabError, ValueError) as exc:
                rows.append(_error_row(bid, exc))
    out.write(_render_rows(rows, args.format))
    return EXIT_FAIL if any(r["verdict"] in ("FAIL", "ERROR") for r in rows) else EXIT_OK


def cmd_trace(args, env, budget, out) -> int:
    if "A" not in env:
        raise MissingInput("trace needs a set A (use --set A=FILE or --family SPEC)")
    A = env["A"]
    if args.kind == "thm1":
        record = expanders.theorem1_trace(A, budget)
    elif args.kind == "thm2-chain":
        record = expanders.theorem2_chain(A, 2 if args.k is None else args.k, budget).to_dict()
    elif args.kind == "kfold":
        record = expanders.kfold_difference_growth(A, 3 if args.k is None else args.k, budget).to_dict()
    else:
        record = slopes.cluster_trace(A, C=parse_scalar(args.C), seed=args.seed, budget=budget, M=args.M,
                                      all_clusters=args.all_clusters, compute_target=args.target)
    out.write(_render_record(record, args.format))
    return EXIT_OK


def cmd_search(args, env, budget, out) -> int:
    node = parse(args.expr)
    extra = names(node) - {"A"}
    if extra:
        raise ParseError(f"search expressions may only use A, found {sorted(extra)}", None, ("A",))
    if args.mode == "exhaustive":
        if args.universe is None:
            raise ParseError("exhaustive search needs --universe a..b", None, ())
        lo, hi = args.universe
        result = search.exhaustive_min(node, args.m, FiniteSet(range(lo, hi + 1)), budget)
    else:
        if args.range_ is None:
            raise ParseError("local search needs --range a..b", None, ())
        lo, hi = args.range_
        result = search.local_search_min(node, args.m, lo, hi, args.iters, args.restarts, args.seed, budget)
    if args.dump:
        dump_set(result.best_set, args.dump)
    out.write(_render_record(result.to_dict(), args.format))
    return EXIT_OK


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "trace": cmd_trace, "search": cmd_search}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        set_workers(args.threads)
        budget = _budget(args)
        env = _environment(args)
        return COMMANDS[args.command](args, env, budget, out)
    except (ExpandLabError, OSError, ValueError) as exc:
        err.write(f"expandlab: error: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR
    finally:
        set_workers(1)


if __name__ == "__main__":
    sys.exit(main())
