"""Command-line front end.

Exit status: 0 on success, 2 when the input cannot be analyzed (syntax
errors, unsupported guards, missing ranges, overflow, too many tuples), 64
on usage errors and 70 when a checked invariant is broken.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import fp
from .analysis import analyze, analyze_let_env, parse_ranges
from .differential import differential_check
from .errors import FpGuardError
from .fp import FORMATS
from .interp import AssignmentPair, classify_run
from .lang import FloatConst, FloatOp, FloatVar, Warn, guards, let_bindings, relations, walk
from .polygon import ExperimentConfig, Polygon, run_experiment
from .semantics import DEFAULT_CAP, semantics
from .syntax import (
    format_float, format_rational, parse_program, parse_rational, print_arith, print_bool,
    print_program, to_json,
)
from .transform import transform_program, unreachable_branches

EX_OK = 0
EX_ANALYSIS = 2
EX_USAGE = 64
EX_INTERNAL = 70


class UsageError(Exception):
    pass


class InvariantBroken(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(args):
    fmt = FORMATS[args.format]
    return parse_program(_read(args.program), fmt), fmt


def _ranges(args):
    if not args.ranges:
        raise UsageError("--ranges is required for this command")
    return parse_ranges(_read(args.ranges))


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- subcommands --------------------------------------------------------------

def cmd_parse(args) -> int:
    p, fmt = _load(args)
    _emit(_json(to_json(p, fmt)), args.output)
    return EX_OK


def cmd_print(args) -> int:
    p, fmt = _load(args)
    _emit(print_program(p, fmt), args.output)
    return EX_OK


def cmd_analyze(args) -> int:
    p, fmt = _load(args)
    ranges = parse_ranges(_read(args.ranges)) if args.ranges else None
    tuples = semantics(p.body, ranges=ranges, fmt=fmt, cap=args.cap)

    def show(x):
        return "warning" if isinstance(x, Warn) else print_arith(x, fmt)

    rows = [{"real_cond": print_bool(c.real_cond, fmt), "float_cond": print_bool(c.float_cond, fmt),
             "real_out": show(c.real_out), "float_out": show(c.float_out),
             "flag": c.flag} for c in tuples]
    _emit(_json(rows), args.output)
    return EX_OK


def _error_row(e, ranges, fmt, lets):
    b = analyze(e, ranges, fmt, lets)
    return {"expr": print_arith(e, fmt), "error": format_float(fp.round_up(b.error, fmt), fmt),
            "error_exact": format_rational(b.error),
            "real_range": [format_rational(b.real.lo), format_rational(b.real.hi)]}


def cmd_error(args) -> int:
    p, fmt = _load(args)
    ranges = _ranges(args)
    lets = analyze_let_env(let_bindings(p.body), ranges, fmt)
    rows = {"lets": {}, "atoms": [], "outputs": []}
    for name, expr in let_bindings(p.body):
        rows["lets"][name] = _error_row(expr, ranges, fmt, lets)
    seen = set()
    for g in guards(p.body):
        for rel in relations(g):
            for side in (rel.lhs, rel.rhs):
                if not isinstance(side, FloatConst) and side not in seen:
                    seen.add(side)
                    rows["atoms"].append(_error_row(side, ranges, fmt, lets))
    for node in walk(p.body):
        if isinstance(node, (FloatOp, FloatVar)) and node not in seen:
            seen.add(node)
            rows["outputs"].append(_error_row(node, ranges, fmt, lets))
    _emit(_json(rows), args.output)
    return EX_OK


def cmd_transform(args) -> int:
    p, fmt = _load(args)
    ranges = _ranges(args)
    t = transform_program(p, ranges, fmt)
    _emit(print_program(t, fmt), args.output)
    for ref in unreachable_branches(t, ranges, fmt):
        print(f"note: branch {ref.branch} of conditional {ref.conditional} can never be taken",
              file=sys.stderr)
    return EX_OK


def _parse_input(text: str, fmt):
    values = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"expected name=value, got {item!r}")
        try:
            values[name.strip()] = parse_rational(value.strip())
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"not a number: {value.strip()!r}") from None
    return AssignmentPair.from_values(values, fmt)


def cmd_run(args) -> int:
    p, fmt = _load(args)
    if args.input is None:
        raise UsageError("--input is required for run")
    pair = _parse_input(args.input, fmt)
    try:
        report = classify_run(p, pair, fmt)
    except KeyError as exc:
        raise UsageError(str(exc).strip("'\"")) from None

    def show(out):
        if isinstance(out, Warn):
            return "warning"
        return format_float(out, fmt) if isinstance(out, fp.Float) else format_rational(out)

    _emit(_json({
        "float_output": show(report.float_output),
        "real_output": show(report.real_output),
        "float_path": list(report.float_path),
        "real_path": list(report.real_path),
        "classification": report.classification,
    }), args.output)
    return EX_OK


def cmd_check(args) -> int:
    p, fmt = _load(args)
    ranges = _ranges(args)
    report = differential_check(p, ranges, args.trials, args.seed, fmt)
    _emit(report.summary() + "\n", args.output)
    if report.violations:
        raise InvariantBroken(f"{report.violations} violations; first inputs: {report.examples}")
    return EX_OK


def cmd_experiment(args) -> int:
    fmt = FORMATS[args.format]
    text = _read(args.polygon) if args.polygon else None
    if text is None:
        from .corpus import polygon_text
        text = polygon_text()
    try:
        poly = Polygon.from_json(text, fmt)
        cfg = ExperimentConfig(poly, args.points, tuple(args.distances), args.seed, args.format)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None
    report = run_experiment(cfg)
    _emit(report.to_json() + "\n", args.output)
    if any(b.unsound for b in report.bands):
        raise InvariantBroken("a transformed verdict disagreed with the real verdict")
    return EX_OK


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=sorted(FORMATS), default="double",
                        help="floating-point format (default: double)")
    common.add_argument("-o", "--output", help="write the result to this file")
    common.add_argument("--seed", type=int, default=0, help="random seed")

    parser = _Parser(prog="fpguard", description="Detect and guard unstable float conditionals.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_, program=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if program:
            sp.add_argument("program", help=".sfp program file")
        sp.set_defaults(func=func)
        return sp

    add("parse", cmd_parse, "print the syntax tree as JSON")
    add("print", cmd_print, "pretty-print a program")
    sp = add("analyze", cmd_analyze, "list the conditional tuples as JSON")
    sp.add_argument("--ranges", help="input ranges (used to prune infeasible tuples)")
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP, help="maximum number of tuples")
    sp = add("error", cmd_error, "round-off error bounds of guards and outputs")
    sp.add_argument("--ranges", required=True)
    sp = add("transform", cmd_transform, "guard unstable conditionals with warnings")
    sp.add_argument("--ranges", required=True)
    sp = add("run", cmd_run, "run the float and real semantics on one input")
    sp.add_argument("--input", required=True, help="comma-separated name=value list")
    sp = add("check", cmd_check, "differential check against the transformed program")
    sp.add_argument("--ranges", required=True)
    sp.add_argument("--trials", type=int, default=10_000)
    sp = add("experiment", cmd_experiment, "near-edge point-in-polygon experiment", program=False)
    sp.add_argument("--polygon", help="polygon JSON (default: the bundled hexagon)")
    sp.add_argument("--points", type=int, default=10_000, help="points per distance band")
    sp.add_argument("--distances", type=float, nargs="+", default=[1.0, 1e-8, 1e-10, 1e-12],
                    help="distance bands relative to the polygon scale")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "trials", 1) <= 0 or getattr(args, "cap", 1) <= 0:
            raise UsageError("--trials and --cap must be positive")
        return args.func(args)
    except UsageError as exc:
        print(f"fpguard: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except FpGuardError as exc:
        print(f"fpguard: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EX_ANALYSIS
    except InvariantBroken as exc:
        print(f"fpguard: invariant broken: {exc}", file=sys.stderr)
        return EX_INTERNAL
    except SystemExit as exc:
        # --help and friends
        return exc.code if isinstance(exc.code, int) else EX_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"fpguard: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EX_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
