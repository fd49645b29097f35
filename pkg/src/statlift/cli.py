"""Command-line front end.

Subcommands: ``model``, ``lift``, ``induce`` and ``check``.  Exit codes:
0 success, 2 parse or usage error, 3 domain error, 4 failed check.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .contrast import induced_connection, induced_dual_connection, induced_metric, induced_skewness
from .expr import ParseError
from .geometry import DegenerateError
from .lifting import lift_connection, lift_covariant_tensor
from .modelfile import BUILTIN_TARGETS, resolve_target
from .models import NormalizationError
from .serialize import document, render
from .series import DomainError
from .verify import DEFAULT_COUNTS, DEFAULT_TARGETS, SUITES, run_suite, scorecard, scorecard_json

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_CHECK = 0, 2, 3, 4


class UsageError(ValueError):
    pass


def _floats(text: str, flag: str):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated numbers, got {text!r}") from None


def _ints(text: str, flag: str):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated integers, got {text!r}") from None


def _target(args, default=None):
    name, path = args.name, args.file
    if name is None and path is None:
        if default is None:
            raise UsageError("give --name or --file")
        name = default
    if name is not None and path is not None:
        raise UsageError("give only one of --name and --file")
    if name is not None and name not in BUILTIN_TARGETS:
        raise UsageError(f"unknown model {name!r}; built-in models are {', '.join(BUILTIN_TARGETS)}")
    return resolve_target(name, path, args.nodes, args.window)


def _points(chart, given, args, flag):
    extra = {}
    if given:
        pts = np.array([_floats(p, flag) for p in given])
        if pts.shape[-1] != chart.dim:
            raise UsageError(f"{flag} needs {chart.dim} coordinates {list(chart.names)}, got {pts.shape[-1]}")
        chart.check(pts)
    else:
        pts = chart.sample(args.count, args.seed)
        extra = {"seed": args.seed, "count": args.count}
    return pts, extra


def _evaluate(fields: dict, pts):
    values = {name: f.at(pts) for name, f in fields.items()}
    return [(p, {name: (fields[name], values[name][k]) for name in fields}) for k, p in enumerate(pts)]


def _emit(text: str, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_model(args) -> int:
    t = _target(args)
    if args.jet:
        raise UsageError("model evaluates on the base; use --point")
    s = t.structure
    pts, extra = _points(s.chart, args.point, args, "--point")
    fields = {
        "metric": s.g,
        "skewness": s.T,
        "levi_civita": s.levi_civita(),
        "connection": s.alpha_connection(1.0),
        "dual_connection": s.alpha_connection(-1.0),
    }
    _emit(render(document("model", t.name, s.chart, _evaluate(fields, pts), extra), args.format), args.out)
    return EXIT_OK


def cmd_lift(args) -> int:
    t = _target(args)
    if args.point:
        raise UsageError("lift evaluates on T^r M; use --jet")
    r = args.r[0] if args.r else 1
    if len(args.r or [1]) != 1 or r < 1:
        raise UsageError("lift needs a single order --r >= 1")
    s = t.structure
    tc = s.chart.tangent(r)
    pts, extra = _points(tc, args.jet, args, "--jet")
    fields = {
        "metric": lift_covariant_tensor(s.g, r, r),
        "skewness": lift_covariant_tensor(s.T, r, r),
        "levi_civita": lift_connection(s.levi_civita(), r),
        "connection": lift_connection(s.alpha_connection(1.0), r),
        "dual_connection": lift_connection(s.alpha_connection(-1.0), r),
    }
    extra["r"] = r
    _emit(render(document("lift", t.name, tc, _evaluate(fields, pts), extra), args.format), args.out)
    return EXIT_OK


def cmd_induce(args) -> int:
    t = _target(args)
    if t.contrast is None:
        raise UsageError(f"model {t.name!r} has no contrast function")
    if args.jet:
        raise UsageError("induce evaluates on the base; use --point")
    F = t.contrast
    pts, extra = _points(F.chart, args.point, args, "--point")
    fields = {
        "metric": induced_metric(F),
        "connection": induced_connection(F),
        "dual_connection": induced_dual_connection(F),
        "skewness": induced_skewness(F),
    }
    _emit(render(document("induce", t.name, F.chart, _evaluate(fields, pts), extra), args.format), args.out)
    return EXIT_OK


def _scorecard_csv(card: dict) -> str:
    rows = ["check_id,passed,max_defect,tolerance,scale,points,seed"]
    for c in card["checks"]:
        rows.append(
            f"{c['check_id']},{str(c['passed']).lower()},{c['max_defect']!r},{c['tolerance']!r},"
            f"{c['scale']!r},{c['points']},{c['seed']}"
        )
    return "\n".join(rows) + "\n"


def cmd_check(args) -> int:
    if args.suite is None:
        raise UsageError(f"check needs --suite (one of {', '.join(SUITES)})")
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; expected one of {', '.join(SUITES)}")
    t = _target(args, DEFAULT_TARGETS[args.suite])
    r_values = tuple(args.r) if args.r else (1,)
    count = DEFAULT_COUNTS[args.suite] if args.count_given is None else args.count_given
    nodes = 200 if args.nodes is None else args.nodes
    window = 12.0 if args.window is None else args.window
    results = run_suite(args.suite, t, r_values, args.seed, count, nodes, window)
    card = scorecard(args.suite, t.name, results, args.seed, r_values, count, nodes, window)
    text = scorecard_json(card) if args.format == "json" else _scorecard_csv(card)
    _emit(text, args.out)
    return EXIT_OK if all(c.passed for c in results) else EXIT_CHECK


COMMANDS = {"model": cmd_model, "lift": cmd_lift, "induce": cmd_induce, "check": cmd_check}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--name", help=f"built-in model ({', '.join(BUILTIN_TARGETS)})")
    common.add_argument("--file", help="model definition file")
    common.add_argument("--r", type=lambda s: _ints(s, "--r"), help="lift order(s), comma-separated")
    common.add_argument("--point", action="append", help="base point 'x1,x2,...' (repeatable)")
    common.add_argument("--jet", action="append", help="point of T^r M, λ-major 'x_0...,x_1...,' (repeatable)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled points (default 0)")
    common.add_argument("--count", type=int, default=None, help="number of sampled points")
    common.add_argument("--nodes", type=int, default=None, help="quadrature nodes (default 200)")
    common.add_argument("--window", type=float, default=None, help="quadrature half-width in scale units (default 12)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--suite", help=f"verification suite ({', '.join(SUITES)})")
    parser = argparse.ArgumentParser(prog="statlift", description="Statistical manifolds and their tangent lifts.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("model", parents=[common], help="structure of a model at base points")
    sub.add_parser("lift", parents=[common], help="lifted structure at points of T^r M")
    sub.add_parser("induce", parents=[common], help="structure induced by a contrast function")
    sub.add_parser("check", parents=[common], help="run a verification suite")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.count_given = args.count
    if args.count is None:
        args.count = 1
    if args.count < 1:
        parser.error("--count must be positive")
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"statlift: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UsageError as exc:
        print(f"statlift: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DomainError, DegenerateError, NormalizationError) as exc:
        point = getattr(exc, "point", None)
        where = f" at point {np.asarray(point).tolist()}" if isinstance(exc, DegenerateError) and point is not None else ""
        print(f"statlift: domain error: {exc}{where}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"statlift: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
