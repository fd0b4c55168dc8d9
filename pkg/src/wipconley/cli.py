"""Command-line front end.

Exit codes: 0 pass, 1 check failed, 2 parse error, 3 undefined name,
4 hypothesis not met (e.g. the neighborhood does not isolate).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness
from .conley import conley_index
from .dynamics import inv, inv_plus, inv_minus, is_isolating, is_isolating_block, is_strongly_isolating
from .grid import GridError, SetSyntaxError
from .indexpair import PairError, build_pair, wip_from_block
from .mvmap import MapError
from .plot import plot_svg
from .problem import ProblemError, UndefinedName, load_problem, parse_problem

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_NAME, EXIT_HYPOTHESIS = 0, 1, 2, 3, 4
STATUS_EXIT = {harness.PASS: EXIT_OK, harness.FAIL: EXIT_FAIL, harness.HNM: EXIT_HYPOTHESIS}


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


def _load(path: str):
    p = Path(path)
    if not p.exists() and path in harness.SCENARIOS:
        return parse_problem(harness.scenario_text(path))
    if not p.exists():
        raise _Exit(EXIT_NAME, f"no such problem file or scenario: {path}")
    return load_problem(p)


def _setup(args):
    prob = _load(args.file)
    inst = prob.instance(args.resolution)
    fname = args.map or prob.default_map()
    f = inst.map(fname)
    return prob, inst, fname, f


def _neighborhood(args, prob, inst, fname):
    if not args.set:
        raise _Exit(EXIT_NAME, "--set is required")
    return inst.closed_set(args.set, prob.maps[fname].domain)


def _require_isolating(f, n):
    v = is_isolating(f, n)
    if not v:
        raise _Exit(EXIT_HYPOTHESIS, f"isolating: no (cell {v.witness}: {v.reason})")


def cmd_inv(args, out) -> int:
    prob, inst, fname, f = _setup(args)
    n = _neighborhood(args, prob, inst, fname)
    print(f"Inv+ = {inv_plus(f, n)}", file=out)
    print(f"Inv- = {inv_minus(f, n)}", file=out)
    print(f"Inv = {inv(f, n)}", file=out)
    return EXIT_OK


def _verdict_line(name, v) -> str:
    return f"{name}: yes" if v else f"{name}: no (cell {v.witness})"


def cmd_isolate(args, out) -> int:
    prob, inst, fname, f = _setup(args)
    n = _neighborhood(args, prob, inst, fname)
    verdicts = [("isolating", is_isolating(f, n))]
    if args.strong:
        verdicts.append(("strong", is_strongly_isolating(f, n)))
    if args.block:
        verdicts.append(("block", is_isolating_block(f, n)))
    for name, v in verdicts:
        print(_verdict_line(name, v), file=out)
    return EXIT_OK if all(v for _, v in verdicts) else EXIT_FAIL


def cmd_pair(args, out) -> int:
    prob, inst, fname, f = _setup(args)
    n = _neighborhood(args, prob, inst, fname)
    _require_isolating(f, n)
    if args.from_block:
        v = is_isolating_block(f, n)
        if not v:
            raise _Exit(EXIT_HYPOTHESIS, f"block: no (cell {v.witness})")
        pair = wip_from_block(f, n)
    else:
        pair = build_pair(f, n)
    if pair.grid != f.domain:
        print(f"resolution: {pair.grid.edge_bounds(1)[1] - pair.grid.edge_bounds(1)[0]}", file=out)
    print(f"P1 = {pair.p1}", file=out)
    print(f"P2 = {pair.p2}", file=out)
    for line in pair.report.lines():
        print(line, file=out)
    return EXIT_OK if pair.report.ok else EXIT_FAIL


def cmd_index(args, out) -> int:
    prob, inst, fname, f = _setup(args)
    n = _neighborhood(args, prob, inst, fname)
    _require_isolating(f, n)
    print(conley_index(f, n).index.render(), file=out)
    return EXIT_OK


def cmd_check(args, out) -> int:
    prob = _load(args.file)
    reports = harness.run_problem(prob, args.resolution, args.seed, args.suite)
    if args.suite == "wazewski" and not reports:
        reports = [harness.check_wazewski(args.seed if args.seed is not None else 0, args.count)]
    if not reports:
        raise _Exit(EXIT_NAME, f"no checks{' for suite ' + args.suite if args.suite else ''} in {args.file}")
    for r in reports:
        print(r.render(), file=out)
    status = harness.overall_status(reports)
    print(status, file=out)
    return STATUS_EXIT[status]


def cmd_plot(args, out) -> int:
    prob, inst, fname, f = _setup(args)
    overlays = []
    if args.set:
        n = _neighborhood(args, prob, inst, fname)
        s = inv(f, n)
        overlays = [("N", n, "#238b45"), ("S", s, "#cb181d"), ("F(S)", f.image(s), "#737373")]
    svg = plot_svg(f, overlays)
    if args.out:
        Path(args.out).write_text(svg, encoding="utf-8")
    else:
        out.write(svg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wipconley", description="Conley index of multivalued maps on 1-D grids.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, needs_set=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="problem file, or the name of a bundled scenario")
        p.add_argument("--map", help="map name (default: first self-map)")
        p.add_argument("--resolution", help="grid step, e.g. 1/4 (default: from the file)")
        if needs_set:
            p.add_argument("--set", help="name of a declared set, or set text such as '[2,5]'")
        p.set_defaults(func=func)
        return p

    add("inv", cmd_inv, "print the invariant parts of a set")
    p = add("isolate", cmd_isolate, "test isolation of a set")
    p.add_argument("--strong", action="store_true", help="also test strong isolation")
    p.add_argument("--block", action="store_true", help="also test the isolating block condition")
    p = add("pair", cmd_pair, "construct and verify a weak index pair")
    p.add_argument("--from-block", action="store_true", help="use the isolating block construction")
    add("index", cmd_index, "compute the Conley index")
    p = add("check", cmd_check, "run the checks declared in a scenario", needs_set=False)
    p.add_argument("--suite", choices=["additivity", "continuation", "commutativity", "wazewski", "nonisolation"])
    p.add_argument("--seed", type=int, help="seed for randomized suites")
    p.add_argument("--count", type=int, default=1000, help="instances for the wazewski suite")
    p = add("plot", cmd_plot, "write an SVG of the map graph")
    p.add_argument("--out", help="output path (default: stdout)")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except _Exit as exc:
        if str(exc):
            print(str(exc), file=sys.stderr if exc.code != EXIT_HYPOTHESIS else out)
        return exc.code
    except UndefinedName as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NAME
    except SetSyntaxError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ProblemError, GridError, MapError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PairError as exc:
        print(f"pair construction failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
