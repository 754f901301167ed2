"""Command-line front end.

    powsum check NAME [--n-min N] [--n-max N] [--r a/b,...] [--alpha a/b,...]
                      [--rprime a/b,...] [--mode exact|interval]
                      [--precision-start BITS] [--precision-max BITS]
                      [--format json|csv] [--out PATH]
    powsum replay --n N --r a/b --alpha a/b [--mode ...] [--json]
    powsum scan problem1 --n-max N --r ... --rprime ... [--upto-corollary]
    powsum report --format json|csv --out PATH [--in PATH]

Exit codes: 0 all hold, 1 at least one failure, 2 indeterminate results
but no failure, 64 usage error, 74 I/O error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

from .checks import CHECKS
from .engine import replay_theorem1
from .kernel import Outcome, PrecisionPolicy, PowsumError, UsageError
from .report import (
    EXIT_FAILS, EXIT_INDETERMINATE, EXIT_IO, EXIT_OK, EXIT_USAGE, GridSpec, emit_report,
    exit_code, format_value, report_from_dict, run_campaign,
)

_RATIONAL = re.compile(r"^[+-]?\d+(/[+-]?\d+)?$")


class _UsageExit(Exception):
    def __init__(self, message: str, usage: str = ""):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageExit(message, self.format_usage())


def rational(text: str) -> Fraction:
    """``p/q`` or an integer; decimals are rejected."""
    text = text.strip()
    if not _RATIONAL.match(text):
        raise argparse.ArgumentTypeError(f"not an exact rational (use p/q): {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise argparse.ArgumentTypeError(f"zero denominator: {text!r}") from None


def rational_list(text: str) -> tuple:
    items = [t for t in text.split(",") if t.strip()]
    return tuple(rational(t) for t in items)


def _add_policy(p: argparse.ArgumentParser) -> None:
    p.add_argument("--precision-start", type=int, metavar="BITS")
    p.add_argument("--precision-max", type=int, metavar="BITS")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default="-", metavar="PATH")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="powsum", description="Verify power-sum inequalities rigorously.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    chk = sub.add_parser("check", help="run a named check over a grid")
    chk.add_argument("name", choices=sorted(CHECKS))
    chk.add_argument("--n-min", type=int, default=1)
    chk.add_argument("--n-max", type=int, default=1)
    chk.add_argument("--r", type=rational_list, default=())
    chk.add_argument("--alpha", type=rational_list, default=())
    chk.add_argument("--rprime", type=rational_list, default=())
    chk.add_argument("--mode", choices=("exact", "interval"), default="interval")
    chk.add_argument("--upto-corollary", action="store_true",
                     help="problem1 only: keep pairs with r' <= 2r + 1")
    _add_policy(chk)
    _add_output(chk)

    rep = sub.add_parser("replay", help="replay the monotonicity proof at one point")
    rep.add_argument("--n", type=int, required=True)
    rep.add_argument("--r", type=rational, required=True)
    rep.add_argument("--alpha", type=rational, required=True)
    rep.add_argument("--mode", choices=("exact", "interval"), default="interval")
    rep.add_argument("--json", action="store_true", help="print the trace as JSON")
    _add_policy(rep)

    scan = sub.add_parser("scan", help="counterexample scans")
    scan.add_argument("target", choices=("problem1",))
    scan.add_argument("--n-min", type=int, default=1)
    scan.add_argument("--n-max", type=int, required=True)
    scan.add_argument("--r", type=rational_list, required=True)
    scan.add_argument("--rprime", type=rational_list, required=True)
    scan.add_argument("--upto-corollary", action="store_true",
                      help="keep only pairs with r' <= 2r + 1")
    _add_policy(scan)
    _add_output(scan)

    conv = sub.add_parser("report", help="re-emit a saved JSON report")
    conv.add_argument("--in", dest="source", default="-", metavar="PATH")
    _add_output(conv)
    return parser


def _policy(args) -> PrecisionPolicy:
    base = PrecisionPolicy.from_env()
    start = args.precision_start or base.start_bits
    cap = args.precision_max or base.max_bits
    if args.precision_start and not args.precision_max:
        cap = max(cap, start)
    return PrecisionPolicy(start, cap, base.escalation_factor)


def _trace_json(trace) -> dict:
    return {
        "n": trace.n, "r": format_value(trace.r), "alpha": format_value(trace.alpha),
        "steps": [{"name": s.name, "description": s.description,
                   "outcome": s.verdict.outcome.value, "equality": s.verdict.equality,
                   "lhs": format_value(s.verdict.lhs), "rhs": format_value(s.verdict.rhs),
                   "precision_bits": s.verdict.precision_used} for s in trace.steps],
        "overall": trace.verdict.outcome.value,
        "chain_consistent": trace.chain_consistent,
    }


def _run(args) -> int:
    if args.command in ("check", "scan"):
        if args.command == "scan":
            grid = GridSpec("problem1", args.n_min, args.n_max, args.r, (), args.rprime,
                            "interval", _policy(args), args.upto_corollary)
        else:
            grid = GridSpec(args.name, args.n_min, args.n_max, args.r, args.alpha, args.rprime,
                            args.mode, _policy(args), args.upto_corollary)
        report = run_campaign(grid)
        emit_report(report, args.format, args.out)
        for rec in report.findings:
            print(f"finding: {rec.check} n={rec.n} r={rec.r} alpha={rec.alpha} "
                  f"rprime={rec.rprime}", file=sys.stderr)
        return exit_code(report.summary)
    if args.command == "replay":
        trace = replay_theorem1(args.n, args.r, args.alpha, _policy(args), args.mode)
        if args.json:
            print(json.dumps(_trace_json(trace), indent=2))
        else:
            print(trace.format())
        outcome = trace.verdict.outcome
        if outcome is Outcome.HOLDS:
            return EXIT_OK
        return EXIT_INDETERMINATE if outcome is Outcome.INDETERMINATE else EXIT_FAILS
    if args.command == "report":
        text = sys.stdin.read() if args.source == "-" else Path(args.source).read_text()
        try:
            report = report_from_dict(json.loads(text))
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"not a powsum JSON report: {exc}") from None
        emit_report(report, args.format, args.out)
        return exit_code(report.summary)
    raise _UsageExit("missing subcommand", build_parser().format_usage())


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except _UsageExit as exc:
        sys.stderr.write(exc.usage)
        print(f"powsum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PowsumError as exc:
        # domain errors here come from out-of-range parameters
        print(f"powsum: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"powsum: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
