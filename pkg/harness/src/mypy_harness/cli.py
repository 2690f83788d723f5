"""Standalone harness tool: check, search, experiment."""

from __future__ import annotations

import argparse
import sys
import tempfile
from pathlib import Path
from typing import Sequence

from .experiment import experiment, rows_to_csv
from .runner import CheckerNotInstalled, run_checker
from .search import min_stack_search


def cmd_check(args: argparse.Namespace) -> int:
    outcome = run_checker(args.file, args.stack_mb, args.timeout)
    print(f"{outcome.status} at {outcome.stack_mb} MB in {outcome.duration:.1f}s")
    return 0


def cmd_search(args: argparse.Namespace) -> int:
    result = min_stack_search(args.file, args.lo, args.hi, args.timeout)
    print(result.describe())
    for mb, status in result.observations:
        print(f"  probe {mb} MB -> {status}", file=sys.stderr)
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    workdir = Path(args.workdir) if args.workdir else Path(tempfile.mkdtemp(prefix="mypy_harness_"))
    rows = experiment(
        args.machine,
        args.lengths,
        args.seed,
        workdir,
        symbols=args.symbols.split(",") if args.symbols else ("a", "b"),
        lo_mb=args.lo,
        hi_mb=args.hi,
        timeout_s=args.timeout,
        control_word=args.control_word,
    )
    text = rows_to_csv(rows)
    if args.csv == "-":
        sys.stdout.write(text)
    else:
        Path(args.csv).write_text(text, encoding="utf-8")
    return 0


def _lengths(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p]
    except ValueError as exc:
        raise argparse.ArgumentTypeError("lengths must be integers") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mypy-harness",
        description="Measure the minimal call stack Mypy needs per generated program.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="classify one file at one stack size")
    p.add_argument("file")
    p.add_argument("--stack-mb", type=int, default=64)
    p.add_argument("--timeout", type=float, default=300.0)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("search", help="binary search the minimal stack size")
    p.add_argument("file")
    p.add_argument("--lo", type=int, default=4)
    p.add_argument("--hi", type=int, default=256)
    p.add_argument("--timeout", type=float, default=300.0)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("experiment", help="length sweep over random palindromes")
    p.add_argument("machine")
    p.add_argument("--lengths", type=_lengths, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default="-")
    p.add_argument("--symbols", help="comma separated input symbols (default a,b)")
    p.add_argument("--lo", type=int, default=4)
    p.add_argument("--hi", type=int, default=256)
    p.add_argument("--timeout", type=float, default=300.0)
    p.add_argument("--workdir")
    p.add_argument(
        "--control-word",
        help="extra non-palindrome word, expected to check as TypeError",
    )
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CheckerNotInstalled as exc:
        print(f"mypy-harness: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
