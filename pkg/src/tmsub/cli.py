"""Command-line entry point.

Subcommands: parse, run, compile, simulate, verify, bench. Exit codes are
stable across commands: 0 accept/ok, 1 reject, 2 usage or parse error,
3 budget exhausted, 4 divergence. Diagnostics go to stderr; data (traces,
generated code, CSV) goes to stdout or the requested file.
"""

from __future__ import annotations

import argparse
import csv
import io
import random
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .codegen import emit_listing_demo, emit_program
from .encoding import (
    CellAtom,
    ClassTable,
    EncodingError,
    InheritanceRule,
    TypeTerm,
    build_class_table,
    initial_query,
    table_lines,
)
from .engine import render_trace, run_query, verify_equivalence
from .gen import random_palindrome, random_word
from .tm import (
    MachineError,
    ParseError,
    Symbol,
    TuringMachine,
    Verdict,
    parse_tm,
    run,
    word_from_text,
)

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_DIVERGENCE = 4

_VERDICT_EXIT = {
    Verdict.ACCEPTED: EXIT_OK,
    Verdict.REJECTED: EXIT_REJECTED,
    Verdict.BUDGET_EXHAUSTED: EXIT_BUDGET,
}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class BenchRecord:
    """One benchmark row. For terminating runs the deduction count obeys
    deductions <= 8 * tm_steps + 16 (eight per transition plus the
    accepting tail)."""

    word_length: int
    tm_steps: int
    deductions: int
    verdict: Verdict


def bench_palindromes(
    tm: TuringMachine,
    table: ClassTable,
    lengths: Sequence[int],
    seed: int,
    symbols: Sequence[Symbol],
    max_steps: int,
) -> list[BenchRecord]:
    """Simulate one random palindrome per length, ascending; each length
    draws from its own RNG stream so subsets of lengths reuse words."""
    records = []
    for length in sorted(lengths):
        rng = random.Random(f"{seed}:{length}")
        word = random_palindrome(rng, length, symbols)
        oracle = run(tm, word, max_steps)
        result = run_query(initial_query(tm, word), table, 8 * max_steps + 64)
        if result.verdict is not oracle.verdict:
            print(
                f"warning: engine verdict {result.verdict} differs from "
                f"oracle {oracle.verdict} at length {length}",
                file=sys.stderr,
            )
        records.append(BenchRecord(length, oracle.steps, result.deductions, result.verdict))
    return records


def _load_machine(path: str) -> TuringMachine:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return parse_tm(text)
    except (ParseError, MachineError) as exc:
        raise CliError(f"{path}: {exc}") from exc


def _parse_word(tm: TuringMachine, text: str) -> tuple[Symbol, ...]:
    try:
        return word_from_text(tm, text)
    except MachineError as exc:
        raise CliError(str(exc)) from exc


def _write_output(dest: str, content: str) -> None:
    if dest == "-":
        sys.stdout.write(content)
        return
    try:
        Path(dest).write_text(content, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"{dest}: {exc.strerror or exc}") from exc


def cmd_parse(args: argparse.Namespace) -> int:
    tm = _load_machine(args.machine)
    print(f"parsed OK: {tm.summary()}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    tm = _load_machine(args.machine)
    word = _parse_word(tm, args.word)
    result = run(tm, word, args.max_steps, record_trace=args.trace)
    if args.trace and result.trace is not None:
        for config in result.trace:
            print(config)
    print(f"{result.verdict} in {result.steps} steps")
    return _VERDICT_EXIT[result.verdict]


def cmd_compile(args: argparse.Namespace) -> int:
    if args.emit == "demo":
        _write_output(args.output, emit_listing_demo().source)
        return EXIT_OK
    tm = _load_machine(args.machine)
    table = build_class_table(tm)
    if args.emit == "table":
        _write_output(args.output, "\n".join(table_lines(table)) + "\n")
        return EXIT_OK
    if args.word is None:
        raise CliError("compile --emit python requires a word")
    word = _parse_word(tm, args.word)
    try:
        program = emit_program(
            table, initial_query(tm, word), machine_name=Path(args.machine).stem
        )
    except EncodingError as exc:
        raise CliError(str(exc)) from exc
    _write_output(args.output, program.source if program.source.endswith("\n") else program.source + "\n")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    tm = _load_machine(args.machine)
    word = _parse_word(tm, args.word)
    table = build_class_table(tm)
    query = initial_query(tm, word)
    result = run_query(query, table, args.max_deductions, record_trace=args.trace)
    if args.trace and result.trace is not None:
        for line in render_trace(query, result.trace):
            print(line)
    print(
        f"{result.verdict}: {result.transitions} transitions, "
        f"{result.deductions} deductions"
    )
    return _VERDICT_EXIT[result.verdict]


def _corrupt_table(table: ClassTable, tm: TuringMachine) -> ClassTable:
    """Test hook: rotate the written symbol of every transition rule so
    the engine preserves a wrong configuration. A no-op for single-symbol
    alphabets."""
    symbols = sorted(tm.alphabet, key=lambda s: s.name)
    if len(symbols) < 2:
        return table
    succ = {s: symbols[(i + 1) % len(symbols)] for i, s in enumerate(symbols)}
    rules = []
    for rule in table.rules:
        if rule.rule_no in (1, 2, 3, 4):
            atoms = list(rule.body.atoms)
            written = atoms[3]
            assert isinstance(written, CellAtom) and isinstance(written.cell, Symbol)
            atoms[3] = CellAtom(succ[written.cell])
            rule = InheritanceRule(
                rule.head,
                TypeTerm(tuple(atoms)),
                rule.rule_no,
                rule.mirrored,
                rule.state,
                rule.symbol,
            )
        rules.append(rule)
    return ClassTable.from_rules(rules)


def cmd_verify(args: argparse.Namespace) -> int:
    tm = _load_machine(args.machine)
    table = build_class_table(tm)
    if args.inject_fault:
        table = _corrupt_table(table, tm)
    words: list[tuple[Symbol, ...]] = []
    if args.words is not None:
        words = [_parse_word(tm, part) for part in args.words.split(",")]
    else:
        rng = random.Random(args.seed)
        symbols = sorted(tm.alphabet, key=lambda s: s.name)
        if not symbols:
            raise CliError("cannot generate random words over an empty alphabet")
        words = [random_word(rng, args.max_len, symbols) for _ in range(args.random)]
    deduction_budget = 8 * args.max_steps + 64
    failures = 0
    for word in words:
        report = verify_equivalence(tm, word, args.max_steps, deduction_budget, table=table)
        print(report.describe())
        if not report.agree:
            failures += 1
            div = report.divergence
            assert div is not None
            print(f"  first mismatch at transition {div.transition}: {div.detail}")
            if div.oracle_config is not None:
                print(f"  oracle: {div.oracle_config}")
            if div.engine_config is not None:
                print(f"  engine: {div.engine_config}")
            for line in div.trace_window:
                print(f"    {line}")
    if failures:
        print(f"{failures} of {len(words)} words diverged", file=sys.stderr)
        return EXIT_DIVERGENCE
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    tm = _load_machine(args.machine)
    table = build_class_table(tm)
    symbols = sorted(tm.alphabet, key=lambda s: s.name)
    if args.symbols is not None:
        by_name = {s.name: s for s in tm.alphabet}
        try:
            symbols = [by_name[name] for name in args.symbols.split(",") if name]
        except KeyError as exc:
            raise CliError(f"unknown symbol {exc.args[0]!r}") from exc
    if not symbols:
        raise CliError("cannot generate palindromes over an empty symbol set")
    records = bench_palindromes(
        tm, table, args.lengths, args.seed, symbols, args.max_steps
    )
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["length", "tm_steps", "deductions", "verdict"])
    for record in records:
        writer.writerow(
            [record.word_length, record.tm_steps, record.deductions, str(record.verdict)]
        )
    _write_output(args.csv, buf.getvalue())
    return EXIT_OK


def _lengths(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part]
    except ValueError as exc:
        raise argparse.ArgumentTypeError("lengths must be integers") from exc
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError("lengths must be non-negative integers")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tmsub",
        description="Compile Turing machines into subtyping machines and run them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="validate a .tm file")
    p.add_argument("machine")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("run", help="run the direct interpreter")
    p.add_argument("machine")
    p.add_argument("word")
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compile", help="emit generated code or the rule table")
    p.add_argument("machine", nargs="?")
    p.add_argument("word", nargs="?")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--emit", choices=("python", "table", "demo"), default="python")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", help="run the subtyping deduction engine")
    p.add_argument("machine")
    p.add_argument("word")
    p.add_argument("--max-deductions", type=int, default=10_000_000)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="differential test: engine vs interpreter")
    p.add_argument("machine")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--words", help="comma separated; empty item is the empty word")
    group.add_argument("--random", type=int, metavar="N")
    p.add_argument("--max-len", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="simulate random palindromes, write CSV")
    p.add_argument("machine")
    p.add_argument("--lengths", type=_lengths, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default="-")
    p.add_argument("--symbols", help="comma separated subset of the alphabet")
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "compile" and args.emit != "demo" and args.machine is None:
        parser.error("compile requires a machine file")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"tmsub: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
