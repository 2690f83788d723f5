"""Palindrome length sweep: compile, search minimal stack, write CSV.

The compiler is reached only through its command line; words are
generated here (mirrored random half-words, one RNG stream per length) so
a rerun with the same seed compiles byte-identical programs.
"""

from __future__ import annotations

import csv
import io
import random
import shutil
import subprocess
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .runner import CheckerNotInstalled, checker_version
from .search import min_stack_search


@dataclass(frozen=True)
class ExperimentRow:
    length: int
    min_stack_mb: int | None
    status: str
    duration_s: float


def default_compile_cmd() -> list[str]:
    exe = shutil.which("tmsub")
    if exe is not None:
        return [exe]
    return [sys.executable, "-m", "tmsub"]


def random_palindrome_text(seed: int, length: int, symbols: Sequence[str]) -> str:
    rng = random.Random(f"{seed}:{length}")
    half = [rng.choice(symbols) for _ in range((length + 1) // 2)]
    word = half + list(reversed(half[: length // 2]))
    return "".join(word)


def compile_program(
    machine: str,
    word: str,
    out_path: Path,
    compile_cmd: Sequence[str] | None = None,
) -> None:
    cmd = list(compile_cmd or default_compile_cmd()) + [
        "compile",
        machine,
        word,
        "-o",
        str(out_path),
        "--emit",
        "python",
    ]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"compile failed ({proc.returncode}): {proc.stderr.strip()}")


def experiment(
    machine: str,
    lengths: Sequence[int],
    seed: int,
    workdir: Path,
    *,
    symbols: Sequence[str] = ("a", "b"),
    lo_mb: int = 4,
    hi_mb: int = 256,
    timeout_s: float = 300.0,
    compile_cmd: Sequence[str] | None = None,
    probe_cmd: Sequence[str] | None = None,
    control_word: str | None = None,
) -> list[ExperimentRow]:
    """One row per length; compile or check failures are recorded in the
    row instead of aborting the sweep. Non-decreasing minimal stacks are
    expected; a violation is flagged on the row. A control word (normally
    a non-palindrome, expected to check as TypeError) gets an extra row
    outside the trend tracking."""
    workdir.mkdir(parents=True, exist_ok=True)
    rows: list[ExperimentRow] = []
    previous_min: int | None = None
    jobs: list[tuple[int, str, Path, bool]] = [
        (
            length,
            random_palindrome_text(seed, length, symbols),
            workdir / f"machine_len{length}.py",
            True,
        )
        for length in sorted(lengths)
    ]
    if control_word is not None:
        jobs.append(
            (len(control_word), control_word, workdir / "machine_control.py", False)
        )
    for length, word, target, in_trend in jobs:
        started = time.perf_counter()
        try:
            compile_program(machine, word, target, compile_cmd=compile_cmd)
            result = min_stack_search(
                str(target), lo_mb, hi_mb, timeout_s, probe_cmd=probe_cmd
            )
        except CheckerNotInstalled:
            raise
        except Exception as exc:  # per-row failure, sweep continues
            rows.append(
                ExperimentRow(length, None, f"error: {exc}", time.perf_counter() - started)
            )
            continue
        duration = time.perf_counter() - started
        if result.exceeds_hi:
            status = "exceeds-hi"
        else:
            status = str(result.status_at_minimal)
            if result.non_monotone:
                status += " (flagged: non-monotone)"
            if in_trend:
                if previous_min is not None and result.minimal_mb < previous_min:
                    status += " (flagged: below previous length)"
                previous_min = result.minimal_mb
        rows.append(ExperimentRow(length, result.minimal_mb, status, duration))
    return rows


def rows_to_csv(rows: Sequence[ExperimentRow], checker: str | None = None) -> str:
    version = checker if checker is not None else checker_version()
    buf = io.StringIO()
    buf.write(f"# checker=mypy-{version or 'missing'}\n")
    writer = csv.writer(buf)
    writer.writerow(["length", "min_stack_mb", "status", "duration_s"])
    for row in rows:
        writer.writerow(
            [
                row.length,
                "" if row.min_stack_mb is None else row.min_stack_mb,
                row.status,
                f"{row.duration_s:.1f}",
            ]
        )
    return buf.getvalue()
