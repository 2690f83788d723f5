"""Run one check under a controlled call-stack size and classify it."""

from __future__ import annotations

import enum
import subprocess
import sys
import time
from dataclasses import dataclass
from typing import Sequence


class CheckerNotInstalled(RuntimeError):
    """Mypy is not importable in the probe interpreter."""


class CheckStatus(enum.Enum):
    TYPE_CHECKED = "TypeChecked"
    TYPE_ERROR = "TypeError"
    CRASHED = "Crashed"
    TIMEOUT = "Timeout"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CheckOutcome:
    status: CheckStatus
    stack_mb: int
    duration: float
    detail: str = ""


def default_probe_cmd() -> list[str]:
    return [sys.executable, "-m", "mypy_harness._probe"]


def checker_version(python: str | None = None) -> str | None:
    """The installed Mypy version, or None when it is missing."""
    proc = subprocess.run(
        [python or sys.executable, "-c", "from mypy.version import __version__; print(__version__)"],
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        return None
    return proc.stdout.strip() or None


def run_checker(
    path: str,
    stack_mb: int,
    timeout_s: float,
    probe_cmd: Sequence[str] | None = None,
) -> CheckOutcome:
    """Invoke the checker on `path` in a worker thread with a stack of
    `stack_mb` megabytes and caching disabled.

    Crashed covers hard faults (the probe process dies on a signal) and
    recursion-limit failures (the checker reports an internal error).
    Raises CheckerNotInstalled when the probe cannot import the checker.
    """
    if stack_mb < 1:
        raise ValueError("stack_mb must be at least 1")
    cmd = list(probe_cmd or default_probe_cmd()) + [path, str(stack_mb)]
    started = time.perf_counter()
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=timeout_s)
    except subprocess.TimeoutExpired:
        return CheckOutcome(
            CheckStatus.TIMEOUT, stack_mb, time.perf_counter() - started
        )
    duration = time.perf_counter() - started
    marker = next(
        (
            line
            for line in proc.stdout.splitlines()
            if line.startswith("HARNESS_PROBE_")
        ),
        None,
    )
    if marker == "HARNESS_PROBE_NO_CHECKER":
        raise CheckerNotInstalled(
            "mypy is not importable; install the 'checker' extra"
        )
    if proc.returncode < 0 or marker is None:
        # killed by a signal (stack overflow) or died before reporting
        return CheckOutcome(
            CheckStatus.CRASHED, stack_mb, duration, f"signal/rc={proc.returncode}"
        )
    code = int(marker.rsplit(":", 1)[1])
    if code == 0:
        return CheckOutcome(CheckStatus.TYPE_CHECKED, stack_mb, duration)
    if code == 1:
        return CheckOutcome(CheckStatus.TYPE_ERROR, stack_mb, duration)
    return CheckOutcome(CheckStatus.CRASHED, stack_mb, duration, f"checker exit {code}")
