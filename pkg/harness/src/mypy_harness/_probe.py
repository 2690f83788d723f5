"""Subprocess driver: run Mypy once inside a stack-sized worker thread.

Invoked as `python -m mypy_harness._probe FILE STACK_MB`. Prints exactly
one marker line on success:

    HARNESS_PROBE_EXIT:<mypy exit status>
    HARNESS_PROBE_NO_CHECKER          (mypy is not importable)

A hard crash (C-stack overflow) kills the process before any marker is
printed; the parent classifies that from the signal. A worker thread that
dies without reporting (recursion-limit failure that unwinds oddly) is
reported as exit status 2, which the parent also classifies as a crash.

The Python recursion limit scales with the stack size so that the stack
budget, not the interpreter default of 1000 frames, is the binding
constraint at every probed size.
"""

from __future__ import annotations

import sys
import tempfile
import threading

FRAMES_PER_MB = 1500


def main(argv: list[str]) -> int:
    path, stack_mb = argv[0], int(argv[1])
    try:
        from mypy import api
    except ImportError:
        print("HARNESS_PROBE_NO_CHECKER", flush=True)
        return 0

    threading.stack_size(stack_mb * 2**20)
    sys.setrecursionlimit(max(20_000, stack_mb * FRAMES_PER_MB))
    result: dict = {}

    def target() -> None:
        with tempfile.TemporaryDirectory() as cache:
            out, err, code = api.run(
                [path, "--no-incremental", "--cache-dir", cache, "--no-error-summary"]
            )
        result["code"] = code

    worker = threading.Thread(target=target)
    worker.start()
    worker.join()
    print(f"HARNESS_PROBE_EXIT:{result.get('code', 2)}", flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
