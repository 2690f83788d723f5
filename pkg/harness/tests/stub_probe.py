"""Protocol-compatible stand-in for the checker probe.

Lets the harness machinery be tested without Mypy. The behavior is read
from the target file:

    # stub: exit=N           print HARNESS_PROBE_EXIT:N
    # stub: threshold=M      die with SIGSEGV below M megabytes, else exit 0
    # stub: threshold_error=M  as above but exit status 1 when passing
    # stub: sleep            block until the parent times out
    # stub: nochecker        print the missing-checker marker
    # stub: depth=D          really recurse D frames in a sized worker thread

With no directive the threshold is derived from the generated query's
nesting depth, so longer words need more stack, mirroring the checker.
"""

import os
import re
import signal
import sys
import threading


def _really_recurse(depth: int, stack_mb: int) -> bool:
    from mypy_harness._probe import FRAMES_PER_MB

    threading.stack_size(stack_mb * 2**20)
    sys.setrecursionlimit(max(20_000, stack_mb * FRAMES_PER_MB))
    result = {}

    def rec(n):
        if n:
            # indirect call re-enters the eval loop from C on every level
            return bool(list(map(rec, [n - 1])))
        return True

    def target():
        result["ok"] = rec(depth)

    worker = threading.Thread(target=target)
    worker.start()
    worker.join()
    return bool(result.get("ok"))


def main() -> int:
    path, stack_mb = sys.argv[1], int(sys.argv[2])
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    directive = re.search(r"# stub: (\w+)(?:=(\d+))?", text)
    mode = directive.group(1) if directive else "size"
    value = int(directive.group(2)) if directive and directive.group(2) else 0

    if mode == "exit":
        print(f"HARNESS_PROBE_EXIT:{value}", flush=True)
        return 0
    if mode == "nochecker":
        print("HARNESS_PROBE_NO_CHECKER", flush=True)
        return 0
    if mode == "sleep":
        import time

        time.sleep(3600)
        return 0
    if mode in ("threshold", "threshold_error"):
        if stack_mb < value:
            os.kill(os.getpid(), signal.SIGSEGV)
        print(f"HARNESS_PROBE_EXIT:{1 if mode == 'threshold_error' else 0}", flush=True)
        return 0
    if mode == "depth":
        ok = _really_recurse(value, stack_mb)
        print(f"HARNESS_PROBE_EXIT:{0 if ok else 2}", flush=True)
        return 0

    # size mode: threshold grows with the query nesting depth
    brackets = sum(
        line.count("[") for line in text.splitlines() if line.strip().startswith("w:")
    )
    threshold = 4 + brackets // 8
    if stack_mb < threshold:
        os.kill(os.getpid(), signal.SIGSEGV)
    print("HARNESS_PROBE_EXIT:0", flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
