"""Binary search for the minimal non-crashing call-stack size."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .runner import CheckOutcome, CheckStatus, run_checker


def _passes(outcome: CheckOutcome) -> bool:
    # Timeouts are excluded from the predicate: a diverging check never
    # passes at any stack size, it only times out or crashes.
    return outcome.status in (CheckStatus.TYPE_CHECKED, CheckStatus.TYPE_ERROR)


@dataclass
class MinStackResult:
    minimal_mb: int | None
    exceeds_hi: bool
    status_at_minimal: CheckStatus | None
    non_monotone: bool
    observations: list[tuple[int, CheckStatus]] = field(default_factory=list)

    def describe(self) -> str:
        if self.exceeds_hi:
            return "exceeds hi"
        flag = " (non-monotone observations)" if self.non_monotone else ""
        return f"{self.minimal_mb} MB -> {self.status_at_minimal}{flag}"


def min_stack_search(
    path: str,
    lo_mb: int,
    hi_mb: int,
    timeout_s: float,
    probe_cmd: Sequence[str] | None = None,
) -> MinStackResult:
    """Least stack size in [lo_mb, hi_mb] at which the check does not
    crash, assuming monotonicity.

    The boundary is re-probed once to confirm it; a contradicting
    observation is retried once and then flagged rather than hidden.
    """
    if not lo_mb < hi_mb:
        raise ValueError("lo_mb must be smaller than hi_mb")
    observations: list[tuple[int, CheckStatus]] = []

    def probe(mb: int) -> CheckOutcome:
        outcome = run_checker(path, mb, timeout_s, probe_cmd=probe_cmd)
        observations.append((mb, outcome.status))
        return outcome

    low_outcome = probe(lo_mb)
    if _passes(low_outcome):
        return MinStackResult(lo_mb, False, low_outcome.status, False, observations)
    high_outcome = probe(hi_mb)
    if not _passes(high_outcome):
        return MinStackResult(None, True, None, False, observations)

    lo, hi = lo_mb, hi_mb
    status = high_outcome.status
    while hi - lo > 1:
        mid = (lo + hi) // 2
        outcome = probe(mid)
        if _passes(outcome):
            hi, status = mid, outcome.status
        else:
            lo = mid

    confirm = probe(hi)
    non_monotone = False
    if not _passes(confirm):
        retry = probe(hi)
        if _passes(retry):
            status = retry.status
        else:
            non_monotone = True
    else:
        status = confirm.status
    return MinStackResult(hi, False, status, non_monotone, observations)
