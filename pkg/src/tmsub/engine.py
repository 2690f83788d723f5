"""Deduction engine: resolves subtyping queries against a class table.

Two deduction rules drive everything. Super replaces the outermost class
on the subtype side with its declared supertype, choosing the unique rule
whose body head equals the other side's outermost class. Var strips equal
outermost classes from both sides; because every type parameter is
contravariant this swaps the subtype and supertype roles (and flips the
display orientation). Var takes priority when both apply, and a wildcard
on either side resolves the query immediately.

A query whose subtype side is headed by a state class tagged L or R is in
canonical form: one simulated machine transition lies between consecutive
canonical forms, and the burst in between takes at most eight deductions
(3 when the head keeps direction on a symbol, 7 when it keeps direction
on a blank, 8 for either kind of turn).

Engine state is confined to a single call; shared class tables are
immutable, so concurrent queries need no synchronization.
"""

from __future__ import annotations

import enum
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .encoding import (
    BUFFER,
    CANONICAL_TAGS,
    SENTINEL,
    CellAtom,
    ClassTable,
    DecodeError,
    InheritanceRule,
    ParamAtom,
    StateAtom,
    StateTag,
    SubtypeQuery,
    TypeTerm,
    WildcardAtom,
    build_class_table,
    decode_atoms,
    initial_query,
    is_terminator,
    mangle,
    render_query,
)
from .tm import (
    BLANK,
    Configuration,
    Direction,
    RunResult,
    Symbol,
    TuringMachine,
    Verdict,
    run,
    word_text,
)


class EngineError(RuntimeError):
    """The engine reached a state no valid class table can produce."""


class GoldenTraceMismatch(AssertionError):
    """A replayed burst deviates from the stored golden derivation."""


class StepKind(enum.Enum):
    SUPER = "Super"
    VAR = "Var"
    ACCEPT_WILDCARD = "AcceptWildcard"
    REJECT_NO_RULE = "RejectNoRule"


@dataclass(frozen=True, slots=True)
class DeductionStep:
    kind: StepKind
    rule: InheritanceRule | None
    query_before: SubtypeQuery
    query_after: SubtypeQuery | None


@dataclass(frozen=True, slots=True)
class QueryResult:
    verdict: Verdict
    deductions: int
    transitions: int
    trace: tuple[DeductionStep, ...] | None = None


class _Run:
    """Mutable cursor over a query; strips heads by advancing offsets so
    Var costs O(1) and only Super allocates."""

    __slots__ = ("sub", "si", "sup", "pi", "flip")

    def __init__(self, q: SubtypeQuery):
        self.sub = q.sub.atoms
        self.si = 0
        self.sup = q.sup.atoms
        self.pi = 0
        self.flip = q.display_flip

    def snapshot(self) -> SubtypeQuery:
        return SubtypeQuery(
            TypeTerm(self.sub[self.si :]), TypeTerm(self.sup[self.pi :]), self.flip
        )

    def is_canonical(self) -> bool:
        head = self.sub[self.si]
        return isinstance(head, StateAtom) and head.tag in CANONICAL_TAGS

    def decode(self) -> Configuration:
        return decode_atoms(self.sub, self.si, self.sup, self.pi)

    def step(self, table: ClassTable) -> tuple[StepKind, InheritanceRule | None]:
        """Apply one deduction; accept/reject outcomes leave the cursor
        untouched."""
        head_sub = self.sub[self.si]
        head_sup = self.sup[self.pi]
        if isinstance(head_sub, WildcardAtom) or isinstance(head_sup, WildcardAtom):
            return StepKind.ACCEPT_WILDCARD, None
        if head_sub == head_sup:
            if is_terminator(head_sub):
                raise EngineError("query reduced to bare equal terminators")
            self.sub, self.si, self.sup, self.pi = (
                self.sup,
                self.pi + 1,
                self.sub,
                self.si + 1,
            )
            self.flip = not self.flip
            return StepKind.VAR, None
        rule = table.index.get((head_sub, head_sup))
        if rule is None:
            return StepKind.REJECT_NO_RULE, None
        body = rule.body.atoms
        if isinstance(body[-1], ParamAtom):
            self.sub = body[:-1] + self.sub[self.si + 1 :]
        else:
            self.sub = body
        self.si = 0
        return StepKind.SUPER, rule


def deduce_step(q: SubtypeQuery, t: ClassTable) -> DeductionStep:
    """Apply the single deduction the priority order selects for `q`."""
    cursor = _Run(q)
    kind, rule = cursor.step(t)
    after = cursor.snapshot() if kind in (StepKind.SUPER, StepKind.VAR) else None
    return DeductionStep(kind, rule, q, after)


def run_query(
    q: SubtypeQuery,
    t: ClassTable,
    max_deductions: int,
    record_trace: bool = False,
) -> QueryResult:
    """Iterate deductions until the query resolves, rejects, or the budget
    runs out. `deductions` counts Super and Var applications only;
    `transitions` counts re-entries into canonical form."""
    cursor = _Run(q)
    trace: list[DeductionStep] | None = [] if record_trace else None
    deductions = 0
    transitions = 0
    while True:
        if deductions >= max_deductions:
            return QueryResult(
                Verdict.BUDGET_EXHAUSTED, deductions, transitions, _freeze(trace)
            )
        before = cursor.snapshot() if record_trace else None
        kind, rule = cursor.step(t)
        if kind is StepKind.ACCEPT_WILDCARD or kind is StepKind.REJECT_NO_RULE:
            if trace is not None:
                trace.append(DeductionStep(kind, rule, before, None))
            verdict = (
                Verdict.ACCEPTED
                if kind is StepKind.ACCEPT_WILDCARD
                else Verdict.REJECTED
            )
            return QueryResult(verdict, deductions, transitions, _freeze(trace))
        deductions += 1
        if cursor.is_canonical():
            transitions += 1
        if trace is not None:
            trace.append(DeductionStep(kind, rule, before, cursor.snapshot()))


def _freeze(trace: list[DeductionStep] | None) -> tuple[DeductionStep, ...] | None:
    return None if trace is None else tuple(trace)


def step_annotation(step: DeductionStep) -> str:
    if step.kind is StepKind.SUPER:
        return f"({step.rule.rule_no})+(Super)"
    if step.kind is StepKind.VAR:
        return "(Var)"
    return f"({step.kind.value})"


def collapsed_annotations(steps: Iterable[DeductionStep]) -> list[str]:
    """Annotations with consecutive Var steps grouped, derivation style."""
    out: list[str] = []
    var_run = 0
    for step in steps:
        if step.kind is StepKind.VAR:
            var_run += 1
            continue
        if var_run:
            out.append("(Var)" if var_run == 1 else f"(Var)×{var_run}")
            var_run = 0
        if step.kind is StepKind.SUPER:
            out.append(step_annotation(step))
    if var_run:
        out.append("(Var)" if var_run == 1 else f"(Var)×{var_run}")
    return out


def render_trace(initial: SubtypeQuery, steps: Sequence[DeductionStep]) -> list[str]:
    """One line per deduction in the display notation, plus the start line
    and a terminal verdict marker when present."""
    lines = [render_query(initial)]
    for step in steps:
        if step.query_after is None:
            if step.kind is StepKind.ACCEPT_WILDCARD:
                lines.append("# accepted: wildcard resolves the query")
            else:
                before = step.query_before
                lines.append(
                    "# rejected: no inheritance rule for "
                    f"{mangle(before.sub.head)} against {mangle(before.sup.head)}"
                )
        else:
            lines.append(f"{render_query(step.query_after)}   {step_annotation(step)}")
    return lines


class BurstCase(enum.Enum):
    """The four transition shapes, in the order of the derivation listings."""

    KEEP_ON_SYMBOL = "I"
    TURN_ON_SYMBOL = "II"
    KEEP_ON_BLANK = "III"
    TURN_ON_BLANK = "IV"


BURST_SIZES = {
    BurstCase.KEEP_ON_SYMBOL: 3,
    BurstCase.TURN_ON_SYMBOL: 8,
    BurstCase.KEEP_ON_BLANK: 7,
    BurstCase.TURN_ON_BLANK: 8,
}

# Golden step shapes: (kind, rule_no, mirrored relative to the burst's own
# orientation). A mirrored burst flips every rule's `mirrored` flag.
_V = (StepKind.VAR, None, None)
_CASE_GOLDEN: dict[BurstCase, tuple[tuple, ...]] = {
    BurstCase.KEEP_ON_SYMBOL: ((StepKind.SUPER, 1, False), _V, _V),
    BurstCase.TURN_ON_SYMBOL: (
        (StepKind.SUPER, 2, False),
        _V,
        (StepKind.SUPER, 6, False),
        _V,
        _V,
        (StepKind.SUPER, 5, True),
        _V,
        _V,
    ),
    BurstCase.KEEP_ON_BLANK: (
        (StepKind.SUPER, 3, False),
        _V,
        (StepKind.SUPER, 7, False),
        _V,
        (StepKind.SUPER, 9, True),
        _V,
        _V,
    ),
    BurstCase.TURN_ON_BLANK: (
        (StepKind.SUPER, 4, False),
        _V,
        (StepKind.SUPER, 8, False),
        _V,
        _V,
        (StepKind.SUPER, 5, True),
        _V,
        _V,
    ),
}

def _golden_annotations(golden: tuple[tuple, ...]) -> list[str]:
    out: list[str] = []
    var_run = 0
    for entry in golden:
        if entry[0] is StepKind.VAR:
            var_run += 1
            continue
        if var_run:
            out.append("(Var)" if var_run == 1 else f"(Var)×{var_run}")
            var_run = 0
        out.append(f"({entry[1]})+(Super)")
    if var_run:
        out.append("(Var)" if var_run == 1 else f"(Var)×{var_run}")
    return out


CASE_ANNOTATIONS = {c: _golden_annotations(g) for c, g in _CASE_GOLDEN.items()}


def classify_transition(facing: Direction, read: object, move: Direction) -> BurstCase:
    keeps = move is facing
    blank = read is BLANK
    if blank:
        return BurstCase.KEEP_ON_BLANK if keeps else BurstCase.TURN_ON_BLANK
    return BurstCase.KEEP_ON_SYMBOL if keeps else BurstCase.TURN_ON_SYMBOL


def _find_rule(table: ClassTable, rule_no: int) -> InheritanceRule:
    for rule in table.rules:
        if rule.rule_no == rule_no and not rule.mirrored:
            return rule
    raise GoldenTraceMismatch(f"table lacks a rule {rule_no} instance to replay")


def _burst_start(rule: InheritanceRule) -> SubtypeQuery:
    """Canonical query that triggers `rule`: left-travelling head over the
    rule's read cell, empty context beyond the sentinels."""
    head = rule.head
    assert isinstance(head, StateAtom)
    sub = TypeTerm((head,) + SENTINEL)
    read = rule.body.head
    assert isinstance(read, CellAtom)
    if read.cell is BLANK:
        sup = TypeTerm(SENTINEL)
    else:
        sup = TypeTerm((read, BUFFER) + SENTINEL)
    return SubtypeQuery(sub, sup, display_flip=True)


def run_burst(
    q: SubtypeQuery, table: ClassTable, max_deductions: int = 64
) -> tuple[list[DeductionStep], SubtypeQuery | None]:
    """Deduce from one canonical form to the next; returns the steps and
    the re-entered canonical query (None if the query resolved first)."""
    cursor = _Run(q)
    steps: list[DeductionStep] = []
    for _ in range(max_deductions):
        before = cursor.snapshot()
        kind, rule = cursor.step(table)
        if kind in (StepKind.ACCEPT_WILDCARD, StepKind.REJECT_NO_RULE):
            steps.append(DeductionStep(kind, rule, before, None))
            return steps, None
        steps.append(DeductionStep(kind, rule, before, cursor.snapshot()))
        if cursor.is_canonical():
            return steps, cursor.snapshot()
    raise EngineError("burst did not reach canonical form")


def replay_case_traces(t: ClassTable) -> dict[BurstCase, tuple[DeductionStep, ...]]:
    """Replay the four derivation listings against the table.

    The table must come from a machine containing all four transition
    shapes in their left-orientation form. Each burst is validated against
    the stored golden derivation: step kinds, rule numbers, rule
    orientations, and total deduction counts.
    """
    rule_for_case = {
        BurstCase.KEEP_ON_SYMBOL: 1,
        BurstCase.TURN_ON_SYMBOL: 2,
        BurstCase.KEEP_ON_BLANK: 3,
        BurstCase.TURN_ON_BLANK: 4,
    }
    traces: dict[BurstCase, tuple[DeductionStep, ...]] = {}
    for case, rule_no in rule_for_case.items():
        rule = _find_rule(t, rule_no)
        steps, after = run_burst(_burst_start(rule), t)
        if after is None:
            raise GoldenTraceMismatch(f"case {case.value}: burst resolved early")
        check_burst_against_golden(case, steps)
        traces[case] = tuple(steps)
    return traces


def check_burst_against_golden(
    case: BurstCase, steps: Sequence[DeductionStep], mirrored: bool = False
) -> None:
    golden = _CASE_GOLDEN[case]
    if len(steps) != len(golden):
        raise GoldenTraceMismatch(
            f"case {case.value}: {len(steps)} deductions, expected {len(golden)}"
        )
    for i, (step, expected) in enumerate(zip(steps, golden)):
        kind, rule_no, rule_mirrored = expected
        if step.kind is not kind:
            raise GoldenTraceMismatch(
                f"case {case.value} step {i}: {step.kind.value}, expected {kind.value}"
            )
        if kind is StepKind.SUPER:
            want_mirrored = rule_mirrored ^ mirrored
            if step.rule.rule_no != rule_no or step.rule.mirrored != want_mirrored:
                raise GoldenTraceMismatch(
                    f"case {case.value} step {i}: rule "
                    f"{step.rule.rule_no}{'m' if step.rule.mirrored else ''}, "
                    f"expected {rule_no}{'m' if want_mirrored else ''}"
                )


@dataclass(frozen=True, slots=True)
class Divergence:
    transition: int
    detail: str
    oracle_config: Configuration | None
    engine_config: Configuration | None
    trace_window: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class EquivalenceReport:
    word: tuple[Symbol, ...]
    oracle_verdict: Verdict
    engine_verdict: Verdict
    transitions: int
    deductions: int
    burst_sizes: Mapping[int, int]
    agree: bool
    divergence: Divergence | None

    def describe(self) -> str:
        hist = " ".join(f"{k}:{v}" for k, v in sorted(self.burst_sizes.items()))
        status = "agree" if self.agree else "DIVERGE"
        return (
            f"word={word_text(self.word) or '(empty)'} {status} "
            f"oracle={self.oracle_verdict} engine={self.engine_verdict} "
            f"transitions={self.transitions} deductions={self.deductions} "
            f"bursts[{hist}]"
        )


_ACCEPT_TAIL_CAP = 16
_BURST_CAP = 64


def verify_equivalence(
    tm: TuringMachine,
    word: Sequence[Symbol],
    tm_budget: int,
    deduction_budget: int,
    table: ClassTable | None = None,
) -> EquivalenceReport:
    """Run the interpreter and the engine side by side.

    Verdicts must agree (budget exhaustion on both sides counts), the
    decoded configuration at every canonical form must equal the oracle
    configuration after the same number of transitions, and every burst
    must have exactly the size its transition shape dictates.
    """
    if table is None:
        table = build_class_table(tm)
    oracle = run(tm, word, tm_budget, record_trace=True)
    report = _verify_against_oracle(tm, word, oracle, deduction_budget, table, None)
    if report.divergence is None:
        return report
    window: deque[str] = deque(maxlen=12)
    return _verify_against_oracle(tm, word, oracle, deduction_budget, table, window)


def _verify_against_oracle(
    tm: TuringMachine,
    word: Sequence[Symbol],
    oracle: RunResult,
    deduction_budget: int,
    table: ClassTable,
    window: deque | None,
) -> EquivalenceReport:
    assert oracle.trace is not None
    configs = oracle.trace
    word = tuple(word)
    cursor = _Run(initial_query(tm, word))
    if window is not None:
        window.append(render_query(cursor.snapshot()))
    burst_sizes: Counter[int] = Counter()
    deductions = 0
    k = 0

    def diverge(detail: str, engine_config: Configuration | None) -> EquivalenceReport:
        oracle_config = configs[k] if k < len(configs) else None
        return EquivalenceReport(
            word,
            oracle.verdict,
            engine_verdict,
            k,
            deductions,
            dict(burst_sizes),
            False,
            Divergence(
                k,
                detail,
                oracle_config,
                engine_config,
                tuple(window) if window is not None else (),
            ),
        )

    def record(kind: StepKind, rule: InheritanceRule | None) -> None:
        if window is not None:
            if kind in (StepKind.SUPER, StepKind.VAR):
                snap = cursor.snapshot()
                window.append(
                    f"{render_query(snap)}   "
                    + (f"({rule.rule_no})+(Super)" if kind is StepKind.SUPER else "(Var)")
                )
            else:
                window.append(f"# terminal: {kind.value}")

    engine_verdict = Verdict.BUDGET_EXHAUSTED
    try:
        engine_config = cursor.decode()
    except DecodeError as exc:
        return diverge(f"initial query does not decode: {exc}", None)
    if engine_config != configs[0]:
        return diverge("initial configuration mismatch", engine_config)

    facing = Direction.RIGHT
    while k < oracle.steps:
        expected_case = classify_transition(
            facing, configs[k].current, _oracle_move(tm, configs[k])
        )
        burst = 0
        while True:
            if deductions >= deduction_budget:
                return diverge("deduction budget exhausted mid-simulation", None)
            if burst >= _BURST_CAP:
                return diverge("burst exceeded the deduction cap", None)
            kind, rule = cursor.step(table)
            record(kind, rule)
            if kind is StepKind.ACCEPT_WILDCARD:
                engine_verdict = Verdict.ACCEPTED
                return diverge("engine accepted before the oracle halted", None)
            if kind is StepKind.REJECT_NO_RULE:
                engine_verdict = Verdict.REJECTED
                return diverge("engine rejected before the oracle halted", None)
            deductions += 1
            burst += 1
            if cursor.is_canonical():
                break
        k += 1
        burst_sizes[burst] += 1
        facing = _oracle_move(tm, configs[k - 1])
        if burst != BURST_SIZES[expected_case]:
            return diverge(
                f"burst of {burst} deductions, expected "
                f"{BURST_SIZES[expected_case]} for case {expected_case.value}",
                None,
            )
        try:
            engine_config = cursor.decode()
        except DecodeError as exc:
            return diverge(f"canonical query does not decode: {exc}", None)
        if engine_config != configs[k]:
            return diverge("configuration mismatch", engine_config)
        head = cursor.sub[cursor.si]
        if not isinstance(head, StateAtom) or head.tag is not _facing_tag(facing):
            return diverge("canonical tag does not match the travel direction", engine_config)

    if oracle.verdict is Verdict.BUDGET_EXHAUSTED:
        engine_verdict = Verdict.BUDGET_EXHAUSTED
        return _agreement(word, oracle, engine_verdict, k, deductions, burst_sizes)

    if oracle.verdict is Verdict.REJECTED:
        kind, rule = cursor.step(table)
        record(kind, rule)
        if kind is not StepKind.REJECT_NO_RULE:
            return diverge(
                f"oracle rejected but the engine took a {kind.value} step", None
            )
        engine_verdict = Verdict.REJECTED
        return _agreement(word, oracle, engine_verdict, k, deductions, burst_sizes)

    tail = 0
    while True:
        if tail >= _ACCEPT_TAIL_CAP:
            return diverge("accepting tail did not resolve", None)
        kind, rule = cursor.step(table)
        record(kind, rule)
        if kind is StepKind.ACCEPT_WILDCARD:
            engine_verdict = Verdict.ACCEPTED
            return _agreement(word, oracle, engine_verdict, k, deductions, burst_sizes)
        if kind is StepKind.REJECT_NO_RULE:
            engine_verdict = Verdict.REJECTED
            return diverge("oracle accepted but the engine rejected", None)
        deductions += 1
        tail += 1


def _agreement(word, oracle, engine_verdict, k, deductions, burst_sizes):
    return EquivalenceReport(
        word, oracle.verdict, engine_verdict, k, deductions, dict(burst_sizes), True, None
    )


def _oracle_move(tm: TuringMachine, config: Configuration) -> Direction:
    tr = tm.delta.get((config.state, config.current))
    if tr is None:
        raise EngineError("oracle trace ended on an undefined transition")
    return tr.move


def _facing_tag(facing: Direction) -> StateTag:
    return StateTag.R if facing is Direction.RIGHT else StateTag.L
