import random
from itertools import product

import pytest

from tmsub.encoding import (
    BUFFER,
    GROUND,
    SENTINEL,
    WILDCARD,
    CellAtom,
    StateAtom,
    StateTag,
    SubtypeQuery,
    TypeTerm,
    build_class_table,
    initial_query,
)
from tmsub.engine import (
    BURST_SIZES,
    CASE_ANNOTATIONS,
    BurstCase,
    EngineError,
    GoldenTraceMismatch,
    StepKind,
    check_burst_against_golden,
    collapsed_annotations,
    deduce_step,
    render_trace,
    replay_case_traces,
    run_burst,
    run_query,
    verify_equivalence,
)
from tmsub.gen import four_case_machine, one_transition_machine
from tmsub.tm import BLANK, StateId, Symbol, Verdict, run, word_from_text


@pytest.fixture(scope="module")
def four_case_table():
    return build_class_table(four_case_machine())


def test_deduce_super_rewrites_sub_side(four_case_table):
    a, b = Symbol("a"), Symbol("b")
    q = SubtypeQuery(
        TypeTerm((StateAtom(StateId("c1"), StateTag.L),) + SENTINEL),
        TypeTerm((CellAtom(a), BUFFER) + SENTINEL),
        display_flip=True,
    )
    step = deduce_step(q, four_case_table)
    assert step.kind is StepKind.SUPER
    assert step.rule.rule_no == 1 and not step.rule.mirrored
    assert step.query_after.sup == q.sup  # only the subtype side changes
    assert step.query_after.sub.atoms == (
        CellAtom(a),
        BUFFER,
        StateAtom(StateId("d1"), StateTag.L),
        CellAtom(b),
        BUFFER,
    ) + SENTINEL
    assert step.query_after.display_flip == q.display_flip


def test_deduce_var_strips_and_swaps(four_case_table):
    a = Symbol("a")
    sub = TypeTerm((CellAtom(a), BUFFER, GROUND))
    sup = TypeTerm((CellAtom(a), CellAtom(a), BUFFER, GROUND))
    step = deduce_step(SubtypeQuery(sub, sup, display_flip=False), four_case_table)
    assert step.kind is StepKind.VAR
    # roles swap: the old supertype remainder becomes the subtype side
    assert step.query_after.sub.atoms == (CellAtom(a), BUFFER, GROUND)
    assert step.query_after.sup.atoms == (BUFFER, GROUND)
    assert step.query_after.display_flip is True


def test_deduce_rejects_when_no_rule_matches(four_case_table):
    a = Symbol("a")
    q = SubtypeQuery(
        TypeTerm((GROUND,)), TypeTerm((CellAtom(a), BUFFER, GROUND))
    )
    assert deduce_step(q, four_case_table).kind is StepKind.REJECT_NO_RULE


def test_deduce_wildcard_accepts_either_side(four_case_table):
    wild = TypeTerm((WILDCARD,))
    ground = TypeTerm((GROUND,))
    assert (
        deduce_step(SubtypeQuery(wild, ground), four_case_table).kind
        is StepKind.ACCEPT_WILDCARD
    )
    assert (
        deduce_step(SubtypeQuery(ground, wild), four_case_table).kind
        is StepKind.ACCEPT_WILDCARD
    )


def test_bare_equal_terminators_is_an_engine_error(four_case_table):
    q = SubtypeQuery(TypeTerm((GROUND,)), TypeTerm((GROUND,)))
    with pytest.raises(EngineError):
        deduce_step(q, four_case_table)


def test_golden_case_traces(four_case_table):
    traces = replay_case_traces(four_case_table)
    assert {case: len(steps) for case, steps in traces.items()} == BURST_SIZES
    assert collapsed_annotations(traces[BurstCase.KEEP_ON_SYMBOL]) == [
        "(1)+(Super)",
        "(Var)×2",
    ]
    assert collapsed_annotations(traces[BurstCase.TURN_ON_SYMBOL]) == [
        "(2)+(Super)",
        "(Var)",
        "(6)+(Super)",
        "(Var)×2",
        "(5)+(Super)",
        "(Var)×2",
    ]
    assert collapsed_annotations(traces[BurstCase.KEEP_ON_BLANK]) == [
        "(3)+(Super)",
        "(Var)",
        "(7)+(Super)",
        "(Var)",
        "(9)+(Super)",
        "(Var)×2",
    ]
    assert collapsed_annotations(traces[BurstCase.TURN_ON_BLANK]) == [
        "(4)+(Super)",
        "(Var)",
        "(8)+(Super)",
        "(Var)×2",
        "(5)+(Super)",
        "(Var)×2",
    ]
    assert CASE_ANNOTATIONS[BurstCase.KEEP_ON_BLANK] == collapsed_annotations(
        traces[BurstCase.KEEP_ON_BLANK]
    )


def test_mirrored_case_traces(four_case_table):
    """The right-travelling variants replay with every rule orientation
    flipped and the same deduction counts."""
    a = Symbol("a")
    starts = {
        # moving right over symbol a, transition turns left: mirrored turn
        BurstCase.TURN_ON_SYMBOL: ("c1", (CellAtom(a), BUFFER) + SENTINEL),
        # moving right over symbol a, transition continues right
        BurstCase.KEEP_ON_SYMBOL: ("c2", (CellAtom(a), BUFFER) + SENTINEL),
        # moving right into the blank end, transition turns left
        BurstCase.TURN_ON_BLANK: ("c3", SENTINEL),
        # moving right into the blank end, transition continues right
        BurstCase.KEEP_ON_BLANK: ("c4", SENTINEL),
    }
    for case, (state, sup_atoms) in starts.items():
        q = SubtypeQuery(
            TypeTerm((StateAtom(StateId(state), StateTag.R),) + SENTINEL),
            TypeTerm(sup_atoms),
            display_flip=False,
        )
        steps, after = run_burst(q, four_case_table)
        assert after is not None, case
        check_burst_against_golden(case, steps, mirrored=True)
        assert len(steps) == BURST_SIZES[case]


def test_replay_requires_all_four_shapes():
    table = build_class_table(one_transition_machine())
    with pytest.raises(GoldenTraceMismatch, match="rule 1"):
        replay_case_traces(table)


def test_one_transition_machine_full_run():
    """Hand-expanded deduction count for the empty word: a 7-deduction
    keep-direction burst on the blank, then a 3-deduction accepting tail,
    then the wildcard resolution (not counted)."""
    tm = one_transition_machine()
    table = build_class_table(tm)
    q = initial_query(tm, ())
    result = run_query(q, table, 10_000, record_trace=True)
    assert result.verdict is Verdict.ACCEPTED
    assert result.transitions == 1
    assert result.deductions == 10
    kinds = [s.kind for s in result.trace]
    assert kinds == [
        StepKind.SUPER,  # end-of-tape continuation rule (3, mirrored)
        StepKind.VAR,
        StepKind.SUPER,  # buffer bridge (7, mirrored)
        StepKind.VAR,
        StepKind.SUPER,  # re-aim (9)
        StepKind.VAR,
        StepKind.VAR,
        StepKind.SUPER,  # halt rule (10, mirrored)
        StepKind.VAR,
        StepKind.VAR,
        StepKind.ACCEPT_WILDCARD,
    ]
    supers = [(s.rule.rule_no, s.rule.mirrored) for s in result.trace if s.rule]
    assert supers == [(3, True), (7, True), (9, False), (10, True)]


def test_budget_zero_is_exhausted_immediately(four_case_table):
    q = SubtypeQuery(TypeTerm((GROUND,)), TypeTerm((GROUND,)))
    result = run_query(q, four_case_table, 0)
    assert result.verdict is Verdict.BUDGET_EXHAUSTED
    assert result.deductions == 0


def test_budget_exhaustion_mid_run(palindrome_tm, palindrome_table):
    word = word_from_text(palindrome_tm, "abba")
    q = initial_query(palindrome_tm, word)
    result = run_query(q, palindrome_table, 5)
    assert result.verdict is Verdict.BUDGET_EXHAUSTED
    assert result.deductions == 5


def test_palindrome_engine_verdicts(palindrome_tm, palindrome_table):
    accept = run_query(
        initial_query(palindrome_tm, word_from_text(palindrome_tm, "abba")),
        palindrome_table,
        100_000,
    )
    assert accept.verdict is Verdict.ACCEPTED
    oracle = run(palindrome_tm, word_from_text(palindrome_tm, "abba"), 100_000)
    assert accept.transitions == oracle.steps
    assert accept.deductions <= 8 * oracle.steps + 16

    reject = run_query(
        initial_query(palindrome_tm, word_from_text(palindrome_tm, "abab")),
        palindrome_table,
        100_000,
        record_trace=True,
    )
    assert reject.verdict is Verdict.REJECTED
    assert reject.trace[-1].kind is StepKind.REJECT_NO_RULE


def test_var_flips_display_super_preserves(palindrome_tm, palindrome_table):
    word = word_from_text(palindrome_tm, "aba")
    q = initial_query(palindrome_tm, word)
    result = run_query(q, palindrome_table, 100_000, record_trace=True)
    flip = q.display_flip
    for step in result.trace:
        if step.query_after is None:
            continue
        if step.kind is StepKind.VAR:
            assert step.query_after.display_flip is (not flip)
        else:
            assert step.query_after.display_flip is flip
        flip = step.query_after.display_flip


def test_super_target_selection_is_deterministic(palindrome_tm, palindrome_table):
    word = word_from_text(palindrome_tm, "ab")
    q = initial_query(palindrome_tm, word)
    first = run_query(q, palindrome_table, 100_000, record_trace=True)
    second = run_query(q, palindrome_table, 100_000, record_trace=True)
    assert first == second


def test_realtime_bound_small_words(palindrome_tm, palindrome_table):
    a, b = Symbol("a"), Symbol("b")
    for n in range(7):
        for word in product((a, b), repeat=n):
            report = verify_equivalence(
                palindrome_tm, word, 2000, 8 * 2000 + 64, table=palindrome_table
            )
            assert report.agree, report.divergence
            assert all(size <= 8 for size in report.burst_sizes)


def test_trace_rendering_layout(palindrome_tm, palindrome_table):
    word = word_from_text(palindrome_tm, "a")
    q = initial_query(palindrome_tm, word)
    result = run_query(q, palindrome_table, 1000, record_trace=True)
    lines = render_trace(q, result.trace)
    assert lines[0] == "Z N L_blank Q_q0_R ⊏ L_a N L_blank N Z"
    assert lines[1].endswith("(1)+(Super)")
    assert any("⊐" in line for line in lines)
    assert lines[-1].startswith("# accepted")
