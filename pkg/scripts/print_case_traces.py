#!/usr/bin/env python3
"""Print the four golden transition bursts with full deduction traces."""

from tmsub.encoding import build_class_table, render_query
from tmsub.engine import BurstCase, replay_case_traces, step_annotation
from tmsub.gen import four_case_machine

DESCRIPTIONS = {
    BurstCase.KEEP_ON_SYMBOL: "overwrite a symbol, keep direction",
    BurstCase.TURN_ON_SYMBOL: "overwrite a symbol, reverse direction",
    BurstCase.KEEP_ON_BLANK: "extend the tape, keep direction",
    BurstCase.TURN_ON_BLANK: "extend the tape, reverse direction",
}


def main() -> None:
    table = build_class_table(four_case_machine())
    for case, steps in replay_case_traces(table).items():
        print(f"case {case.value}: {DESCRIPTIONS[case]} ({len(steps)} deductions)")
        print(f"  {render_query(steps[0].query_before)}")
        for step in steps:
            print(f"  {render_query(step.query_after)}   {step_annotation(step)}")
        print()


if __name__ == "__main__":
    main()
