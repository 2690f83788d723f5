#!/usr/bin/env python3
"""Deduction-count growth on the palindrome machine.

Doubling the input length should roughly quadruple the deduction count
(the machine runs in quadratic time and the simulation is real time).
Writes the measurements as a table and reports the doubling ratios.
"""

import argparse
import random
from pathlib import Path

from tmsub.encoding import build_class_table, initial_query
from tmsub.engine import run_query
from tmsub.gen import random_palindrome
from tmsub.tm import parse_tm, run

REPO = Path(__file__).resolve().parents[1]


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--lengths", default="8,16,32,64,128,256")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    lengths = [int(part) for part in args.lengths.split(",") if part]

    tm = parse_tm((REPO / "machines" / "palindrome.tm").read_text())
    table = build_class_table(tm)
    symbols = [s for s in sorted(tm.alphabet, key=lambda x: x.name) if s.name in "ab"]

    measured = {}
    print(f"{'length':>8} {'tm_steps':>10} {'deductions':>12} {'per step':>9}")
    for length in lengths:
        rng = random.Random(f"{args.seed}:{length}")
        word = random_palindrome(rng, length, symbols)
        oracle = run(tm, word, 10_000_000)
        result = run_query(initial_query(tm, word), table, 8 * oracle.steps + 64)
        measured[length] = result.deductions
        per_step = result.deductions / max(oracle.steps, 1)
        print(f"{length:>8} {oracle.steps:>10} {result.deductions:>12} {per_step:>9.2f}")

    print()
    for length in lengths:
        if 2 * length in measured:
            ratio = measured[2 * length] / measured[length]
            print(f"deductions({2 * length}) / deductions({length}) = {ratio:.3f}")


if __name__ == "__main__":
    main()
