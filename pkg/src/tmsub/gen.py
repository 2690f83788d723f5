"""Example machine constructors and seeded random generators.

Used by the benchmark command, the differential test suite, and the
derivation replays. Everything here is deterministic given the seed.
"""

from __future__ import annotations

import random
from typing import Sequence

from .tm import (
    BLANK,
    Cell,
    Direction,
    StateId,
    Symbol,
    Transition,
    TuringMachine,
)


def one_transition_machine() -> TuringMachine:
    """Accepts only the empty word: a single blank-reading transition into
    the halt state."""
    q0, qh = StateId("q0"), StateId("qh")
    a = Symbol("a")
    return TuringMachine(
        frozenset({q0, qh}),
        frozenset({a}),
        q0,
        qh,
        {(q0, BLANK): Transition(qh, a, Direction.RIGHT)},
    )


def looping_machine() -> TuringMachine:
    """Bounces between two states forever, writing on every step."""
    p, q, h = StateId("p"), StateId("q"), StateId("h")
    a = Symbol("a")
    delta = {
        (p, a): Transition(q, a, Direction.RIGHT),
        (p, BLANK): Transition(q, a, Direction.RIGHT),
        (q, a): Transition(p, a, Direction.LEFT),
        (q, BLANK): Transition(p, a, Direction.LEFT),
    }
    return TuringMachine(frozenset({p, q, h}), frozenset({a}), p, h, delta)


def four_case_machine() -> TuringMachine:
    """One transition of each of the four shapes: keep or turn, on a
    symbol or on a blank. Target states are sinks, so each replayed burst
    ends exactly one transition later."""
    states = {name: StateId(name) for name in ("c1", "c2", "c3", "c4", "d1", "d2", "d3", "d4", "h")}
    a, b = Symbol("a"), Symbol("b")
    delta = {
        (states["c1"], a): Transition(states["d1"], b, Direction.LEFT),
        (states["c2"], a): Transition(states["d2"], b, Direction.RIGHT),
        (states["c3"], BLANK): Transition(states["d3"], b, Direction.LEFT),
        (states["c4"], BLANK): Transition(states["d4"], b, Direction.RIGHT),
    }
    return TuringMachine(
        frozenset(states.values()), frozenset({a, b}), states["c1"], states["h"], delta
    )


def random_machine(
    rng: random.Random, max_states: int = 4, n_symbols: int = 2
) -> TuringMachine:
    """A random machine with a full transition function.

    Between 2 and `max_states` states including the halt state; every
    (state, cell) pair of a non-halt state gets a transition, so runs
    either halt or run forever, never reject.
    """
    n_states = rng.randint(2, max(2, max_states))
    work = [StateId(f"q{i}") for i in range(n_states - 1)]
    halt = StateId("qh")
    symbols = [Symbol(chr(ord("a") + i)) for i in range(n_symbols)]
    targets = work + [halt]
    delta: dict[tuple[StateId, Cell], Transition] = {}
    for state in work:
        for read in (*symbols, BLANK):
            delta[(state, read)] = Transition(
                rng.choice(targets),
                rng.choice(symbols),
                rng.choice((Direction.LEFT, Direction.RIGHT)),
            )
    return TuringMachine(
        frozenset(work) | {halt}, frozenset(symbols), work[0], halt, delta
    )


def random_word(
    rng: random.Random, max_len: int, symbols: Sequence[Symbol]
) -> tuple[Symbol, ...]:
    length = rng.randint(0, max_len)
    return tuple(rng.choice(symbols) for _ in range(length))


def random_palindrome(
    rng: random.Random, length: int, symbols: Sequence[Symbol]
) -> tuple[Symbol, ...]:
    """Mirror a uniform random half-word of the requested total length."""
    half = [rng.choice(symbols) for _ in range((length + 1) // 2)]
    return tuple(half) + tuple(reversed(half[: length // 2]))
