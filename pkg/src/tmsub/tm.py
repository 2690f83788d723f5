"""Turing machine data model, `.tm` text format, and a direct interpreter.

The interpreter in this module is the correctness oracle for everything else
in the package: the deduction engine is checked step-for-step against it.

All values are immutable after construction and all operations are pure
functions, so they are safe to share across threads.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

_IDENT = re.compile(r"[A-Za-z0-9_]+\Z")

BLANK_TOKEN = "_"


class MachineError(ValueError):
    """A machine value violates a structural invariant."""


class ParseError(ValueError):
    """A `.tm` file is malformed. Carries the 1-based source line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class Blank(enum.Enum):
    """Content of tape cells outside the written region.

    A single value; stored tape cells are never blank (the machine may not
    write the blank), so blanks exist only implicitly beyond the stored
    cells and possibly under the head.
    """

    BLANK = BLANK_TOKEN

    def __str__(self) -> str:
        return BLANK_TOKEN


BLANK = Blank.BLANK


@dataclass(frozen=True, slots=True)
class Symbol:
    """A tape symbol. Names are identifier-safe and never the blank token."""

    name: str

    def __post_init__(self):
        if not _IDENT.match(self.name):
            raise MachineError(f"bad symbol name {self.name!r}")
        if self.name == BLANK_TOKEN:
            raise MachineError(f"symbol name {BLANK_TOKEN!r} is reserved for blank")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class StateId:
    name: str

    def __post_init__(self):
        if not _IDENT.match(self.name):
            raise MachineError(f"bad state name {self.name!r}")
        if self.name == BLANK_TOKEN:
            raise MachineError(f"state name {BLANK_TOKEN!r} is reserved")

    def __str__(self) -> str:
        return self.name


Cell = Union[Symbol, Blank]


class Direction(enum.Enum):
    LEFT = "L"
    RIGHT = "R"

    def opposite(self) -> "Direction":
        return Direction.RIGHT if self is Direction.LEFT else Direction.LEFT

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class Transition:
    """One entry of the transition function. The write is never blank."""

    next_state: StateId
    write: Symbol
    move: Direction


@dataclass(frozen=True)
class TuringMachine:
    """A deterministic single-tape machine with one halting (accept) state.

    Acceptance is by reaching `halt`; rejection is an undefined transition.
    `delta` maps (state, read cell) to a transition and has no entries for
    the halt state.
    """

    states: frozenset[StateId]
    alphabet: frozenset[Symbol]
    initial: StateId
    halt: StateId
    delta: Mapping[tuple[StateId, Cell], Transition]

    def __post_init__(self):
        if self.initial not in self.states:
            raise MachineError(f"initial state {self.initial} not declared")
        if self.halt not in self.states:
            raise MachineError(f"halt state {self.halt} not declared")
        for (state, read), tr in self.delta.items():
            if state == self.halt:
                raise MachineError("transition from halt state")
            if state not in self.states:
                raise MachineError(f"transition from unknown state {state}")
            if read is not BLANK and read not in self.alphabet:
                raise MachineError(f"transition reads unknown symbol {read}")
            if tr.next_state not in self.states:
                raise MachineError(f"transition to unknown state {tr.next_state}")
            if tr.write not in self.alphabet:
                raise MachineError(f"transition writes unknown symbol {tr.write}")
        object.__setattr__(self, "delta", dict(self.delta))

    def summary(self) -> str:
        return (
            f"{len(self.states)} states, {len(self.alphabet)} symbols, "
            f"{len(self.delta)} transitions"
        )


@dataclass(frozen=True, slots=True)
class Configuration:
    """Tape, head position, and control state.

    `left` and `right` hold the stored cells strictly to either side of the
    head, nearest cell first; they never contain blanks.
    """

    left: tuple[Symbol, ...]
    current: Cell
    right: tuple[Symbol, ...]
    state: StateId

    def __post_init__(self):
        for cell in self.left + self.right:
            if not isinstance(cell, Symbol):
                raise MachineError("stored tape cells may not be blank")

    def __str__(self) -> str:
        left = " ".join(str(s) for s in reversed(self.left))
        right = " ".join(str(s) for s in self.right)
        return f"{self.state}: {left}[{self.current}]{right}"


class Verdict(enum.Enum):
    ACCEPTED = "Accepted"
    REJECTED = "Rejected"
    BUDGET_EXHAUSTED = "Budget-Exhausted"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class RunResult:
    verdict: Verdict
    steps: int
    final: Configuration
    trace: tuple[Configuration, ...] | None = None


@dataclass(frozen=True, slots=True)
class Next:
    config: Configuration


@dataclass(frozen=True, slots=True)
class Accept:
    pass


@dataclass(frozen=True, slots=True)
class Reject:
    pass


ACCEPT = Accept()
REJECT = Reject()

StepOutcome = Union[Next, Accept, Reject]


def initial_configuration(tm: TuringMachine, word: Sequence[Symbol]) -> Configuration:
    """Head on the first letter; on the empty word the head reads blank."""
    for sym in word:
        if sym not in tm.alphabet:
            raise MachineError(f"word symbol {sym} not in alphabet")
    if not word:
        return Configuration((), BLANK, (), tm.initial)
    return Configuration((), word[0], tuple(word[1:]), tm.initial)


def step(tm: TuringMachine, c: Configuration) -> StepOutcome:
    """Apply the transition function once.

    The halt check precedes the transition lookup, so a configuration in the
    halt state accepts regardless of the tape.
    """
    if c.state == tm.halt:
        return ACCEPT
    tr = tm.delta.get((c.state, c.current))
    if tr is None:
        return REJECT
    if tr.move is Direction.LEFT:
        new_current: Cell = c.left[0] if c.left else BLANK
        return Next(
            Configuration(c.left[1:], new_current, (tr.write,) + c.right, tr.next_state)
        )
    new_current = c.right[0] if c.right else BLANK
    return Next(
        Configuration((tr.write,) + c.left, new_current, c.right[1:], tr.next_state)
    )


def run(
    tm: TuringMachine,
    word: Sequence[Symbol],
    max_steps: int,
    record_trace: bool = False,
) -> RunResult:
    """Run from the initial configuration until accept, reject, or budget.

    `steps` counts applied transitions. A machine that halts exactly when
    the budget runs out is still reported as accepted or rejected.
    """
    c = initial_configuration(tm, word)
    trace = [c] if record_trace else None
    steps = 0
    while steps < max_steps:
        out = step(tm, c)
        if isinstance(out, Accept):
            return RunResult(Verdict.ACCEPTED, steps, c, _freeze(trace))
        if isinstance(out, Reject):
            return RunResult(Verdict.REJECTED, steps, c, _freeze(trace))
        c = out.config
        steps += 1
        if trace is not None:
            trace.append(c)
    out = step(tm, c)
    if isinstance(out, Accept):
        verdict = Verdict.ACCEPTED
    elif isinstance(out, Reject):
        verdict = Verdict.REJECTED
    else:
        verdict = Verdict.BUDGET_EXHAUSTED
    return RunResult(verdict, steps, c, _freeze(trace))


def _freeze(trace: list[Configuration] | None) -> tuple[Configuration, ...] | None:
    return None if trace is None else tuple(trace)


def word_from_text(tm: TuringMachine, text: str) -> tuple[Symbol, ...]:
    """Parse a word from CLI text.

    If every alphabet symbol is a single character the word is read
    character by character; otherwise symbols are comma separated.
    """
    if text == "":
        return ()
    by_name = {s.name: s for s in tm.alphabet}
    if all(len(name) == 1 for name in by_name):
        parts = list(text)
    else:
        parts = [p for p in text.split(",") if p]
    word = []
    for part in parts:
        if part not in by_name:
            raise MachineError(f"word symbol {part!r} not in alphabet")
        word.append(by_name[part])
    return tuple(word)


def word_text(word: Sequence[Symbol]) -> str:
    if not word:
        return ""
    names = [s.name for s in word]
    return "".join(names) if all(len(n) == 1 for n in names) else ",".join(names)


_SECTION_ORDER = ("states", "alphabet", "initial", "halt", "delta")


def parse_tm(text: str) -> TuringMachine:
    """Parse the `.tm` text format.

    Sections appear in the fixed order states/alphabet/initial/halt/delta.
    `#` starts a comment; whitespace between tokens is insignificant. The
    blank token `_` may appear only in the read position of a delta line.
    """
    lines: list[tuple[int, str]] = []
    for idx, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((idx, stripped))
    pos = 0

    def take_section(name: str) -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(len(text.splitlines()) + 1, f"missing '{name}:' section")
        lineno, content = lines[pos]
        head, _, rest = content.partition(":")
        if head.strip() != name or not content.startswith(head + ":"):
            raise ParseError(lineno, f"expected '{name}:' section, found {content!r}")
        pos += 1
        return lineno, rest.split()

    lineno, state_tokens = take_section("states")
    states: dict[str, StateId] = {}
    for tok in state_tokens:
        if tok in states:
            raise ParseError(lineno, f"duplicate state {tok!r}")
        try:
            states[tok] = StateId(tok)
        except MachineError as exc:
            raise ParseError(lineno, str(exc)) from exc
    if not states:
        raise ParseError(lineno, "at least one state is required")

    lineno, sym_tokens = take_section("alphabet")
    symbols: dict[str, Symbol] = {}
    for tok in sym_tokens:
        if tok in symbols:
            raise ParseError(lineno, f"duplicate symbol {tok!r}")
        try:
            symbols[tok] = Symbol(tok)
        except MachineError as exc:
            raise ParseError(lineno, str(exc)) from exc

    lineno, initial_tokens = take_section("initial")
    if len(initial_tokens) != 1:
        raise ParseError(lineno, "initial: expects exactly one state")
    if initial_tokens[0] not in states:
        raise ParseError(lineno, f"unknown initial state {initial_tokens[0]!r}")
    initial = states[initial_tokens[0]]

    lineno, halt_tokens = take_section("halt")
    if len(halt_tokens) != 1:
        raise ParseError(lineno, "halt: expects exactly one state")
    if halt_tokens[0] not in states:
        raise ParseError(lineno, f"unknown halt state {halt_tokens[0]!r}")
    halt = states[halt_tokens[0]]

    lineno, delta_rest = take_section("delta")
    if delta_rest:
        raise ParseError(lineno, "delta: header takes no tokens; rules follow on their own lines")

    delta: dict[tuple[StateId, Cell], Transition] = {}
    while pos < len(lines):
        lineno, content = lines[pos]
        pos += 1
        tokens = content.split()
        if len(tokens) != 6 or tokens[2] != "->":
            raise ParseError(
                lineno, "delta rule must look like 'state read -> next write move'"
            )
        state_tok, read_tok, _, next_tok, write_tok, move_tok = tokens
        if state_tok not in states:
            raise ParseError(lineno, f"unknown state {state_tok!r}")
        state = states[state_tok]
        if state == halt:
            raise ParseError(lineno, "transition from halt state")
        read: Cell
        if read_tok == BLANK_TOKEN:
            read = BLANK
        elif read_tok in symbols:
            read = symbols[read_tok]
        else:
            raise ParseError(lineno, f"unknown symbol {read_tok!r}")
        if next_tok not in states:
            raise ParseError(lineno, f"unknown state {next_tok!r}")
        if write_tok == BLANK_TOKEN:
            raise ParseError(lineno, "machines may not write blank")
        if write_tok not in symbols:
            raise ParseError(lineno, f"unknown symbol {write_tok!r}")
        if move_tok not in ("L", "R"):
            raise ParseError(lineno, f"direction must be L or R, found {move_tok!r}")
        key = (state, read)
        if key in delta:
            raise ParseError(lineno, f"duplicate transition for ({state_tok}, {read_tok})")
        delta[key] = Transition(
            states[next_tok],
            symbols[write_tok],
            Direction.LEFT if move_tok == "L" else Direction.RIGHT,
        )

    return TuringMachine(
        frozenset(states.values()), frozenset(symbols.values()), initial, halt, delta
    )
