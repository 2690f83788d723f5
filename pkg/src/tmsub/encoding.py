"""Class-table construction and query encoding for subtyping machines.

A machine compiles to a table of single-parameter inheritance rules over
five kinds of classes: a ground terminator Z, a buffer N, one cell class
L_a per symbol (plus L_blank), and state classes Q_s tagged with a
movement annotation. The running machine state is a subtyping query, a
pair of type terms; the term on the subtype side is headed by a state
class whenever a simulated transition is about to begin (canonical form).

Orientation conventions, fixed throughout the package:

* A state tag of R means the head is travelling right: the supertype side
  holds the current cell followed by the cells to the right (nearest
  first), the subtype side holds the state class followed by the cells to
  the left. A tag of L is the mirror image.
* Both tape ends always carry exactly one explicit blank cell before the
  terminator (the sentinel `L_blank N Z`); it decodes to zero stored cells.
* Queries are displayed with the tape reading left to right, so one side
  is printed reversed. `display_flip` False prints `reversed(sub) <sym> sup`
  with the symbol for "left side is the subtype"; True prints
  `reversed(sup) <sym> sub` with the reversed-subtype symbol.

All values are immutable and operations are pure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import chain
from typing import Iterable, Mapping, Sequence, Union

from .tm import (
    BLANK,
    Cell,
    Configuration,
    Direction,
    StateId,
    Symbol,
    TuringMachine,
)


class EncodingError(ValueError):
    """A term, rule, or query violates a structural invariant."""


class DecodeError(EncodingError):
    """A query cannot be read back as a machine configuration."""


class StateTag(enum.Enum):
    """Movement annotation on a state class.

    L and R are the canonical travel directions. The other ten values are
    transient within a single transition burst: doubled tags wind up a
    two-cell move, the *B* tags handle a blank cell at a tape end (B spells
    the encoded-blank marker in generated identifiers), and LR/RL are the
    pivots of a direction change at a tape end.
    """

    L = "L"
    R = "R"
    LL = "LL"
    RR = "RR"
    LR = "LR"
    RL = "RL"
    LRR = "LRR"
    RLL = "RLL"
    LBL = "LBL"
    LBR = "LBR"
    RBR = "RBR"
    RBL = "RBL"

    def __str__(self) -> str:
        return self.value


CANONICAL_TAGS = (StateTag.L, StateTag.R)


@dataclass(frozen=True, slots=True)
class GroundAtom:
    """Z, the ground terminator with no supertypes."""


@dataclass(frozen=True, slots=True)
class BufferAtom:
    """N, the buffer class separating cell classes."""


@dataclass(frozen=True, slots=True)
class CellAtom:
    """L_a for a symbol a, or L_blank for the encoded blank."""

    cell: Cell


@dataclass(frozen=True, slots=True)
class StateAtom:
    """Q_s with a movement tag."""

    state: StateId
    tag: StateTag


@dataclass(frozen=True, slots=True)
class WildcardAtom:
    """The type consistent with any type; terminates accepting derivations."""


@dataclass(frozen=True, slots=True)
class ParamAtom:
    """The rule parameter; appears only inside rule bodies."""


TypeAtom = Union[GroundAtom, BufferAtom, CellAtom, StateAtom, WildcardAtom, ParamAtom]

GROUND = GroundAtom()
BUFFER = BufferAtom()
WILDCARD = WildcardAtom()
PARAM = ParamAtom()

_TERMINATORS = (GroundAtom, WildcardAtom, ParamAtom)


def is_terminator(atom: TypeAtom) -> bool:
    return isinstance(atom, _TERMINATORS)


@dataclass(frozen=True, slots=True)
class TypeTerm:
    """A chain of unary type applications, outermost first.

    Exactly one terminator (Z, wildcard, or parameter) and it is last.
    """

    atoms: tuple[TypeAtom, ...]

    def __post_init__(self):
        if not self.atoms:
            raise EncodingError("empty type term")
        if not is_terminator(self.atoms[-1]):
            raise EncodingError("type term must end in a terminator")
        for atom in self.atoms[:-1]:
            if is_terminator(atom):
                raise EncodingError("terminator in non-final position")

    @property
    def head(self) -> TypeAtom:
        return self.atoms[0]

    def __str__(self) -> str:
        return " ".join(mangle(a) if not isinstance(a, ParamAtom) else "x" for a in self.atoms)


@dataclass(frozen=True, slots=True)
class InheritanceRule:
    """One `head derives body` entry of the class table.

    `rule_no` is the table row (1..10); `mirrored` marks the left/right
    swapped variant. `state` and `symbol` record the instantiating pair
    (symbol is None for the buffer bridge rules 6..9).
    """

    head: TypeAtom
    body: TypeTerm
    rule_no: int
    mirrored: bool
    state: StateId | None
    symbol: Cell | None

    def __post_init__(self):
        if not isinstance(self.head, (StateAtom, BufferAtom)):
            raise EncodingError("rule head must be a state or buffer class")
        wildcard_body = isinstance(self.body.atoms[-1], WildcardAtom)
        if wildcard_body != (self.rule_no == 10):
            raise EncodingError("only rule 10 bodies end in the wildcard")

    def sort_key(self):
        state = self.state.name if self.state is not None else ""
        if self.symbol is None:
            symbol = ""
        elif self.symbol is BLANK:
            symbol = "￿"  # blank sorts after any symbol name
        else:
            symbol = self.symbol.name
        return (self.rule_no, state, symbol, self.mirrored)


@dataclass(frozen=True)
class ClassTable:
    """The full rule set with a lookup index.

    The index maps (head class, outermost body class) to the unique rule;
    determinism of the source machine guarantees at most one rule per key.
    """

    rules: tuple[InheritanceRule, ...]
    index: Mapping[tuple[TypeAtom, TypeAtom], InheritanceRule] = field(compare=False)

    @classmethod
    def from_rules(cls, rules: Iterable[InheritanceRule]) -> "ClassTable":
        ordered = tuple(sorted(rules, key=InheritanceRule.sort_key))
        index: dict[tuple[TypeAtom, TypeAtom], InheritanceRule] = {}
        for rule in ordered:
            key = (rule.head, rule.body.head)
            if key in index:
                raise EncodingError(f"internal error: rule index collision on {key}")
            index[key] = rule
        return cls(ordered, index)


@dataclass(frozen=True, slots=True)
class SubtypeQuery:
    """A subtyping obligation `sub <: sup` plus its display orientation."""

    sub: TypeTerm
    sup: TypeTerm
    display_flip: bool = False

    def __post_init__(self):
        for term in (self.sub, self.sup):
            for atom in term.atoms:
                if isinstance(atom, ParamAtom):
                    raise EncodingError("queries may not contain the rule parameter")


SENTINEL = (CellAtom(BLANK), BUFFER, GROUND)


def _tag(direction: Direction) -> StateTag:
    return StateTag.L if direction is Direction.LEFT else StateTag.R


_TURN_TAGS = {Direction.LEFT: StateTag.LRR, Direction.RIGHT: StateTag.RLL}
_BLANK_KEEP_TAGS = {Direction.LEFT: StateTag.LBL, Direction.RIGHT: StateTag.RBR}
_BLANK_TURN_TAGS = {Direction.LEFT: StateTag.LBR, Direction.RIGHT: StateTag.RBL}


def build_class_table(tm: TuringMachine) -> ClassTable:
    """Instantiate every table rule (and its mirror) for the machine.

    Per transition there are two rules, one for each travel direction of
    the head when it meets the read cell. Rules 5..9 are emitted for every
    state, rule 10 for the halt state and every cell kind. The total count
    is exactly 2*|delta| + 2*|Q|*|S| + 8*|Q| + 2*(|S|+1).
    """
    rules: list[InheritanceRule] = []
    states = sorted(tm.states, key=lambda s: s.name)
    symbols = sorted(tm.alphabet, key=lambda s: s.name)

    def delta_key(item):
        (state, read), _ = item
        read_key = "￿" if read is BLANK else read.name
        return (state.name, read_key)

    for (state, read), tr in sorted(tm.delta.items(), key=delta_key):
        next_q = tr.next_state
        write = CellAtom(tr.write)
        for facing in (Direction.LEFT, Direction.RIGHT):
            keeps = tr.move is facing
            head = StateAtom(state, _tag(facing))
            if read is not BLANK:
                cell = CellAtom(read)
                if keeps:
                    rule_no = 1
                    body = (cell, BUFFER, StateAtom(next_q, _tag(facing)), write, BUFFER, PARAM)
                else:
                    rule_no = 2
                    body = (cell, StateAtom(next_q, _TURN_TAGS[facing]), BUFFER, write, BUFFER, PARAM)
            else:
                cell = CellAtom(BLANK)
                if keeps:
                    rule_no = 3
                    mid = StateAtom(next_q, _BLANK_KEEP_TAGS[facing])
                else:
                    rule_no = 4
                    mid = StateAtom(next_q, _BLANK_TURN_TAGS[facing])
                body = (cell, mid, BUFFER, write, BUFFER, PARAM)
            rules.append(
                InheritanceRule(
                    head,
                    TypeTerm(body),
                    rule_no,
                    mirrored=facing is Direction.RIGHT,
                    state=state,
                    symbol=read,
                )
            )

    for state in states:
        for sym in symbols:
            cell = CellAtom(sym)
            for doubled, single, mirrored in (
                (StateTag.LL, StateTag.L, False),
                (StateTag.RR, StateTag.R, True),
            ):
                rules.append(
                    InheritanceRule(
                        StateAtom(state, doubled),
                        TypeTerm((cell, BUFFER, StateAtom(state, single), cell, BUFFER, PARAM)),
                        5,
                        mirrored=mirrored,
                        state=state,
                        symbol=sym,
                    )
                )

    blank_cell = CellAtom(BLANK)
    for state in states:
        bridge_bodies = [
            (6, False, (StateAtom(state, StateTag.LRR), BUFFER, StateAtom(state, StateTag.RR), PARAM)),
            (6, True, (StateAtom(state, StateTag.RLL), BUFFER, StateAtom(state, StateTag.LL), PARAM)),
            (7, False, (StateAtom(state, StateTag.LBL), StateAtom(state, StateTag.RL), BUFFER, blank_cell, BUFFER, PARAM)),
            (7, True, (StateAtom(state, StateTag.RBR), StateAtom(state, StateTag.LR), BUFFER, blank_cell, BUFFER, PARAM)),
            (8, False, (StateAtom(state, StateTag.LBR), BUFFER, StateAtom(state, StateTag.RR), blank_cell, BUFFER, PARAM)),
            (8, True, (StateAtom(state, StateTag.RBL), BUFFER, StateAtom(state, StateTag.LL), blank_cell, BUFFER, PARAM)),
            (9, False, (StateAtom(state, StateTag.LR), BUFFER, StateAtom(state, StateTag.R), PARAM)),
            (9, True, (StateAtom(state, StateTag.RL), BUFFER, StateAtom(state, StateTag.L), PARAM)),
        ]
        for rule_no, mirrored, body in bridge_bodies:
            rules.append(
                InheritanceRule(
                    BUFFER, TypeTerm(body), rule_no, mirrored=mirrored, state=state, symbol=None
                )
            )

    for cell in [CellAtom(s) for s in symbols] + [blank_cell]:
        for tag, mirrored in ((StateTag.L, False), (StateTag.R, True)):
            rules.append(
                InheritanceRule(
                    StateAtom(tm.halt, tag),
                    TypeTerm((cell, BUFFER, WILDCARD)),
                    10,
                    mirrored=mirrored,
                    state=tm.halt,
                    symbol=cell.cell,
                )
            )

    return ClassTable.from_rules(rules)


def expected_rule_count(tm: TuringMachine) -> int:
    return (
        2 * len(tm.delta)
        + 2 * len(tm.states) * len(tm.alphabet)
        + 8 * len(tm.states)
        + 2 * (len(tm.alphabet) + 1)
    )


def _cell_pairs(cells: Iterable[Symbol]) -> tuple[TypeAtom, ...]:
    return tuple(chain.from_iterable((CellAtom(c), BUFFER) for c in cells))


def initial_query(tm: TuringMachine, word: Sequence[Symbol]) -> SubtypeQuery:
    """Encode the initial configuration: head travelling right on the
    first letter, state class on the subtype side, word on the supertype
    side, sentinels at both ends."""
    for sym in word:
        if sym not in tm.alphabet:
            raise EncodingError(f"word symbol {sym} not in alphabet")
    sub = TypeTerm((StateAtom(tm.initial, StateTag.R),) + SENTINEL)
    sup = TypeTerm(_cell_pairs(word) + SENTINEL)
    return SubtypeQuery(sub, sup, display_flip=False)


def canonical_tag(q: SubtypeQuery) -> StateTag | None:
    head = q.sub.head
    if isinstance(head, StateAtom) and head.tag in CANONICAL_TAGS:
        return head.tag
    return None


def _read_tape(atoms: Sequence[TypeAtom], start: int) -> list[Cell]:
    """Read alternating cell/buffer pairs up to the ground terminator."""
    cells: list[Cell] = []
    i = start
    n = len(atoms)
    while True:
        if i >= n:
            raise DecodeError("missing ground terminator")
        atom = atoms[i]
        if isinstance(atom, GroundAtom):
            return cells
        if not isinstance(atom, CellAtom):
            raise DecodeError(f"expected a cell class, found {mangle(atom)}")
        if i + 1 >= n or not isinstance(atoms[i + 1], BufferAtom):
            raise DecodeError("cell class not followed by a single buffer")
        cells.append(atom.cell)
        i += 2


def _strip_sentinel(cells: list[Cell]) -> tuple[Symbol, ...]:
    end = len(cells)
    while end and cells[end - 1] is BLANK:
        end -= 1
    stored = cells[:end]
    if any(c is BLANK for c in stored):
        raise DecodeError("blank cell between stored symbols")
    return tuple(stored)  # type: ignore[arg-type]


def decode_atoms(
    sub_atoms: Sequence[TypeAtom],
    sub_start: int,
    sup_atoms: Sequence[TypeAtom],
    sup_start: int,
) -> Configuration:
    """Decode raw canonical term views; shared with the engine hot path."""
    head = sub_atoms[sub_start] if sub_start < len(sub_atoms) else None
    if not isinstance(head, StateAtom) or head.tag not in CANONICAL_TAGS:
        raise DecodeError("query is not in canonical form")
    ahead = _strip_sentinel(_read_tape(sup_atoms, sup_start))
    behind = _strip_sentinel(_read_tape(sub_atoms, sub_start + 1))
    current: Cell = ahead[0] if ahead else BLANK
    forward = ahead[1:]
    if head.tag is StateTag.R:
        left, right = behind, forward
    else:
        left, right = forward, behind
    return Configuration(left, current, right, head.state)


def decode_query(q: SubtypeQuery) -> Configuration:
    """Read the machine configuration out of a canonical query.

    For a right-travelling state the supertype side yields the current
    cell and right tape and the subtype side the left tape; a
    left-travelling state is symmetric. Trailing blank sentinels decode to
    no stored cells.
    """
    return decode_atoms(q.sub.atoms, 0, q.sup.atoms, 0)


def encode_configuration(c: Configuration, facing: Direction) -> SubtypeQuery:
    """Encode a configuration as the canonical query with the given travel
    direction. The inverse of decode_query up to sentinel normalization."""
    if facing is Direction.RIGHT:
        ahead_cells, behind_cells = (c.current, *c.right), c.left
    else:
        ahead_cells, behind_cells = (c.current, *c.left), c.right
    if ahead_cells[0] is BLANK:
        if len(ahead_cells) > 1:
            raise EncodingError("blank under the head with stored cells ahead")
        ahead_cells = ()
    sub = TypeTerm(
        (StateAtom(c.state, _tag(facing)),) + _cell_pairs(behind_cells) + SENTINEL
    )
    sup = TypeTerm(_cell_pairs(ahead_cells) + SENTINEL)  # type: ignore[arg-type]
    return SubtypeQuery(sub, sup, display_flip=facing is Direction.LEFT)


def mangle(atom: TypeAtom) -> str:
    """Map an atom to its generated-code identifier.

    Injective over the atoms of any one machine unless symbol names
    collide with the fixed spellings (checked at emission time).
    """
    if isinstance(atom, GroundAtom):
        return "Z"
    if isinstance(atom, BufferAtom):
        return "N"
    if isinstance(atom, WildcardAtom):
        return "Any"
    if isinstance(atom, CellAtom):
        return "L_blank" if atom.cell is BLANK else f"L_{atom.cell.name}"
    if isinstance(atom, StateAtom):
        return f"Q_{atom.state.name}_{atom.tag.value}"
    raise EncodingError("the rule parameter has no mangled name")


def render_query(q: SubtypeQuery) -> str:
    """Display form: the tape reads left to right, one side reversed."""
    sub_words = [mangle(a) for a in q.sub.atoms]
    sup_words = [mangle(a) for a in q.sup.atoms]
    if q.display_flip:
        return " ".join(reversed(sup_words)) + " ⊐ " + " ".join(sub_words)
    return " ".join(reversed(sub_words)) + " ⊏ " + " ".join(sup_words)


def _notation_atom(atom: TypeAtom) -> str:
    if isinstance(atom, ParamAtom):
        return "x"
    if isinstance(atom, WildcardAtom):
        return "?"
    return mangle(atom)


def rule_notation(rule: InheritanceRule) -> str:
    body = " ".join(_notation_atom(a) for a in rule.body.atoms)
    return f"{mangle(rule.head)}[x] : {body}"


def rule_comment(rule: InheritanceRule) -> str:
    mirror = " mirrored" if rule.mirrored else ""
    if rule.rule_no in (1, 2, 3, 4):
        read = "_" if rule.symbol is BLANK else rule.symbol.name  # type: ignore[union-attr]
        return f"rule {rule.rule_no}{mirror}, delta({rule.state},{read})"
    if rule.rule_no == 5:
        return f"rule 5{mirror}, state {rule.state}, symbol {rule.symbol}"
    if rule.rule_no == 10:
        sym = "_" if rule.symbol is BLANK else rule.symbol.name  # type: ignore[union-attr]
        return f"rule 10{mirror}, halt {rule.state}, symbol {sym}"
    return f"rule {rule.rule_no}{mirror}, state {rule.state}"


def table_lines(table: ClassTable) -> list[str]:
    """One line per rule in table notation, stably ordered."""
    return [f"{rule_notation(r)}   # {rule_comment(r)}" for r in table.rules]
