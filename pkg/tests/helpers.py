"""Shared test utilities.

Holds the reverse parser for generated programs (test-only by design) and
a flat-tape reference interpreter used as an independent oracle for the
zipper-based one in the package.
"""

from __future__ import annotations

import ast

from tmsub.encoding import (
    BUFFER,
    GROUND,
    PARAM,
    WILDCARD,
    BufferAtom,
    CellAtom,
    ClassTable,
    InheritanceRule,
    StateAtom,
    StateTag,
    TypeAtom,
    TypeTerm,
    WildcardAtom,
)
from tmsub.tm import BLANK, Direction, StateId, Symbol, TuringMachine, Verdict


def unmangle(name: str) -> TypeAtom:
    if name == "Z":
        return GROUND
    if name == "N":
        return BUFFER
    if name == "Any":
        return WILDCARD
    if name == "X":
        return PARAM
    if name == "L_blank":
        return CellAtom(BLANK)
    if name.startswith("L_"):
        return CellAtom(Symbol(name[2:]))
    if name.startswith("Q_"):
        state_name, _, tag_name = name[2:].rpartition("_")
        return StateAtom(StateId(state_name), StateTag(tag_name))
    raise ValueError(f"cannot unmangle {name!r}")


def _flatten_subscript(node: ast.expr) -> list[TypeAtom]:
    """Turn a nested Name[Name[...]] expression into an atom chain."""
    atoms: list[TypeAtom] = []
    while isinstance(node, ast.Subscript):
        assert isinstance(node.value, ast.Name)
        atoms.append(unmangle(node.value.id))
        node = node.slice
    if isinstance(node, ast.Constant) and isinstance(node.value, str):
        return atoms + _flatten_subscript(ast.parse(node.value, mode="eval").body)
    assert isinstance(node, ast.Name)
    atoms.append(unmangle(node.id))
    return atoms


_BUFFER_BRIDGE = {
    StateTag.LRR: (6, False),
    StateTag.RLL: (6, True),
    StateTag.LBL: (7, False),
    StateTag.RBR: (7, True),
    StateTag.LBR: (8, False),
    StateTag.RBL: (8, True),
    StateTag.LR: (9, False),
    StateTag.RL: (9, True),
}

_TRANSIT = {
    StateTag.LRR: 2,
    StateTag.RLL: 2,
    StateTag.LBL: 3,
    StateTag.RBR: 3,
    StateTag.LBR: 4,
    StateTag.RBL: 4,
}


def classify_rule(head: TypeAtom, body: list[TypeAtom]) -> InheritanceRule:
    """Recover the full rule metadata from its head and body shape."""
    term = TypeTerm(tuple(body))
    if isinstance(head, BufferAtom):
        inner = body[0]
        assert isinstance(inner, StateAtom)
        rule_no, mirrored = _BUFFER_BRIDGE[inner.tag]
        return InheritanceRule(head, term, rule_no, mirrored, inner.state, None)
    assert isinstance(head, StateAtom)
    read = body[0]
    assert isinstance(read, CellAtom)
    if head.tag in (StateTag.LL, StateTag.RR):
        return InheritanceRule(
            head, term, 5, head.tag is StateTag.RR, head.state, read.cell
        )
    mirrored = head.tag is StateTag.R
    if isinstance(body[-1], WildcardAtom):
        return InheritanceRule(head, term, 10, mirrored, head.state, read.cell)
    second = body[1]
    if isinstance(second, BufferAtom):
        rule_no = 1
    else:
        assert isinstance(second, StateAtom)
        rule_no = _TRANSIT[second.tag]
    return InheritanceRule(head, term, rule_no, mirrored, head.state, read.cell)


def reverse_parse_program(source: str) -> tuple[ClassTable, str, str]:
    """Rebuild the class table and the query annotations from generated
    source text."""
    tree = ast.parse(source)
    rules: list[InheritanceRule] = []
    lhs = rhs = None
    for node in tree.body:
        if isinstance(node, ast.ClassDef):
            head = unmangle(node.name)
            for base in node.bases:
                assert isinstance(base, ast.Subscript)
                assert isinstance(base.value, ast.Name)
                if base.value.id == "Generic":
                    continue
                atoms = _flatten_subscript(base)
                rules.append(classify_rule(head, atoms))
        elif isinstance(node, ast.FunctionDef):
            lhs = ast.unparse(node.args.args[0].annotation)
            body_stmt = node.body[0]
            assert isinstance(body_stmt, ast.AnnAssign)
            rhs = ast.unparse(body_stmt.annotation)
    assert lhs is not None and rhs is not None
    return ClassTable.from_rules(rules), lhs, rhs


def flat_tape_run(tm: TuringMachine, word, max_steps: int):
    """Independent reference interpreter over a position-indexed tape.

    Returns (verdict, steps, tape dict, head, state) so tests can compare
    against the zipper representation.
    """
    tape = {i: sym for i, sym in enumerate(word)}
    head = 0
    state = tm.initial
    steps = 0
    while True:
        if state == tm.halt:
            return Verdict.ACCEPTED, steps, tape, head, state
        tr = tm.delta.get((state, tape.get(head, BLANK)))
        if tr is None:
            return Verdict.REJECTED, steps, tape, head, state
        if steps >= max_steps:
            return Verdict.BUDGET_EXHAUSTED, steps, tape, head, state
        tape[head] = tr.write
        head += 1 if tr.move is Direction.RIGHT else -1
        state = tr.next_state
        steps += 1


def config_as_flat(config) -> tuple[dict[int, Symbol], int]:
    """A configuration's stored cells as a position dict with the head
    at 0."""
    tape: dict[int, Symbol] = {}
    for i, sym in enumerate(config.left):
        tape[-(i + 1)] = sym
    if config.current is not BLANK:
        tape[0] = config.current
    for i, sym in enumerate(config.right):
        tape[i + 1] = sym
    return tape, 0
