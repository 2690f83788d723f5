"""Emit self-contained Python type-hint programs for external checkers.

The generated file declares the class table as Python generic classes with
one shared contravariant type variable, then poses the subtyping query as
a function whose parameter is annotated with the subtype and assigned to a
local annotated with the supertype. Running a type checker on the file
performs the same deduction sequence as the engine: the file checks
cleanly when the machine accepts and reports an assignment error when it
rejects.

Every base-class type argument is a single string literal (the forward
reference form), because the inheritance graph is cyclic: the buffer class
derives state classes whose own bases mention the buffer class, so no
definition order works unquoted. Emission is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from . import __version__
from .encoding import (
    BufferAtom,
    CellAtom,
    ClassTable,
    EncodingError,
    GroundAtom,
    InheritanceRule,
    ParamAtom,
    StateAtom,
    SubtypeQuery,
    TypeAtom,
    TypeTerm,
    WildcardAtom,
    decode_query,
    mangle,
)
from .tm import BLANK, word_text

TYPE_VAR = "X"

LISTING_DEMO = '''from typing import TypeVar, Generic, Any
Z = TypeVar("Z", contravariant=True)
class N(Generic[Z]): ...
X = TypeVar("X")
class C(Generic[X], N[N["C[C[X]]"]]): ...
_: N[C[Any]] = C[Any]() # infinite subtyping
'''


@dataclass(frozen=True, slots=True)
class GeneratedProgram:
    source: str
    lhs_annotation: str
    rhs_annotation: str
    class_count: int


def render_nested(atoms: Iterable[TypeAtom]) -> str:
    """Right-nested bracket application of mangled names."""
    names = []
    for atom in atoms:
        names.append(TYPE_VAR if isinstance(atom, ParamAtom) else mangle(atom))
    out = names[-1]
    for name in reversed(names[:-1]):
        out = f"{name}[{out}]"
    return out


def _base_expr(body: TypeTerm) -> str:
    """A rule body as a base-class expression with the whole type argument
    in one string literal."""
    outer = mangle(body.atoms[0])
    return f'{outer}["{render_nested(body.atoms[1:])}"]'


def emit_program(
    t: ClassTable, q: SubtypeQuery, *, machine_name: str = "machine"
) -> GeneratedProgram:
    """Generate the program for class table `t` posing query `q`.

    `q` must come from the same machine as `t`; the query's classes are
    checked against the table's class universe.
    """
    by_head: dict[TypeAtom, list[InheritanceRule]] = {}
    atoms: set[TypeAtom] = {GroundAtom(), BufferAtom()}
    for rule in t.rules:
        by_head.setdefault(rule.head, []).append(rule)
        atoms.add(rule.head)
        for atom in rule.body.atoms:
            if not isinstance(atom, (ParamAtom, WildcardAtom)):
                atoms.add(atom)
    for atom in q.sub.atoms + q.sup.atoms:
        if isinstance(atom, (StateAtom, CellAtom)) and atom not in atoms:
            raise EncodingError(f"query class {mangle(atom)} is not in the class table")

    names: dict[str, TypeAtom] = {}
    for atom in atoms:
        name = mangle(atom)
        if name in names and names[name] != atom:
            raise EncodingError(f"mangling collision on {name!r}")
        if name in ("Any", "Generic", "TypeVar", TYPE_VAR):
            raise EncodingError(f"mangled name {name!r} collides with a reserved name")
        names[name] = atom

    cells = sorted(
        (a for a in atoms if isinstance(a, CellAtom)), key=mangle
    )
    states = sorted(
        (a for a in atoms if isinstance(a, StateAtom)),
        key=lambda a: (a.state.name, a.tag.value),
    )

    word = decode_query(q)
    word_cells = () if word.current is BLANK else (word.current, *word.right)
    header_word = word_text(word_cells) or "(empty)"  # type: ignore[arg-type]

    lines = [
        f"# generated by tmsub {__version__}: machine={machine_name} word={header_word}",
        "from typing import Any, Generic, TypeVar",
        "",
        f'{TYPE_VAR} = TypeVar("{TYPE_VAR}", contravariant=True)',
        "",
        "class Z: ...",
        "",
    ]
    for cell in cells:
        lines.append(f"class {mangle(cell)}(Generic[{TYPE_VAR}]): ...")
    lines.append("")
    for state in states:
        bases = ", ".join(_base_expr(r.body) for r in by_head.get(state, ()))
        if bases:
            lines.append(f"class {mangle(state)}(Generic[{TYPE_VAR}], {bases}): ...")
        else:
            lines.append(f"class {mangle(state)}(Generic[{TYPE_VAR}]): ...")
    lines.append("")
    buffer_bases = ", ".join(_base_expr(r.body) for r in by_head.get(BufferAtom(), ()))
    if buffer_bases:
        lines.append(f"class N(Generic[{TYPE_VAR}], {buffer_bases}): ...")
    else:
        lines.append(f"class N(Generic[{TYPE_VAR}]): ...")
    lines.append("")

    lhs = render_nested(q.sub.atoms)
    rhs = render_nested(q.sup.atoms)
    lines.append(f"def check(v: {lhs}) -> None:")
    lines.append(f"    w: {rhs} = v")
    lines.append("")

    class_count = 2 + len(cells) + len(states)
    return GeneratedProgram("\n".join(lines), lhs, rhs, class_count)


def emit_listing_demo() -> GeneratedProgram:
    """The fixed six-line divergence demo: a class whose expansively
    recursive inheritance sends any checker into an unbounded derivation."""
    return GeneratedProgram(LISTING_DEMO, "C[Any]", "N[C[Any]]", 2)
