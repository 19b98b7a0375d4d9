"""Formula language: AST, parser, printer and scheme instantiation.

The grammar, loosest binding first::

    formula  := imp
    imp      := disj [ "->" imp ]
    disj     := conj { "|" conj }
    conj     := unary { "&" unary }
    unary    := "~" unary | modal unary | atomexpr
    modal    := "W" | "box" | "dia" | "bbox" | "bullet" | "N" | "circ"
    atomexpr := ident | metavariable | "false" | "(" formula ")"

Atoms are lowercase identifiers, metavariables single uppercase letters
(other than the operator letters ``W`` and ``N``).  Negation and ``circ`` are
sugar: ``~A`` is ``A -> false`` and ``circ A`` is ``~ bullet A``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

__all__ = [
    "ModalOp", "Formula", "Bottom", "Atom", "Meta", "And", "Or", "Imp", "Modal",
    "BOTTOM", "TOP", "ParseError", "SchemeError", "Scheme",
    "parse", "parse_scheme", "render", "instantiate", "neg", "iff", "circ",
    "atoms", "metavariables", "subformulas", "rename_atoms", "is_modal_free",
    "random_formula",
]


class ModalOp(enum.Enum):
    W = "W"
    BOX = "box"
    DIA = "dia"
    BBOX = "bbox"
    BULLET = "bullet"
    N = "N"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Meta:
    """A scheme metavariable, instantiated by :func:`instantiate`."""

    name: str


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Modal:
    op: ModalOp
    body: "Formula"


Formula = Union[Bottom, Atom, Meta, And, Or, Imp, Modal]

BOTTOM = Bottom()
TOP = Imp(BOTTOM, BOTTOM)


def neg(f: Formula) -> Formula:
    return Imp(f, BOTTOM)


def iff(f: Formula, g: Formula) -> Formula:
    return And(Imp(f, g), Imp(g, f))


def circ(f: Formula) -> Formula:
    return neg(Modal(ModalOp.BULLET, f))


# ---------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    """Raised on malformed input; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, pos: int, expected: tuple[str, ...] = ()):
        self.pos = pos
        self.expected = expected
        detail = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at position {pos}{detail}")


_KEYWORD_OPS = {
    "box": ModalOp.BOX,
    "dia": ModalOp.DIA,
    "bbox": ModalOp.BBOX,
    "bullet": ModalOp.BULLET,
    "W": ModalOp.W,
    "N": ModalOp.N,
}

_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<sym>[~&|()])|(?P<lower>[a-z][a-z0-9_]*)|(?P<upper>[A-Z][A-Za-z0-9_]*))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        value = m.group(m.lastgroup)
        kind = m.lastgroup
        if kind == "upper":
            if value in ("W", "N"):
                kind = "op"
            elif len(value) == 1:
                kind = "meta"
            else:
                raise ParseError(f"unknown operator keyword {value!r}", start)
        elif kind == "lower":
            if value in _KEYWORD_OPS or value == "circ":
                kind = "op"
            elif value == "false":
                kind = "false"
            else:
                kind = "ident"
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at(self, value: str) -> bool:
        kind, v, _ = self.peek()
        return kind in ("arrow", "sym") and v == value

    def formula(self) -> Formula:
        left = self.disj()
        if self.at("->"):
            self.advance()
            return Imp(left, self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.at("|"):
            self.advance()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "sym" and value == "~":
            self.advance()
            return neg(self.unary())
        if kind == "op":
            self.advance()
            body = self.unary()
            if value == "circ":
                return circ(body)
            return Modal(_KEYWORD_OPS[value], body)
        return self.atomexpr()

    def atomexpr(self) -> Formula:
        kind, value, pos = self.advance()
        if kind == "ident":
            return Atom(value)
        if kind == "meta":
            return Meta(value)
        if kind == "false":
            return BOTTOM
        if kind == "sym" and value == "(":
            f = self.formula()
            kind, value, pos = self.advance()
            if not (kind == "sym" and value == ")"):
                raise ParseError(f"unexpected {_describe(kind, value)}", pos, ("')'",))
            return f
        raise ParseError(
            f"unexpected {_describe(kind, value)}", pos,
            ("atom", "metavariable", "'false'", "'('", "'~'", "modal operator"),
        )


def _describe(kind: str, value: str) -> str:
    return "end of input" if kind == "eof" else repr(value)


def parse(text: str) -> Formula:
    """Parse ``text`` into a formula.  Metavariables are allowed."""
    p = _Parser(text)
    f = p.formula()
    kind, value, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected {_describe(kind, value)}", pos, ("'->'", "'|'", "'&'", "end of input"))
    return f


# ---------------------------------------------------------------------------
# printing

def render(f: Formula) -> str:
    """Print ``f`` with the fewest parentheses the grammar allows."""
    return _render_imp(f)


def _render_imp(f: Formula) -> str:
    if isinstance(f, Imp) and not isinstance(f.right, Bottom):
        return f"{_render_disj(f.left)} -> {_render_imp(f.right)}"
    return _render_disj(f)


def _render_disj(f: Formula) -> str:
    if isinstance(f, Or):
        return f"{_render_disj(f.left)} | {_render_conj(f.right)}"
    return _render_conj(f)


def _render_conj(f: Formula) -> str:
    if isinstance(f, And):
        return f"{_render_conj(f.left)} & {_render_unary(f.right)}"
    return _render_unary(f)


def _render_unary(f: Formula) -> str:
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, (Atom, Meta)):
        return f.name
    if isinstance(f, Imp) and isinstance(f.right, Bottom):
        return "~" + _render_unary(f.left)
    if isinstance(f, Modal):
        return f"{f.op.value} {_render_unary(f.body)}"
    return f"({_render_imp(f)})"


# ---------------------------------------------------------------------------
# schemes

class SchemeError(ValueError):
    pass


@dataclass(frozen=True)
class Scheme:
    """A formula over metavariables, e.g. ``W A -> ~A``."""

    formula: Formula

    @property
    def metavariables(self) -> tuple[str, ...]:
        return metavariables(self.formula)

    @property
    def arity(self) -> int:
        return len(self.metavariables)

    def __str__(self) -> str:
        return render(self.formula)


def parse_scheme(text: str) -> Scheme:
    return Scheme(parse(text))


def instantiate(scheme: Scheme | Formula, assignment: Mapping[str, Formula]) -> Formula:
    """Replace every metavariable by its bound formula."""
    f = scheme.formula if isinstance(scheme, Scheme) else scheme
    missing = [m for m in metavariables(f) if m not in assignment]
    if missing:
        raise SchemeError(f"missing binding for metavariable(s) {', '.join(missing)}")
    return _subst(f, assignment)


def _subst(f: Formula, sigma: Mapping[str, Formula]) -> Formula:
    if isinstance(f, Meta):
        return sigma[f.name]
    if isinstance(f, (Bottom, Atom)):
        return f
    if isinstance(f, Modal):
        return Modal(f.op, _subst(f.body, sigma))
    return type(f)(_subst(f.left, sigma), _subst(f.right, sigma))


# ---------------------------------------------------------------------------
# traversal helpers

def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield the distinct subformulas of ``f`` in post-order (children first)."""
    seen: set = set()

    def walk(g: Formula) -> Iterator[Formula]:
        if g in seen:
            return
        if isinstance(g, Modal):
            yield from walk(g.body)
        elif isinstance(g, (And, Or, Imp)):
            yield from walk(g.left)
            yield from walk(g.right)
        if g not in seen:
            seen.add(g)
            yield g

    yield from walk(f)


def atoms(f: Formula) -> tuple[str, ...]:
    """Atom names in order of first occurrence."""
    return tuple(dict.fromkeys(g.name for g in _preorder(f) if isinstance(g, Atom)))


def metavariables(f: Formula) -> tuple[str, ...]:
    return tuple(dict.fromkeys(g.name for g in _preorder(f) if isinstance(g, Meta)))


def _preorder(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, Modal):
            stack.append(g.body)
        elif isinstance(g, (And, Or, Imp)):
            stack.append(g.right)
            stack.append(g.left)


def is_modal_free(f: Formula) -> bool:
    return not any(isinstance(g, Modal) for g in _preorder(f))


def rename_atoms(f: Formula, mapping: Mapping[str, str]) -> Formula:
    if isinstance(f, Atom):
        return Atom(mapping.get(f.name, f.name))
    if isinstance(f, (Bottom, Meta)):
        return f
    if isinstance(f, Modal):
        return Modal(f.op, rename_atoms(f.body, mapping))
    return type(f)(rename_atoms(f.left, mapping), rename_atoms(f.right, mapping))


def random_formula(rng, depth: int, atom_names=("p", "q", "r"), ops=tuple(ModalOp)) -> Formula:
    """Draw a random formula of depth at most ``depth``.

    ``rng`` is a :class:`random.Random`; leaves are atoms or ``false``.
    """
    if depth <= 0 or rng.random() < 0.2:
        if rng.random() < 0.1:
            return BOTTOM
        return Atom(rng.choice(atom_names))
    kind = rng.randrange(5)
    if kind == 0:
        return And(random_formula(rng, depth - 1, atom_names, ops), random_formula(rng, depth - 1, atom_names, ops))
    if kind == 1:
        return Or(random_formula(rng, depth - 1, atom_names, ops), random_formula(rng, depth - 1, atom_names, ops))
    if kind == 2:
        return Imp(random_formula(rng, depth - 1, atom_names, ops), random_formula(rng, depth - 1, atom_names, ops))
    if kind == 3 and ops:
        return Modal(rng.choice(ops), random_formula(rng, depth - 1, atom_names, ops))
    return neg(random_formula(rng, depth - 1, atom_names, ops))
