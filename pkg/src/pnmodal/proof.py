"""Hilbert-style derivation checking."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Union

from .formula import And, Atom, Bottom, Formula, Imp, Meta, Modal, Scheme, instantiate, parse, render
from .logics import LogicSpec, RuleId, logic_spec, rule_instance

__all__ = [
    "Premise", "Axiom", "MP", "RE", "WN", "BKRule", "Line", "Derivation", "DerivationError",
    "match_scheme", "check_derivation",
]


def match_scheme(f: Formula, s: Scheme | Formula) -> dict | None:
    """The assignment ``sigma`` with ``instantiate(s, sigma) == f``, or ``None``."""
    pattern = s.formula if isinstance(s, Scheme) else s
    sigma: dict = {}
    return sigma if _match(pattern, f, sigma) else None


def _match(p: Formula, f: Formula, sigma: dict) -> bool:
    if isinstance(p, Meta):
        bound = sigma.get(p.name)
        if bound is None:
            sigma[p.name] = f
            return True
        return bound == f
    if isinstance(p, (Bottom, Atom)):
        return p == f
    if type(p) is not type(f):
        return False
    if isinstance(p, Modal):
        return p.op is f.op and _match(p.body, f.body, sigma)
    return _match(p.left, f.left, sigma) and _match(p.right, f.right, sigma)


@dataclass(frozen=True)
class Premise:
    k: int          # 1-based index into the premise list


@dataclass(frozen=True)
class Axiom:
    name: str
    assignment: Mapping[str, Formula] | None = None


@dataclass(frozen=True)
class MP:
    i: int          # the antecedent line
    j: int          # the implication line


@dataclass(frozen=True)
class RE:
    i: int


@dataclass(frozen=True)
class WN:
    i: int


@dataclass(frozen=True)
class BKRule:
    i: int


Justification = Union[Premise, Axiom, MP, RE, WN, BKRule]

_RULE_OF = {RE: RuleId.RE, WN: RuleId.WN, BKRule: RuleId.BKRULE}


@dataclass(frozen=True)
class Line:
    n: int
    formula: Formula
    by: Justification


@dataclass
class Derivation:
    logic: str
    premises: list = field(default_factory=list)
    lines: list = field(default_factory=list)

    @classmethod
    def from_json(cls, data: Mapping | str) -> "Derivation":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            premises = [parse(p) for p in data.get("premises", [])]
            lines = [Line(int(ln["n"]), parse(ln["f"]), _justification(ln["by"])) for ln in data["lines"]]
            return cls(data["logic"], premises, lines)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed derivation: missing or bad field {exc}") from None

    @classmethod
    def load(cls, path) -> "Derivation":
        with open(path, encoding="utf-8") as fh:
            try:
                return cls.from_json(json.load(fh))
            except json.JSONDecodeError as exc:
                raise ValueError(f"malformed JSON: {exc}") from None

    def to_json(self) -> dict:
        return {
            "logic": self.logic,
            "premises": [render(p) for p in self.premises],
            "lines": [{"n": ln.n, "f": render(ln.formula), "by": _by_json(ln.by)} for ln in self.lines],
        }

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1].formula


def _justification(by: Mapping) -> Justification:
    if "premise" in by:
        return Premise(int(by["premise"]))
    if "axiom" in by:
        assign = by.get("assign")
        if assign is not None:
            assign = {k: parse(v) for k, v in assign.items()}
        return Axiom(by["axiom"], assign)
    if "mp" in by:
        i, j = by["mp"]
        return MP(int(i), int(j))
    if "re" in by:
        return RE(int(by["re"]))
    if "wn" in by:
        return WN(int(by["wn"]))
    if "bkrule" in by:
        return BKRule(int(by["bkrule"]))
    raise ValueError(f"unknown justification {dict(by)!r}")


def _by_json(by: Justification) -> dict:
    if isinstance(by, Premise):
        return {"premise": by.k}
    if isinstance(by, Axiom):
        out = {"axiom": by.name}
        if by.assignment is not None:
            out["assign"] = {k: render(v) for k, v in by.assignment.items()}
        return out
    if isinstance(by, MP):
        return {"mp": [by.i, by.j]}
    return {type(by).__name__.lower(): by.i}


class DerivationError(ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


def check_derivation(d: Derivation) -> None:
    """Raise :class:`DerivationError` at the first unjustified line.

    RE, WN and BKRULE may only cite lines that do not depend on a premise.
    """
    try:
        spec = logic_spec(d.logic)
    except KeyError as exc:
        raise DerivationError(0, str(exc.args[0])) from None
    seen: dict[int, tuple[Formula, bool]] = {}   # n -> (formula, depends on a premise)
    last = 0
    for ln in d.lines:
        if ln.n <= last:
            raise DerivationError(ln.n, "line numbers must increase")
        seen[ln.n] = (ln.formula, _check_line(spec, d, ln, seen))
        last = ln.n
    if not d.lines:
        raise DerivationError(0, "empty derivation")


def _cite(seen: dict, n: int, at: int) -> tuple[Formula, bool]:
    if n not in seen:
        raise DerivationError(at, f"bad index {n}: not an earlier line")
    return seen[n]


def _check_line(spec: LogicSpec, d: Derivation, ln: Line, seen: dict) -> bool:
    by, f = ln.by, ln.formula
    if isinstance(by, Premise):
        if not 1 <= by.k <= len(d.premises):
            raise DerivationError(ln.n, f"bad index {by.k}: no such premise")
        if d.premises[by.k - 1] != f:
            raise DerivationError(ln.n, f"premise {by.k} is {render(d.premises[by.k - 1])}")
        return True
    if isinstance(by, Axiom):
        if by.name not in spec.axiom_names:
            raise DerivationError(ln.n, f"scheme mismatch: logic {spec.id} has no axiom {by.name!r}")
        scheme = spec.axiom(by.name)
        if by.assignment is not None:
            try:
                inst = instantiate(scheme, by.assignment)
            except ValueError as exc:
                raise DerivationError(ln.n, f"scheme mismatch: {exc}") from None
            if inst != f:
                raise DerivationError(ln.n, f"scheme mismatch: {by.name} under the assignment gives {render(inst)}")
        elif match_scheme(f, scheme) is None:
            raise DerivationError(ln.n, f"scheme mismatch: not an instance of {by.name} ({scheme})")
        return False
    if isinstance(by, MP):
        a, dep_a = _cite(seen, by.i, ln.n)
        imp, dep_b = _cite(seen, by.j, ln.n)
        if imp != Imp(a, f):
            raise DerivationError(ln.n, f"MP mismatch: line {by.j} is not line {by.i} -> this line")
        return dep_a or dep_b
    rule = _RULE_OF[type(by)]
    if rule not in spec.rules:
        raise DerivationError(ln.n, f"rule {rule.value} not in logic {spec.id}")
    premise, dep = _cite(seen, by.i, ln.n)
    if dep:
        raise DerivationError(ln.n, "rule applied to premise-dependent line")
    phi_psi = _rule_inputs(rule, premise)
    if phi_psi is None:
        raise DerivationError(ln.n, f"{rule.value} mismatch: line {by.i} has the wrong shape")
    _, concl = rule_instance(rule, *phi_psi, op=spec.re_operator)
    if concl != f:
        raise DerivationError(ln.n, f"{rule.value} mismatch: expected {render(concl)}")
    return False


def _rule_inputs(rule: RuleId, premise: Formula):
    if rule is RuleId.RE:
        if (isinstance(premise, And) and isinstance(premise.left, Imp) and isinstance(premise.right, Imp)
                and premise.left.left == premise.right.right and premise.left.right == premise.right.left):
            return premise.left.left, premise.left.right
        return None
    if isinstance(premise, Imp):
        return premise.left, premise.right
    return None
