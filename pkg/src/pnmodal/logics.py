"""Catalog of the axiom systems and their frame classes."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .formula import (
    And, Formula, Imp, Modal, ModalOp, Scheme, circ, iff, neg, parse_scheme,
)
from .model import Cond

__all__ = ["RuleId", "LogicSpec", "IPC_AXIOMS", "LOGIC_IDS", "logic_spec", "rule_instance", "t_axiom"]


class RuleId(enum.Enum):
    MP = "MP"
    RE = "RE"
    WN = "WN"
    BKRULE = "BKRULE"

    def __str__(self) -> str:
        return self.value


IPC_AXIOMS: tuple[tuple[str, Scheme], ...] = tuple(
    (name, parse_scheme(text)) for name, text in [
        ("k", "A -> B -> A"),
        ("s", "(A -> B -> C) -> (A -> B) -> A -> C"),
        ("and_e1", "A & B -> A"),
        ("and_e2", "A & B -> B"),
        ("and_i", "A -> B -> A & B"),
        ("or_i1", "A -> A | B"),
        ("or_i2", "B -> A | B"),
        ("or_e", "(A -> C) -> (B -> C) -> A | B -> C"),
        ("efq", "false -> A"),
    ]
)

_OP_NAMES = {ModalOp.BOX: "box", ModalOp.DIA: "dia", ModalOp.BBOX: "bbox", ModalOp.BULLET: "bullet"}


def t_axiom(op: ModalOp) -> Scheme:
    """The scheme ``x A -> A`` for operator ``x``."""
    return parse_scheme(f"{op.value} A -> A")


@dataclass(frozen=True)
class LogicSpec:
    id: str
    operators: frozenset
    axioms: tuple[tuple[str, Scheme], ...]
    rules: tuple[RuleId, ...]
    frame_class: frozenset
    re_operator: ModalOp | None = None

    def axiom(self, name: str) -> Scheme:
        for n, s in self.axioms:
            if n == name:
                return s
        raise KeyError(f"logic {self.id} has no axiom {name!r}")

    @property
    def axiom_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.axioms)


NTAX = ("ntax", parse_scheme("W A -> ~A"))
WCAX = ("wcax", parse_scheme("(W A & W B) -> W (A & B)"))


def _build_catalog() -> dict:
    W = ModalOp.W
    cat = {
        "W": LogicSpec("W", frozenset({W}), IPC_AXIOMS + (NTAX,), (RuleId.MP, RuleId.RE),
                       frozenset({Cond.C1}), W),
        "WC": LogicSpec("WC", frozenset({W}), IPC_AXIOMS + (NTAX, WCAX), (RuleId.MP, RuleId.RE),
                        frozenset({Cond.C1, Cond.CAP}), W),
        "MW": LogicSpec("MW", frozenset({W}), IPC_AXIOMS + (NTAX,), (RuleId.MP, RuleId.RE, RuleId.WN),
                        frozenset({Cond.C1, Cond.SUP}), W),
        "MWC": LogicSpec("MWC", frozenset({W}), IPC_AXIOMS + (NTAX, WCAX),
                         (RuleId.MP, RuleId.RE, RuleId.WN),
                         frozenset({Cond.C1, Cond.SUP, Cond.CAP}), W),
    }
    for lid, op, cond in [("A", ModalOp.BOX, Cond.CBOX), ("B", ModalOp.DIA, Cond.CDIA),
                          ("C", ModalOp.BBOX, Cond.CBSQ), ("D", ModalOp.BULLET, Cond.CBLT)]:
        cat[lid] = LogicSpec(lid, frozenset({op}), IPC_AXIOMS + ((f"t_{_OP_NAMES[op]}", t_axiom(op)),),
                             (RuleId.MP, RuleId.RE), frozenset({cond}), op)
    cat["BK"] = LogicSpec(
        "BK", frozenset({ModalOp.BULLET}),
        IPC_AXIOMS + (
            ("circ_top", parse_scheme("circ (false -> false)")),
            ("t_bullet", t_axiom(ModalOp.BULLET)),
            ("circ_and", parse_scheme("(circ A & circ B) -> circ (A & B)")),
        ),
        (RuleId.MP, RuleId.BKRULE), frozenset(), None,
    )
    return cat


_CATALOG = _build_catalog()
LOGIC_IDS = tuple(_CATALOG)


def logic_spec(lid: str) -> LogicSpec:
    try:
        return _CATALOG[lid]
    except KeyError:
        raise KeyError(f"unknown logic {lid!r}; known: {', '.join(LOGIC_IDS)}") from None


def rule_instance(rule: RuleId | str, phi: Formula, psi: Formula, op: ModalOp | None = None):
    """``(premises, conclusion)`` of ``rule`` at ``phi``, ``psi``.

    MP: phi, phi -> psi / psi.  RE: phi <-> psi / x phi <-> x psi (x = ``op``,
    default W).  WN: phi -> psi / (W phi & ~psi) -> W psi.  BKRULE:
    phi -> psi / (circ phi & phi) -> (circ psi & psi).
    """
    rule = RuleId(str(rule).upper())
    if rule is RuleId.MP:
        return (phi, Imp(phi, psi)), psi
    if rule is RuleId.RE:
        x = op or ModalOp.W
        return (iff(phi, psi),), iff(Modal(x, phi), Modal(x, psi))
    if rule is RuleId.WN:
        W = ModalOp.W
        return (Imp(phi, psi),), Imp(And(Modal(W, phi), neg(psi)), Modal(W, psi))
    return (Imp(phi, psi),), Imp(And(circ(phi), phi), And(circ(psi), psi))
