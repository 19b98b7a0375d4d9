"""Forcing on a single finite model.

This is the reference evaluator: plain Python integers as world masks, one
model at a time.  :mod:`pnmodal.batch` evaluates many models at once and is
tested against this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .formula import (
    And, Atom, Bottom, Formula, Imp, Meta, Modal, ModalOp, Or, render, subformulas,
)
from .logics import RuleId, rule_instance
from .model import Model, bits

__all__ = [
    "Extension", "extension", "extensions", "forces", "globally_true", "is_upset",
    "PersistenceWitness", "check_persistence", "RuleCheck", "check_rule_soundness",
]


@dataclass(frozen=True)
class Extension:
    formula: Formula
    mask: int
    worlds: tuple[str, ...]


def extensions(m: Model, f: Formula, memo: dict | None = None) -> dict:
    """Extension mask of every subformula of ``f``, keyed by subformula."""
    m.require_valid()
    memo = {} if memo is None else memo
    for g in subformulas(f):
        if g not in memo:
            memo[g] = _step(m, g, memo)
    return memo


def _step(m: Model, g: Formula, memo: dict) -> int:
    if isinstance(g, Bottom):
        return 0
    if isinstance(g, Atom):
        return m.valuation.get(g.name, 0) & m.full
    if isinstance(g, Meta):
        raise ValueError(f"cannot evaluate metavariable {g.name}; instantiate the scheme first")
    if isinstance(g, And):
        return memo[g.left] & memo[g.right]
    if isinstance(g, Or):
        return memo[g.left] | memo[g.right]
    if isinstance(g, Imp):
        a, c = memo[g.left], memo[g.right]
        bad = a & ~c
        return _collect(w for w in range(m.size) if not m.up[w] & bad)
    if isinstance(g, Modal):
        return _modal(m, g.op, memo[g.body])
    raise TypeError(f"not a formula: {g!r}")


def _collect(ws: Iterable[int]) -> int:
    out = 0
    for w in ws:
        out |= 1 << w
    return out


def neg_mask(m: Model, x: int) -> int:
    """Extension of the negation of a formula whose extension is ``x``."""
    return _collect(w for w in range(m.size) if not m.up[w] & x)


def _modal(m: Model, op: ModalOp, x: int) -> int:
    nb = m.nbhd
    rng = range(m.size)
    if op is ModalOp.W:
        return neg_mask(m, x) & _collect(w for w in rng if x in nb[w])
    if op is ModalOp.BOX:
        gate = _collect(w for w in rng if x in nb[w])
    elif op is ModalOp.DIA:
        comp = m.full ^ x
        gate = _collect(w for w in rng if comp not in nb[w])
    elif op is ModalOp.BBOX:
        comp = m.full ^ x
        gate = _collect(w for w in rng if comp in nb[w])
    elif op is ModalOp.BULLET:
        gate = _collect(w for w in rng if x not in nb[w])
    elif op is ModalOp.N:
        nx = neg_mask(m, x)
        gate = _collect(w for w in rng if nx in nb[w])
    else:
        raise ValueError(op)
    return x & gate


def extension(m: Model, f: Formula) -> Extension:
    """The set of worlds forcing ``f``."""
    mask = extensions(m, f)[f]
    return Extension(f, mask, m.names(mask))


def forces(m: Model, w: str, f: Formula) -> bool:
    if w not in m.index:
        raise KeyError(f"unknown world {w!r}")
    return bool(extensions(m, f)[f] >> m.index[w] & 1)


def globally_true(m: Model, f: Formula) -> bool:
    return extensions(m, f)[f] == m.full


def is_upset(m: Model, x: int) -> bool:
    return all(m.up[w] & ~x == 0 for w in bits(x))


@dataclass(frozen=True)
class PersistenceWitness:
    """``lower <= upper``, ``lower`` forces ``formula`` and ``upper`` does not."""

    formula: Formula
    lower: str
    upper: str

    def describe(self) -> str:
        return f"{self.lower} forces {render(self.formula)} but {self.upper} >= {self.lower} does not"


def check_persistence(m: Model, f: Formula) -> PersistenceWitness | None:
    """``None`` if every subformula extension is an up-set, else the least witness.

    Witness pairs are ordered by (lower, upper) world index; ties go to the
    subformula met first in post-order.
    """
    memo = extensions(m, f)
    best = None
    for g in subformulas(f):
        x = memo[g]
        for w in bits(x):
            bad = m.up[w] & ~x
            if bad:
                cand = (w, bits(bad)[0])
                if best is None or cand < best[0]:
                    best = (cand, g)
                break
    if best is None:
        return None
    (w, v), g = best
    return PersistenceWitness(g, m.worlds[w], m.worlds[v])


@dataclass(frozen=True)
class RuleCheck:
    """Outcome of checking one rule instance on one model.

    ``premises_hold`` says whether every premise is globally true; ``witness``
    is a world refuting the conclusion when they are (else ``None``).
    """

    premises_hold: bool
    witness: str | None = None

    @property
    def sound(self) -> bool:
        return self.witness is None


def check_rule_soundness(m: Model, rule: RuleId | str, premises: Sequence[Formula], op: ModalOp | None = None) -> RuleCheck:
    """Does the rule preserve global truth on ``m`` for this instance?

    ``premises`` are the rule's schematic inputs (see
    :func:`pnmodal.logics.rule_instance`), e.g. ``(phi, psi)`` for RE, WN and
    BKRULE.
    """
    prem, concl = rule_instance(rule, *premises, op=op)
    if not all(globally_true(m, p) for p in prem):
        return RuleCheck(False)
    ext = extensions(m, concl)[concl]
    if ext == m.full:
        return RuleCheck(True)
    w = bits(m.full & ~ext)[0]
    return RuleCheck(True, m.worlds[w])
