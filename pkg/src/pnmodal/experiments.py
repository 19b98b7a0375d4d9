"""Bounded checks of soundness and persistence, plus the named experiments."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import batch as B
from .formula import (
    Atom, Formula, Modal, ModalOp, And, instantiate, neg, parse, render,
)
from .logics import LogicSpec, RuleId, logic_spec, rule_instance
from .model import Cond, Model, bits, check_conditions, class_names, validate
from .search import SearchConfig, find_countermodel, model_blocks
from .semantics import extensions as scalar_extensions, is_upset

__all__ = [
    "EXPERIMENTS", "instance_pool", "axiom_instances", "SoundnessReport", "soundness_at_bound",
    "persistence_at_bound", "rule_soundness_at_bound", "run_experiment", "MONOTONE_FLAG",
]

# frame condition making each operator's extensions up-sets
MONOTONE_FLAG = {
    ModalOp.W: Cond.C1, ModalOp.BOX: Cond.CBOX, ModalOp.DIA: Cond.CDIA,
    ModalOp.BBOX: Cond.CBSQ, ModalOp.BULLET: Cond.CBLT, ModalOp.N: Cond.CN,
}


def instance_pool(op: ModalOp | None, atom_names: Sequence[str] = ("p", "q")) -> list[Formula]:
    """Small formulas over two atoms used to instantiate schemes."""
    p, q = (Atom(a) for a in atom_names[:2])
    pool = [p, q, neg(p), And(p, q)]
    if op is not None:
        pool += [Modal(op, p), Modal(op, neg(q)), Modal(op, And(p, q))]
    return pool


def axiom_instances(spec: LogicSpec, pool: Sequence[Formula]) -> list[tuple[str, Formula]]:
    out = []
    for name, scheme in spec.axioms:
        metas = scheme.metavariables
        for combo in itertools.product(pool, repeat=len(metas)):
            out.append((name, instantiate(scheme, dict(zip(metas, combo)))))
    return out


@dataclass
class SoundnessReport:
    logic: str
    models_checked: int = 0
    instances: int = 0
    failures: dict = field(default_factory=dict)      # axiom name -> (formula, Model)
    persistence_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and not self.persistence_failures


def _blocks(fc, max_worlds, atom_names, sampled, min_worlds=1):
    if sampled is None:
        cfg = SearchConfig(max_worlds=max_worlds, frame_class=frozenset(fc))
    else:
        cfg = SearchConfig(max_worlds=max_worlds, frame_class=frozenset(fc), sampled=sampled,
                           min_worlds=min_worlds)
    return model_blocks(cfg, tuple(atom_names))


def _first_refuted(blk, ext) -> int | None:
    rows = np.flatnonzero(ext != blk.batch.full)
    return int(rows[0]) if len(rows) else None


def soundness_at_bound(lid: str, max_worlds: int = 2, sampled: tuple[int, int] | None = None,
                       min_worlds: int = 1, pool: Sequence[Formula] | None = None,
                       frame_class=None) -> SoundnessReport:
    """Check every axiom instance of logic ``lid`` on every model of its class.

    Also checks that every subformula extension met along the way is an
    up-set (the class contains the operator's monotonicity condition).
    """
    spec = logic_spec(lid)
    op = spec.re_operator or (next(iter(spec.operators)) if spec.operators else None)
    pool = instance_pool(op) if pool is None else pool
    insts = axiom_instances(spec, pool)
    fc = spec.frame_class if frame_class is None else frozenset(frame_class)
    rep = SoundnessReport(lid, instances=len(insts))
    check_up = all(MONOTONE_FLAG[o] in fc for o in spec.operators)
    for blk in _blocks(fc, max_worlds, ("p", "q"), sampled, min_worlds):
        memo: dict = {}
        for name, f in insts:
            ext = B.evaluate(blk.batch, f, memo)[f]
            if name not in rep.failures:
                k = _first_refuted(blk, ext)
                if k is not None:
                    rep.failures[name] = (f, blk.model(k))
        if check_up and not rep.persistence_failures:
            for g, ext in memo.items():
                bad = np.flatnonzero(~B.upsets_ok(blk.batch, ext))
                if len(bad):
                    rep.persistence_failures.append((g, blk.model(int(bad[0]))))
                    break
        rep.models_checked += len(blk)
    return rep


def persistence_at_bound(formulas: Iterable[Formula], fc, max_worlds: int = 2,
                         sampled=None, min_worlds: int = 1, atom_names=("p", "q")):
    """Return ``(models_checked, first violation or None)``.

    A violation is ``(subformula, Model)`` where the subformula's extension is
    not an up-set.
    """
    formulas = list(formulas)
    checked = 0
    for blk in _blocks(fc, max_worlds, atom_names, sampled, min_worlds):
        memo: dict = {}
        for f in formulas:
            B.evaluate(blk.batch, f, memo)
        for g in sorted(memo, key=render):
            bad = np.flatnonzero(~B.upsets_ok(blk.batch, memo[g]))
            if len(bad):
                return checked + int(bad[0]) + 1, (g, blk.model(int(bad[0])))
        checked += len(blk)
    return checked, None


def rule_soundness_at_bound(rule: RuleId | str, fc, pool: Sequence[Formula], op: ModalOp | None = None,
                            max_worlds: int = 2, sampled=None, min_worlds: int = 1):
    """Check global-truth preservation of ``rule`` for all pairs from ``pool``.

    Returns ``(models_checked, premise_hits, violations)`` where
    ``premise_hits`` counts (model, instance) pairs with globally true premises
    and ``violations`` lists ``(phi, psi, Model)``.
    """
    insts = [(phi, psi, *rule_instance(rule, phi, psi, op=op)) for phi in pool for psi in pool]
    checked = hits = 0
    violations = []
    for blk in _blocks(fc, max_worlds, ("p", "q"), sampled, min_worlds):
        b = blk.batch
        memo: dict = {}
        for phi, psi, prem, concl in insts:
            ok = np.ones(len(b), dtype=bool)
            for pr in prem:
                ok &= B.evaluate(b, pr, memo)[pr] == b.full
            hits += int(ok.sum())
            bad = np.flatnonzero(ok & (B.evaluate(b, concl, memo)[concl] != b.full))
            if len(bad):
                violations.append((phi, psi, blk.model(int(bad[0]))))
        checked += len(b)
    return checked, hits, violations


# ---------------------------------------------------------------------------
# named experiments

def _model_json(m: Model | None):
    return None if m is None else m.to_json()


def _duality(cfg: SearchConfig) -> dict:
    fc = frozenset(cfg.frame_class) or frozenset({Cond.CBLT})
    atom_names = tuple(cfg.atoms or ("p",))
    phis = [Atom(a) for a in atom_names] + [neg(Atom(a)) for a in atom_names]
    checked = 0
    hit = None
    for blk in _blocks(fc, cfg.max_worlds, atom_names, None):
        b = blk.batch
        memo: dict = {}
        for phi in phis:
            circ_ext = B.evaluate(b, neg(Modal(ModalOp.BULLET, phi)), memo)[neg(Modal(ModalOp.BULLET, phi))]
            x = memo[phi]
            clause = (b.full ^ x) | B._gate(b, x, True)
            bad = np.flatnonzero(circ_ext != clause)
            if len(bad):
                k = int(bad[0])
                if hit is None or k < hit[0]:
                    hit = (k, phi)
        if hit is not None:
            k, phi = hit
            m = blk.model(k)
            checked += k + 1
            break
        checked += len(b)
    report = {
        "experiment": "duality",
        "claim": "~bullet A agrees with the clause 'A not forced, or V(A) in N_w'",
        "class": class_names(fc), "bound": cfg.max_worlds, "models_checked": checked,
    }
    if hit is None:
        report.update(verdict="verified at bound", self_check="n/a")
        return report
    # re-derive the disagreement with the reference evaluator
    memo = scalar_extensions(m, neg(Modal(ModalOp.BULLET, phi)))
    x = memo[phi]
    clause = (m.full ^ x) | sum(1 << w for w in range(m.size) if x in m.nbhd[w])
    circ_mask = memo[neg(Modal(ModalOp.BULLET, phi))]
    diff = circ_mask ^ clause
    consistent = bool(diff) and not validate(m) and all(
        v is None for v in check_conditions(m, fc).values())
    w = m.worlds[bits(diff)[0]] if diff else None
    report.update(
        verdict="counterexample", formula=render(phi), model=m.to_json(), world=w,
        circ_forced=bool(circ_mask >> m.index[w] & 1) if w else None,
        clause_holds=bool(clause >> m.index[w] & 1) if w else None,
        self_check="consistent" if consistent else "INCONSISTENT",
    )
    return report


def _classical_w(cfg: SearchConfig) -> dict:
    fc = frozenset(cfg.frame_class) or frozenset({Cond.C1})
    atom_names = tuple(cfg.atoms or ("p",))
    phis = [Atom(a) for a in atom_names]
    checked = 0
    found = None
    for blk in _blocks(fc, cfg.max_worlds, atom_names, None):
        b = blk.batch
        memo: dict = {}
        for phi in phis:
            x = B.evaluate(b, phi, memo)[phi]
            classical = (b.full ^ x) & B._gate(b, x, True)
            bad = np.flatnonzero(~B.upsets_ok(b, classical))
            if len(bad):
                found = (int(bad[0]), phi)
                break
        if found:
            checked += found[0] + 1
            break
        checked += len(b)
    report = {
        "experiment": "classical_w_persistence",
        "claim": "the clause 'A not forced and V(A) in N_w' gives up-set extensions",
        "class": class_names(fc), "bound": cfg.max_worlds, "models_checked": checked,
    }
    if found is None:
        report["verdict"] = "no non-up-set witness at bound"
        return report
    k, phi = found
    m = blk.model(k)
    x = scalar_extensions(m, phi)[phi]
    classical = (m.full ^ x) & sum(1 << w for w in range(m.size) if x in m.nbhd[w])
    pair = next((w, v) for w in bits(classical) for v in bits(m.up[w] & ~classical))
    report.update(
        verdict="non-up-set witness", formula=render(phi), model=m.to_json(),
        witness=[m.worlds[pair[0]], m.worlds[pair[1]]],
        self_check="consistent" if not is_upset(m, classical) else "INCONSISTENT",
    )
    return report


def _validity_experiment(name: str, text: str, base: frozenset, cfg: SearchConfig) -> dict:
    fc = base | frozenset(cfg.frame_class)
    f = parse(text)
    out = find_countermodel(f, SearchConfig(max_worlds=cfg.max_worlds, frame_class=fc))
    report = {"experiment": name, "claim": text, "class": class_names(fc), "bound": cfg.max_worlds,
              "models_checked": out.models_checked}
    if out.valid:
        report["verdict"] = f"{text}: verified at bound"
    else:
        report.update(verdict=f"{text}: countermodel", model=_model_json(out.model), witness=out.witness)
    return report


def _bk(cfg: SearchConfig) -> dict:
    fc = frozenset(cfg.frame_class) or frozenset({Cond.CBLT})
    rep = soundness_at_bound("BK", cfg.max_worlds, frame_class=fc)
    pool = instance_pool(ModalOp.BULLET)
    checked, hits, viol = rule_soundness_at_bound(RuleId.BKRULE, fc, pool, max_worlds=cfg.max_worlds)
    axioms = {}
    for name, _ in logic_spec("BK").axioms:
        if name in rep.failures:
            f, m = rep.failures[name]
            axioms[name] = {"status": "counterexample", "instance": render(f), "model": m.to_json()}
        else:
            axioms[name] = {"status": "valid at bound"}
    rule = {"status": "sound at bound" if not viol else "counterexample",
            "premise_instances_true": hits}
    if viol:
        phi, psi, m = viol[0]
        rule.update(phi=render(phi), psi=render(psi), model=m.to_json(), violations=len(viol))
    failed = [n for n, a in axioms.items() if a["status"] != "valid at bound"]
    return {
        "experiment": "bk_soundness", "class": class_names(fc), "bound": cfg.max_worlds,
        "models_checked": rep.models_checked, "axioms": axioms, "rule": rule,
        "verdict": "sound at bound" if not failed and not viol else
        "not sound at bound: " + ", ".join(failed + (["BKRULE"] if viol else [])),
    }


EXPERIMENTS = {
    "duality": _duality,
    "classical_w_persistence": _classical_w,
    "box_dia_bridge": lambda cfg: _validity_experiment(
        "box_dia_bridge", "box p -> ~dia ~p", frozenset({Cond.CBOX, Cond.CDIA}), cfg),
    "cons_bridge": lambda cfg: _validity_experiment(
        "cons_bridge", "box p -> dia p", frozenset({Cond.CBOX, Cond.CDIA, Cond.CONS}), cfg),
    "bk_soundness": _bk,
}


def run_experiment(name: str, cfg: SearchConfig | None = None) -> dict:
    """Run one named experiment and return its JSON-ready report."""
    try:
        fn = EXPERIMENTS[name]
    except KeyError:
        raise KeyError(f"unknown experiment {name!r}; known: {', '.join(EXPERIMENTS)}") from None
    return fn(cfg or SearchConfig(max_worlds=2))
