"""Independent reference implementations used as test oracles.

Everything here works on plain Python sets of world names and re-reads the
forcing clauses directly, so it shares no code with the bitmask engine.
"""

from __future__ import annotations

import itertools

from pnmodal.formula import And, Atom, Bottom, Imp, Modal, ModalOp, Or
from pnmodal.model import Model


class SetModel:
    def __init__(self, m: Model):
        data = m.to_json()
        self.worlds = list(data["worlds"])
        leq = {(w, w) for w in self.worlds} | {tuple(p) for p in data["order"]}
        # close transitively, in case a caller hands in generator pairs
        changed = True
        while changed:
            extra = {(a, d) for (a, b) in leq for (c, d) in leq if b == c} - leq
            leq |= extra
            changed = bool(extra)
        self.leq = leq
        self.nbhd = {w: {frozenset(x) for x in fam} for w, fam in data["nbhd"].items()}
        self.val = {a: frozenset(v) for a, v in data["valuation"].items()}

    def above(self, w):
        return [v for v in self.worlds if (w, v) in self.leq]


def ext(sm: SetModel, f) -> frozenset:
    W = frozenset(sm.worlds)
    if isinstance(f, Bottom):
        return frozenset()
    if isinstance(f, Atom):
        return sm.val.get(f.name, frozenset())
    if isinstance(f, And):
        return ext(sm, f.left) & ext(sm, f.right)
    if isinstance(f, Or):
        return ext(sm, f.left) | ext(sm, f.right)
    if isinstance(f, Imp):
        a, c = ext(sm, f.left), ext(sm, f.right)
        return frozenset(w for w in sm.worlds if all(v not in a or v in c for v in sm.above(w)))
    assert isinstance(f, Modal)
    x = ext(sm, f.body)
    notx = frozenset(w for w in sm.worlds if all(v not in x for v in sm.above(w)))
    out = set()
    for w in sm.worlds:
        fam = sm.nbhd[w]
        if f.op is ModalOp.W:
            ok = w in notx and x in fam
        elif f.op is ModalOp.BOX:
            ok = w in x and x in fam
        elif f.op is ModalOp.DIA:
            ok = w in x and (W - x) not in fam
        elif f.op is ModalOp.BBOX:
            ok = w in x and (W - x) in fam
        elif f.op is ModalOp.BULLET:
            ok = w in x and x not in fam
        else:
            ok = w in x and notx in fam
        if ok:
            out.add(w)
    return frozenset(out)


def powerset(items):
    items = list(items)
    return [frozenset(c) for r in range(len(items) + 1) for c in itertools.combinations(items, r)]


def naive_models(n: int, atom_names=("p",)):
    """Every valid model on worlds w0..w{n-1}, by generate and filter."""
    worlds = [f"w{i}" for i in range(n)]
    strict = [(a, b) for a in worlds for b in worlds if a != b]
    sets = powerset(worlds)
    families = powerset(sets)
    for rel in powerset(strict):
        leq = set(rel) | {(w, w) for w in worlds}
        if any((a, d) not in leq for (a, b) in leq for (c, d) in leq if b == c):
            continue
        if any((b, a) in leq for (a, b) in rel):
            continue
        ups = [s for s in sets if all(v in s for (u, v) in leq if u in s)]
        for fams in itertools.product(families, repeat=n):
            for vals in itertools.product(ups, repeat=len(atom_names)):
                yield Model.build(
                    worlds, sorted(rel),
                    {w: [sorted(x) for x in fam] for w, fam in zip(worlds, fams)},
                    {a: sorted(v) for a, v in zip(atom_names, vals)},
                )
