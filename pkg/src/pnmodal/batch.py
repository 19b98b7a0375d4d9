"""Vectorized evaluation over many small models at once.

A :class:`ModelBatch` holds ``B`` models with the same number of worlds
``n <= 6``.  World sets are integer masks; a neighborhood family is a bitmap
over the ``2**n`` subsets (bit ``X`` set iff ``X`` is a neighborhood), stored
in the narrowest unsigned type that fits (uint8 up to three worlds).
Frame conditions then reduce to a handful of word operations per world pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .formula import And, Atom, Bottom, Formula, Imp, Meta, ModalOp, Or, subformulas
from .model import Cond, Model, bits

__all__ = ["MAX_BATCH_WORLDS", "ModelBatch", "evaluate", "holds", "close", "upsets_ok"]

MAX_BATCH_WORLDS = 6


def dtype_for(n: int):
    """Narrowest unsigned type holding a family bitmap over ``2**n`` subsets."""
    return (np.uint8, np.uint8, np.uint8, np.uint8, np.uint16, np.uint32, np.uint64)[n]


@lru_cache(maxsize=None)
def _tables(n: int):
    """Per-world bitmaps over subsets: ``IN[i]`` = sets containing world ``i``."""
    nsets = 1 << n
    full_fam = (1 << nsets) - 1
    inn = []
    for i in range(n):
        b = 0
        for x in range(nsets):
            if x >> i & 1:
                b |= 1 << x
        inn.append(b)
    notin = [full_fam ^ b for b in inn]
    t = dtype_for(n)
    return (np.array(inn, dtype=t), np.array(notin, dtype=t), t(full_fam))


@dataclass
class ModelBatch:
    n: int
    up: np.ndarray      # [B, n] up-set of each world
    nbhd: np.ndarray    # [B, n] family bitmaps
    val: dict           # atom -> [B] masks
    poset: tuple | None = None   # shared up-masks when every row has the same order

    def __post_init__(self):
        if not 1 <= self.n <= MAX_BATCH_WORLDS:
            raise ValueError(f"batches support 1..{MAX_BATCH_WORLDS} worlds, got {self.n}")
        t = dtype_for(self.n)
        self.up = np.asarray(self.up, dtype=t)
        self.nbhd = np.asarray(self.nbhd, dtype=t)
        self.val = {a: np.asarray(v, dtype=t) for a, v in self.val.items()}

    @property
    def dtype(self):
        return dtype_for(self.n)

    def __len__(self) -> int:
        return self.up.shape[0]

    @property
    def full(self):
        return self.dtype((1 << self.n) - 1)

    def model(self, k: int, worlds=None) -> Model:
        """Row ``k`` as a scalar :class:`Model` (worlds named ``w0``.. by default)."""
        worlds = tuple(worlds or (f"w{i}" for i in range(self.n)))
        fams = tuple(frozenset(bits(int(self.nbhd[k, i]))) for i in range(self.n))
        return Model(worlds, tuple(int(u) for u in self.up[k]), fams,
                     {a: int(v[k]) for a, v in self.val.items()})

    @classmethod
    def from_models(cls, models, atom_names=None) -> "ModelBatch":
        models = list(models)
        n = models[0].size
        if any(m.size != n for m in models):
            raise ValueError("all models in a batch need the same world count")
        if atom_names is None:
            atom_names = sorted({a for m in models for a in m.valuation})
        t = dtype_for(n)
        up = np.array([m.up for m in models], dtype=t).reshape(len(models), n)
        nb = np.zeros((len(models), n), dtype=t)
        for k, m in enumerate(models):
            for i in range(n):
                f = 0
                for x in m.nbhd[i]:
                    f |= 1 << x
                nb[k, i] = f
        val = {a: np.array([m.valuation.get(a, 0) for m in models], dtype=t) for a in atom_names}
        return cls(n, up, nb, val)

    def take(self, idx) -> "ModelBatch":
        up = self.up if self.poset is not None else self.up[idx]
        nb = self.nbhd[idx]
        if self.poset is not None:
            up = np.broadcast_to(self.up[:1], nb.shape)
        return ModelBatch(self.n, up, nb, {a: v[idx] for a, v in self.val.items()}, self.poset)

    def up_col(self, i: int):
        return self.dtype(self.poset[i]) if self.poset is not None else self.up[:, i]


# ---------------------------------------------------------------------------
# forcing

def _imp(b: ModelBatch, a: np.ndarray, c: np.ndarray) -> np.ndarray:
    t = b.dtype
    bad = a & ~c
    out = np.zeros(len(b), dtype=t)
    for i in range(b.n):
        out |= ((b.up_col(i) & bad) == 0).astype(t) << t(i)
    return out


def _gate(b: ModelBatch, x: np.ndarray, present: bool) -> np.ndarray:
    """Worlds ``i`` with ``x`` in (or, if not ``present``, out of) ``N_i``."""
    t = b.dtype
    one = t(1)
    out = np.zeros(len(b), dtype=t)
    for i in range(b.n):
        bit = (b.nbhd[:, i] >> x) & one
        if not present:
            bit ^= one
        out |= bit << t(i)
    return out


def evaluate(b: ModelBatch, f: Formula, memo: dict | None = None) -> dict:
    """Extension array of every subformula of ``f`` (memo is updated in place)."""
    memo = {} if memo is None else memo
    zero = np.zeros(len(b), dtype=b.dtype)
    for g in subformulas(f):
        if g in memo:
            continue
        if isinstance(g, Bottom):
            r = zero
        elif isinstance(g, Atom):
            v = b.val.get(g.name)
            r = zero if v is None else v & b.full
        elif isinstance(g, Meta):
            raise ValueError(f"cannot evaluate metavariable {g.name}")
        elif isinstance(g, And):
            r = memo[g.left] & memo[g.right]
        elif isinstance(g, Or):
            r = memo[g.left] | memo[g.right]
        elif isinstance(g, Imp):
            r = _imp(b, memo[g.left], memo[g.right])
        else:
            x = memo[g.body]
            op = g.op
            if op is ModalOp.W:
                r = _imp(b, x, zero) & _gate(b, x, True)
            elif op is ModalOp.BOX:
                r = x & _gate(b, x, True)
            elif op is ModalOp.DIA:
                r = x & _gate(b, b.full ^ x, False)
            elif op is ModalOp.BBOX:
                r = x & _gate(b, b.full ^ x, True)
            elif op is ModalOp.BULLET:
                r = x & _gate(b, x, False)
            else:
                r = x & _gate(b, _imp(b, x, zero), True)
        memo[g] = r
    return memo


def upsets_ok(b: ModelBatch, x: np.ndarray) -> np.ndarray:
    """Boolean per model: is ``x`` an up-set?"""
    t = b.dtype
    ok = np.ones(len(b), dtype=bool)
    for i in range(b.n):
        inside = ((x >> t(i)) & t(1)).astype(bool)
        ok &= ~inside | ((b.up_col(i) & ~x) == 0)
    return ok


# ---------------------------------------------------------------------------
# family bitmap transforms

def _zeta(fam: np.ndarray, n: int, skip: int = -1) -> np.ndarray:
    """Superset closure of family bitmaps (optionally never adding world ``skip``)."""
    _, notin, full = _tables(n)
    t = dtype_for(n)
    g = fam.copy()
    for i in range(n):
        if i != skip:
            g |= ((g & notin[i]) << t(1 << i)) & full
    return g


def _project(fam: np.ndarray, n: int, x: int) -> np.ndarray:
    """Bitmap of ``{Y & x : Y in fam}``."""
    inn, notin, _ = _tables(n)
    t = dtype_for(n)
    g = fam.copy()
    for i in range(n):
        if not x >> i & 1:
            g = (g & notin[i]) | ((g & inn[i]) >> t(1 << i))
    return g


def _complement(fam: np.ndarray, n: int) -> np.ndarray:
    """Bitmap of ``{-Y : Y in fam}``."""
    inn, notin, full = _tables(n)
    t = dtype_for(n)
    g = fam.copy()
    for i in range(n):
        s = t(1 << i)
        g = (((g & notin[i]) << s) & full) | ((g & inn[i]) >> s)
    return g


# ---------------------------------------------------------------------------
# frame conditions

def _leq(b: ModelBatch, i: int, j: int):
    if b.poset is not None:
        return bool(b.poset[i] >> j & 1)
    t = b.dtype
    return ((b.up[:, i] >> t(j)) & t(1)).astype(bool)


# For each order-sensitive condition: (source column, target column, table) such
# that the condition says  N[src] & table[j] & ~N[dst] == 0  whenever i <= j,
# with ``i``/``j`` substituted for "lower"/"upper".
_PAIR_RULES = {
    Cond.C1: ("lower", "upper", "notin"),
    Cond.CN: ("lower", "upper", "notin"),
    Cond.CBSQ: ("lower", "upper", "notin"),
    Cond.CBOX: ("lower", "upper", "in"),
    Cond.C2: ("lower", "upper", "all"),
    Cond.CDIA: ("upper", "lower", "notin"),
    Cond.CBLT: ("upper", "lower", "in"),
}


def _table(n, kind, j):
    inn, notin, full = _tables(n)
    return {"in": inn[j], "notin": notin[j], "all": full}[kind]


def _local_ok(fam: np.ndarray, n: int, w: int, cond: Cond) -> np.ndarray:
    """Conditions that only involve one world's family."""
    if cond is Cond.SUP:
        return (_zeta(fam, n) & ~fam) == 0
    if cond is Cond.NEGSUP:
        _, notin, _ = _tables(n)
        return (_zeta(fam & notin[w], n, skip=w) & ~fam) == 0
    if cond is Cond.CONS:
        return (fam & _complement(fam, n)) == 0
    if cond is Cond.CAP:
        ok = np.ones(fam.shape, dtype=bool)
        t = dtype_for(n)
        for x in range(1 << n):
            sel = ((fam >> t(x)) & t(1)).astype(bool)
            ok &= ~sel | ((_project(fam, n, x) & ~fam) == 0)
        return ok
    raise ValueError(cond)


LOCAL_CONDS = frozenset({Cond.SUP, Cond.NEGSUP, Cond.CONS, Cond.CAP})


def holds(b: ModelBatch, cond: Cond) -> np.ndarray:
    """Boolean per model: does ``cond`` hold?"""
    n = b.n
    ok = np.ones(len(b), dtype=bool)
    if cond in LOCAL_CONDS:
        for w in range(n):
            ok &= _local_ok(b.nbhd[:, w], n, w, cond)
        return ok
    src, dst, kind = _PAIR_RULES[cond]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            cols = {"lower": i, "upper": j}
            t = _table(n, kind, j)
            viol = (b.nbhd[:, cols[src]] & t & ~b.nbhd[:, cols[dst]]) != 0
            leq = _leq(b, i, j)
            if leq is False:
                continue
            ok &= ~(viol & leq)
    return ok


def holds_all(b: ModelBatch, fc) -> np.ndarray:
    ok = np.ones(len(b), dtype=bool)
    for c in fc:
        ok &= holds(b, c)
    return ok


def close(b: ModelBatch, fc) -> None:
    """Enlarge families in place to the least ones satisfying the Horn part of ``fc``.

    Every condition except CONS only forces sets *into* families, so the
    least fixpoint exists; CONS has to be filtered afterwards.
    """
    n = b.n
    fc = [c for c in fc if c is not Cond.CONS]
    nb = b.nbhd
    while True:
        before = nb.copy()
        for cond in fc:
            if cond in LOCAL_CONDS:
                for w in range(n):
                    col = nb[:, w]
                    if cond is Cond.SUP:
                        nb[:, w] = _zeta(col, n)
                    elif cond is Cond.NEGSUP:
                        _, notin, _ = _tables(n)
                        nb[:, w] = col | _zeta(col & notin[w], n, skip=w)
                    else:
                        t = dtype_for(n)
                        for x in range(1 << n):
                            col = nb[:, w]
                            sel = ((col >> t(x)) & t(1)).astype(bool)
                            nb[:, w] = np.where(sel, col | _project(col, n, x), col)
                continue
            src, dst, kind = _PAIR_RULES[cond]
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    cols = {"lower": i, "upper": j}
                    t = _table(n, kind, j)
                    add = np.where(_leq(b, i, j), nb[:, cols[src]] & t, b.dtype(0))
                    nb[:, cols[dst]] |= add
        if np.array_equal(before, nb):
            return
