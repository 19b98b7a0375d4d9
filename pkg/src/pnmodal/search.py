"""Bounded model enumeration, sampling and countermodel search.

Canonical order of models: fewer worlds first, then poset id (the index of
the order relation among all labelled partial orders on ``n`` worlds), then
the neighborhood family bitmaps world by world, then the valuation masks
atom by atom.  Enumerated worlds are named ``w0, w1, ...``.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from . import batch as B
from .formula import Formula, atoms as formula_atoms, render, subformulas
from .model import Cond, Model, bits, check_conditions, class_names, validate
from .semantics import extensions as scalar_extensions, globally_true

__all__ = [
    "SearchConfig", "SearchOutcome", "SearchError", "posets", "upsets", "enumerate_models",
    "model_blocks", "find_countermodel", "valid", "close_model", "EXHAUSTIVE_MAX", "SAMPLED_MAX",
]

EXHAUSTIVE_MAX = 3
SAMPLED_MAX = 16
CHUNK = 256             # samples per seeded chunk
MAX_BLOCK_ROWS = 1 << 17


class SearchError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    """What to search.

    ``sampled`` is ``None`` for exhaustive enumeration, else ``(seed, count)``.
    Sampled models have between ``min_worlds`` and ``max_worlds`` worlds.
    """

    max_worlds: int = 2
    frame_class: frozenset = frozenset()
    atoms: tuple[str, ...] | None = None
    sampled: tuple[int, int] | None = None
    min_worlds: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.max_worlds < 1 or self.min_worlds < 1 or self.min_worlds > self.max_worlds:
            raise SearchError("need 1 <= min_worlds <= max_worlds")
        if self.sampled is None and self.max_worlds > EXHAUSTIVE_MAX:
            raise SearchError(f"exhaustive search is limited to {EXHAUSTIVE_MAX} worlds")
        if self.sampled is not None:
            if self.max_worlds > SAMPLED_MAX:
                raise SearchError(f"sampled search is limited to {SAMPLED_MAX} worlds")
            if self.sampled[1] < 0:
                raise SearchError("sample count must be non-negative")

    @property
    def mode(self) -> str:
        return "exhaustive" if self.sampled is None else "sampled"


# ---------------------------------------------------------------------------
# order structures

@lru_cache(maxsize=None)
def posets(n: int) -> tuple[tuple[int, ...], ...]:
    """All partial orders on ``n`` labelled worlds as up-mask tuples, in id order."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for r in range(1 << len(pairs)):
        up = [1 << i for i in range(n)]
        for k, (i, j) in enumerate(pairs):
            if r >> k & 1:
                up[i] |= 1 << j
        if _is_partial_order(up):
            out.append(tuple(up))
    return tuple(out)


def _is_partial_order(up) -> bool:
    n = len(up)
    for i in range(n):
        for j in bits(up[i]):
            if up[j] & ~up[i]:
                return False
            if j != i and up[j] >> i & 1:
                return False
    return True


@lru_cache(maxsize=None)
def upsets(up: tuple[int, ...]) -> tuple[int, ...]:
    n = len(up)
    return tuple(x for x in range(1 << n) if all(up[i] & ~x == 0 for i in bits(x)))


# ---------------------------------------------------------------------------
# exhaustive enumeration

@dataclass
class Block:
    """A run of consecutive models in canonical (or sample) order."""

    batch: B.ModelBatch | None
    models: list | None = None   # scalar fallback when n > MAX_BATCH_WORLDS
    index: np.ndarray | None = None   # sample index of each row (sampled mode)

    def __len__(self):
        return len(self.batch) if self.batch is not None else len(self.models)

    def model(self, k: int) -> Model:
        return self.batch.model(k) if self.batch is not None else self.models[k]


@lru_cache(maxsize=None)
def _local_families(n: int, w: int, local: frozenset) -> np.ndarray:
    fams = np.arange(1 << (1 << n), dtype=B.dtype_for(n))
    ok = np.ones(fams.shape, dtype=bool)
    for c in local:
        ok &= B._local_ok(fams, n, w, c)
    return fams[ok]


def _nbhd_rows(n: int, up: tuple[int, ...], fc: frozenset) -> Iterator[np.ndarray]:
    """Neighborhood assignments for one poset, lexicographic, satisfying ``fc``.

    Single-world conditions prune each world's candidates first; the rest are
    checked on each chunk of combinations.
    """
    local = frozenset(fc & B.LOCAL_CONDS)
    cross = [c for c in fc if c not in B.LOCAL_CONDS]
    cands = [_local_families(n, w, local) for w in range(n)]
    up_arr = np.array(up, dtype=B.dtype_for(n))

    def filt(rows):
        if not cross or len(rows) == 0:
            return rows
        b = B.ModelBatch(n, np.broadcast_to(up_arr, rows.shape), rows, {}, up)
        return rows[B.holds_all(b, cross)]

    if n <= 2:
        grid = np.stack(np.meshgrid(*cands, indexing="ij"), axis=-1).reshape(-1, n)
        yield filt(grid)
        return
    tail = np.stack(np.meshgrid(*cands[1:], indexing="ij"), axis=-1).reshape(-1, n - 1)
    for f0 in cands[0]:
        rows = np.empty((len(tail), n), dtype=tail.dtype)
        rows[:, 0] = f0
        rows[:, 1:] = tail
        rows = filt(rows)
        if len(rows):
            yield rows


def _exhaustive_blocks(n: int, fc: frozenset, atom_names: Sequence[str]) -> Iterator[Block]:
    for up in posets(n):
        us = upsets(up)
        t = B.dtype_for(n)
        combos = list(itertools.product(us, repeat=len(atom_names)))
        vals = np.array(combos, dtype=t).reshape(len(combos), len(atom_names))
        nv = len(vals)
        up_arr = np.array(up, dtype=t)
        step = max(1, MAX_BLOCK_ROWS // nv)
        for rows in _nbhd_rows(n, up, fc):
            for s in range(0, len(rows), step):
                part = rows[s:s + step]
                nb = np.repeat(part, nv, axis=0)
                val = {a: np.tile(vals[:, k], len(part)) for k, a in enumerate(atom_names)}
                ups = np.broadcast_to(up_arr, nb.shape)
                yield Block(B.ModelBatch(n, ups, nb, val, up))


# ---------------------------------------------------------------------------
# sampling

def _sample_chunk(cfg: SearchConfig, atom_names: Sequence[str], k: int, size: int) -> list[Block]:
    seed, _ = cfg.sampled
    rng = np.random.default_rng([seed, k])
    sizes = rng.integers(cfg.min_worlds, cfg.max_worlds + 1, size=size)
    blocks = []
    for n in range(cfg.min_worlds, cfg.max_worlds + 1):
        need = int((sizes == n).sum())
        if not need:
            continue
        if n <= B.MAX_BATCH_WORLDS:
            blocks.append(Block(_sample_batch(rng, n, need, cfg.frame_class, atom_names)))
        else:
            models = [_sample_scalar(rng, n, cfg.frame_class, atom_names) for _ in range(need)]
            blocks.append(Block(None, models))
    return blocks


def _random_orders(rng, n: int, s: int) -> np.ndarray:
    rank = np.argsort(rng.random((s, n)), axis=1)
    density = rng.uniform(0.0, 0.7, size=(s, 1, 1))
    edges = (rng.random((s, n, n)) < density) & (rank[:, :, None] < rank[:, None, :])
    up = np.zeros((s, n), dtype=np.uint64)
    weights = (np.uint64(1) << np.arange(n, dtype=np.uint64))
    up[:] = (edges.astype(np.uint64) * weights).sum(axis=2, dtype=np.uint64)
    up |= weights
    for m in range(n):
        for i in range(n):
            has = ((up[:, i] >> np.uint64(m)) & np.uint64(1)).astype(bool)
            up[:, i] = np.where(has, up[:, i] | up[:, m], up[:, i])
    return up


def _upclose(up: np.ndarray, x: np.ndarray, n: int) -> np.ndarray:
    out = x.copy()
    for i in range(n):
        has = ((x >> np.uint64(i)) & np.uint64(1)).astype(bool)
        out = np.where(has, out | up[:, i], out)
    return out


def _sample_batch(rng, n: int, need: int, fc: frozenset, atom_names) -> B.ModelBatch:
    nsets = 1 << n
    got = []
    total = 0
    for _ in range(10_000):
        s = need - total
        up = _random_orders(rng, n, s)
        q = rng.uniform(0.0, 0.4, size=(s, 1, 1))
        member = rng.random((s, n, nsets)) < q
        weights = np.uint64(1) << np.arange(nsets, dtype=np.uint64)
        nb = (member.astype(np.uint64) * weights).sum(axis=2, dtype=np.uint64)
        full = (1 << n) - 1
        val = {a: _upclose(up, rng.integers(0, full + 1, size=s).astype(np.uint64), n) for a in atom_names}
        b = B.ModelBatch(n, up, nb, val)
        B.close(b, fc)
        ok = B.holds_all(b, fc)
        if ok.any():
            got.append(b.take(np.flatnonzero(ok)))
            total += int(ok.sum())
        if total >= need:
            break
    else:
        raise SearchError(f"could not sample {need} models of class {class_names(fc)} with {n} worlds")
    return B.ModelBatch(
        n, np.concatenate([g.up for g in got]), np.concatenate([g.nbhd for g in got]),
        {a: np.concatenate([g.val[a] for g in got]) for a in atom_names},
    )


def _sample_scalar(rng, n: int, fc: frozenset, atom_names) -> Model:
    for _ in range(10_000):
        up = [int(u) for u in _random_orders(rng, n, 1)[0]]
        fams = []
        for _w in range(n):
            k = int(rng.integers(0, 4))
            fams.append(frozenset(int(x) for x in rng.integers(0, 1 << n, size=k)))
        val = {}
        for a in atom_names:
            x = int(rng.integers(0, 1 << n))
            for i in bits(x):
                x |= up[i]
            val[a] = x
        m = close_model(Model(tuple(f"w{i}" for i in range(n)), tuple(up), tuple(fams), val), fc)
        if all(v is None for v in check_conditions(m, fc).values()):
            return m
    raise SearchError(f"could not sample a model of class {class_names(fc)} with {n} worlds")


def _supersets(x: int, full: int, avoid: int = 0) -> Iterator[int]:
    free = full & ~x & ~avoid
    sub = free
    while True:
        yield x | sub
        if sub == 0:
            return
        sub = (sub - 1) & free


def close_model(m: Model, fc) -> Model:
    """Least enlargement of ``m``'s families satisfying every condition of ``fc`` but CONS."""
    n, full = m.size, m.full
    fams = [set(f) for f in m.nbhd]
    fc = [c for c in fc if c is not Cond.CONS]
    pair_rules = B._PAIR_RULES
    changed = True
    while changed:
        changed = False

        def add(w, xs):
            nonlocal changed
            new = set(xs) - fams[w]
            if new:
                fams[w] |= new
                changed = True

        for cond in fc:
            if cond in pair_rules:
                src, dst, kind = pair_rules[cond]
                for i in range(n):
                    for j in bits(m.up[i]):
                        if i == j:
                            continue
                        cols = {"lower": i, "upper": j}
                        keep = {"in": lambda x: x >> j & 1, "notin": lambda x: not x >> j & 1,
                                "all": lambda x: True}[kind]
                        add(cols[dst], [x for x in fams[cols[src]] if keep(x)])
            elif cond is Cond.SUP:
                for w in range(n):
                    add(w, [y for x in list(fams[w]) for y in _supersets(x, full)])
            elif cond is Cond.NEGSUP:
                for w in range(n):
                    add(w, [y for x in list(fams[w]) if not x >> w & 1
                            for y in _supersets(x, full, avoid=1 << w)])
            elif cond is Cond.CAP:
                for w in range(n):
                    fam = fams[w]
                    if Cond.SUP in fc:
                        # intersections of minimal members suffice for an up-closed family
                        fam = {x for x in fam if not any(y != x and y & ~x == 0 for y in fam)}
                    add(w, [x & y for x in fam for y in fam])
    return Model(m.worlds, m.up, tuple(frozenset(f) for f in fams), dict(m.valuation))


def _sample_blocks(cfg: SearchConfig, atom_names, chunks: range, group: int = 64) -> Iterator[Block]:
    """Sampled models, ``group`` chunks at a time merged into one block per world count.

    Each block carries the global sample index of every row.
    """
    _, count = cfg.sampled
    for g0 in range(chunks.start, chunks.stop, group):
        per_n: dict = {}
        for k in range(g0, min(g0 + group, chunks.stop)):
            start = k * CHUNK
            offset = start
            for blk in _sample_chunk(cfg, atom_names, k, min(CHUNK, count - start)):
                idx = np.arange(offset, offset + len(blk))
                offset += len(blk)
                n = blk.batch.n if blk.batch is not None else blk.models[0].size
                per_n.setdefault(n, []).append((blk, idx))
        for n in sorted(per_n):
            parts = per_n[n]
            idx = np.concatenate([i for _, i in parts])
            if parts[0][0].batch is None:
                yield Block(None, [m for b, _ in parts for m in b.models], idx)
                continue
            bs = [b.batch for b, _ in parts]
            merged = B.ModelBatch(n, np.concatenate([b.up for b in bs]), np.concatenate([b.nbhd for b in bs]),
                                  {a: np.concatenate([b.val[a] for b in bs]) for a in atom_names})
            yield Block(merged, None, idx)


def _n_chunks(cfg: SearchConfig) -> int:
    return -(-cfg.sampled[1] // CHUNK)


# ---------------------------------------------------------------------------
# public enumeration API

def model_blocks(cfg: SearchConfig, atom_names: Sequence[str]) -> Iterator[Block]:
    """Blocks of models in canonical (exhaustive) or sample order."""
    fc = frozenset(cfg.frame_class)
    if cfg.sampled is None:
        for n in range(cfg.min_worlds, cfg.max_worlds + 1):
            yield from _exhaustive_blocks(n, fc, atom_names)
    else:
        yield from _sample_blocks(cfg, atom_names, range(_n_chunks(cfg)))


def enumerate_models(cfg: SearchConfig, atom_names: Sequence[str] | None = None) -> Iterator[Model]:
    """Every model of ``cfg`` (valuations over ``atom_names``), one at a time."""
    names = tuple(atom_names if atom_names is not None else (cfg.atoms or ()))
    for blk in model_blocks(cfg, names):
        for k in range(len(blk)):
            yield blk.model(k)


# ---------------------------------------------------------------------------
# countermodels

@dataclass
class SearchOutcome:
    valid: bool
    models_checked: int
    model: Model | None = None
    witness: str | None = None
    extensions: dict = field(default_factory=dict)   # rendered subformula -> world names
    elapsed_ms: float = 0.0

    @property
    def outcome(self) -> str:
        return "valid_at_bound" if self.valid else "countermodel"


def _refuted_rows(blk: Block, f: Formula) -> np.ndarray:
    if blk.batch is not None:
        ext = B.evaluate(blk.batch, f)[f]
        return np.flatnonzero(ext != blk.batch.full)
    return np.array([k for k, m in enumerate(blk.models) if not globally_true(m, f)], dtype=np.int64)


def _outcome_for(m: Model, f: Formula, fc, checked: int) -> SearchOutcome:
    memo = scalar_extensions(m, f)
    refuting = m.full & ~memo[f]
    # self-check through the reference evaluator before reporting
    if validate(m) or any(v is not None for v in check_conditions(m, fc).values()) or not refuting:
        raise AssertionError(f"countermodel failed re-validation: {m!r}")
    w = m.worlds[bits(refuting)[0]]
    exts = {render(g): list(m.names(memo[g])) for g in subformulas(f)}
    return SearchOutcome(False, checked, m, w, exts)


def find_countermodel(f: Formula, cfg: SearchConfig) -> SearchOutcome:
    """First model (canonical or sample order) where some world refutes ``f``.

    ``models_checked`` counts models up to and including the countermodel,
    so it does not depend on how the work was split.
    """
    t0 = time.perf_counter()
    atom_names = tuple(cfg.atoms) if cfg.atoms is not None else formula_atoms(f)
    fc = frozenset(cfg.frame_class)
    if cfg.sampled is None:
        checked = 0
        for blk in model_blocks(cfg, atom_names):
            rows = _refuted_rows(blk, f)
            if len(rows):
                out = _outcome_for(blk.model(int(rows[0])), f, fc, checked + int(rows[0]) + 1)
                out.elapsed_ms = (time.perf_counter() - t0) * 1e3
                return out
            checked += len(blk)
        return SearchOutcome(True, checked, elapsed_ms=(time.perf_counter() - t0) * 1e3)

    nchunks = _n_chunks(cfg)
    workers = max(1, min(cfg.workers, nchunks or 1))
    bounds = np.linspace(0, nchunks, workers + 1).astype(int)

    def run(part: range):
        best = None
        for blk in _sample_blocks(cfg, atom_names, part):
            if best is not None and blk.index.min() > best[0]:
                break
            rows = _refuted_rows(blk, f)
            if len(rows):
                k = int(rows[np.argmin(blk.index[rows])])
                cand = (int(blk.index[k]), blk.model(k))
                if best is None or cand[0] < best[0]:
                    best = cand
        return best

    parts = [range(bounds[i], bounds[i + 1]) for i in range(workers)]
    if workers == 1:
        hits = [run(parts[0])]
    else:
        with ThreadPoolExecutor(workers) as pool:
            hits = list(pool.map(run, parts))
    hits = [h for h in hits if h is not None]
    if hits:
        index, m = min(hits, key=lambda h: h[0])
        out = _outcome_for(m, f, fc, index + 1)
    else:
        out = SearchOutcome(True, cfg.sampled[1])
    out.elapsed_ms = (time.perf_counter() - t0) * 1e3
    return out


def valid(f: Formula, cfg: SearchConfig) -> SearchOutcome:
    return find_countermodel(f, cfg)
