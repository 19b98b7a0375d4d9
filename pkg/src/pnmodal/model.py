"""Finite partially ordered neighborhood models and frame conditions.

World sets are bit masks over world indices (bit ``i`` is world ``i``).
A neighborhood family is a frozenset of such masks.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Cond", "FrameClass", "parse_class", "ModelError", "OrderError", "Violation",
    "ConditionWitness", "Model", "saturate_order", "validate", "check_conditions",
    "bits", "mask_of",
]


class Cond(enum.Enum):
    """Frame conditions relating the order and the neighborhood function."""

    C1 = "C1"          # w<=v, X in N_w, v not in X  =>  X in N_v
    C2 = "C2"          # w<=v, X in N_w  =>  X in N_v
    CAP = "CAP"        # X, Y in N_w  =>  X & Y in N_w
    SUP = "SUP"        # X in N_w, X <= Y  =>  Y in N_w
    NEGSUP = "NEGSUP"  # Y in N_w, Y <= X, w not in X  =>  X in N_w
    CBOX = "CBOX"      # w<=v, v in X, X in N_w  =>  X in N_v
    CDIA = "CDIA"      # w<=v, v in X, -X not in N_w  =>  -X not in N_v
    CBSQ = "CBSQ"      # w<=v, v in X, -X in N_w  =>  -X in N_v
    CBLT = "CBLT"      # w<=v, v in X, X not in N_w  =>  X not in N_v
    CN = "CN"          # w<=v, v in X, Y in N_w, Y <= -X  =>  Y in N_v
    CONS = "CONS"      # X in N_w  =>  -X not in N_w

    def __str__(self) -> str:
        return self.value


FrameClass = frozenset  # frozenset[Cond]


def parse_class(text: str | Iterable[str]) -> frozenset:
    """``"C1,CAP"`` -> ``frozenset({Cond.C1, Cond.CAP})``."""
    if isinstance(text, str):
        text = [t for t in (s.strip() for s in text.split(",")) if t]
    out = set()
    for name in text:
        try:
            out.add(Cond(name.upper()))
        except ValueError:
            raise ValueError(f"unknown frame condition {name!r}") from None
    return frozenset(out)


def class_names(fc: Iterable[Cond]) -> list[str]:
    order = list(Cond)
    return [c.value for c in sorted(fc, key=order.index)]


class ModelError(ValueError):
    pass


class OrderError(ModelError):
    def __init__(self, cycle: Sequence[str]):
        self.cycle = tuple(cycle)
        super().__init__("order is not antisymmetric: cycle " + " <-> ".join(self.cycle))


def bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def saturate_order(pairs: Iterable[tuple[str, str]], worlds: Sequence[str]) -> frozenset:
    """Reflexive-transitive closure of ``pairs``; raises :class:`OrderError` on a cycle."""
    index = {w: i for i, w in enumerate(worlds)}
    n = len(worlds)
    up = [1 << i for i in range(n)]
    for a, b in pairs:
        if a not in index or b not in index:
            raise ModelError(f"unknown world in order pair ({a}, {b})")
        up[index[a]] |= 1 << index[b]
    up = _transitive(up)
    for i in range(n):
        for j in range(i + 1, n):
            if up[i] >> j & 1 and up[j] >> i & 1:
                raise OrderError((worlds[i], worlds[j]))
    return frozenset((worlds[i], worlds[j]) for i in range(n) for j in bits(up[i]))


def _transitive(up: list[int]) -> list[int]:
    up = list(up)
    n = len(up)
    for k in range(n):
        for i in range(n):
            if up[i] >> k & 1:
                up[i] |= up[k]
    return up


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    witness: tuple = ()

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True)
class ConditionWitness:
    """A concrete instance refuting a frame condition.

    ``worlds`` are world names, ``sets`` are sorted lists of world names, in
    the order the condition mentions them.
    """

    cond: Cond
    worlds: tuple[str, ...]
    sets: tuple[tuple[str, ...], ...]

    def describe(self) -> str:
        ws = ", ".join(self.worlds)
        ss = ", ".join("{" + ",".join(s) + "}" for s in self.sets)
        return f"{self.cond.value} fails: worlds ({ws}), sets [{ss}]"

    def to_json(self) -> dict:
        return {"condition": self.cond.value, "worlds": list(self.worlds), "sets": [list(s) for s in self.sets]}


@dataclass(frozen=True, eq=False)
class Model:
    """A finite model.

    ``up[i]`` is the mask of worlds ``j`` with ``i <= j``.  Nothing is checked
    on construction; call :func:`validate` (or build via :meth:`build` /
    :meth:`from_json`, which saturate the order).
    """

    worlds: tuple[str, ...]
    up: tuple[int, ...]
    nbhd: tuple[frozenset, ...]
    valuation: Mapping[str, int] = field(default_factory=dict)

    @classmethod
    def build(cls, worlds: Sequence[str], order: Iterable[tuple[str, str]] = (),
              nbhd: Mapping[str, Iterable[Iterable[str]]] | None = None,
              valuation: Mapping[str, Iterable[str]] | None = None) -> "Model":
        worlds = tuple(worlds)
        if not worlds:
            raise ModelError("a model needs at least one world")
        if len(set(worlds)) != len(worlds):
            raise ModelError("duplicate world names")
        index = {w: i for i, w in enumerate(worlds)}
        closure = saturate_order(order, worlds)
        up = [0] * len(worlds)
        for a, b in closure:
            up[index[a]] |= 1 << index[b]

        def to_mask(names: Iterable[str], where: str) -> int:
            m = 0
            for name in names:
                if name not in index:
                    raise ModelError(f"unknown world {name!r} in {where}")
                m |= 1 << index[name]
            return m

        nbhd = nbhd or {}
        for w in nbhd:
            if w not in index:
                raise ModelError(f"unknown world {w!r} in nbhd")
        fams = tuple(
            frozenset(to_mask(s, f"nbhd of {w}") for s in nbhd.get(w, ()))
            for w in worlds
        )
        val = {atom: to_mask(ws, f"valuation of {atom}") for atom, ws in (valuation or {}).items()}
        return cls(worlds, tuple(up), fams, val)

    @classmethod
    def from_json(cls, data: Mapping | str) -> "Model":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            worlds = data["worlds"]
        except (KeyError, TypeError):
            raise ModelError("model JSON needs a 'worlds' list") from None
        order = [tuple(p) for p in data.get("order", [])]
        if any(len(p) != 2 for p in order):
            raise ModelError("order entries must be pairs")
        return cls.build(worlds, order, data.get("nbhd", {}), data.get("valuation", {}))

    @classmethod
    def load(cls, path) -> "Model":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ModelError(f"malformed JSON: {exc}") from None
        return cls.from_json(data)

    @property
    def size(self) -> int:
        return len(self.worlds)

    @cached_property
    def full(self) -> int:
        return (1 << len(self.worlds)) - 1

    @cached_property
    def index(self) -> dict:
        return {w: i for i, w in enumerate(self.worlds)}

    def names(self, mask: int) -> tuple[str, ...]:
        return tuple(self.worlds[i] for i in bits(mask))

    def leq(self, i: int, j: int) -> bool:
        return bool(self.up[i] >> j & 1)

    def family(self, w: int) -> tuple[int, ...]:
        """Sorted neighborhood masks of world index ``w``."""
        return tuple(sorted(self.nbhd[w]))

    def order_pairs(self) -> list[tuple[str, str]]:
        """Strict order pairs (reflexive pairs omitted)."""
        return [(self.worlds[i], self.worlds[j])
                for i in range(self.size) for j in bits(self.up[i]) if i != j]

    def to_json(self) -> dict:
        return {
            "worlds": list(self.worlds),
            "order": [list(p) for p in self.order_pairs()],
            "nbhd": {self.worlds[i]: [list(self.names(x)) for x in self.family(i)]
                     for i in range(self.size)},
            "valuation": {a: list(self.names(m)) for a, m in sorted(self.valuation.items())},
        }

    def key(self) -> tuple:
        return (self.worlds, self.up, tuple(self.family(i) for i in range(self.size)),
                tuple(sorted(self.valuation.items())))

    def __eq__(self, other):
        return isinstance(other, Model) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Model({json.dumps(self.to_json())})"

    @cached_property
    def _valid(self) -> bool:
        return not validate(self)

    def require_valid(self) -> None:
        if not self._valid:
            raise ModelError("invalid model: " + "; ".join(map(str, validate(self))))


def validate(m: Model) -> list[Violation]:
    """Structural problems of ``m``: order axioms, set ranges, persistence of V."""
    out: list[Violation] = []
    n = m.size
    W = m.worlds
    full = (1 << n) - 1
    if len(m.up) != n or len(m.nbhd) != n:
        return [Violation("shape", "order/nbhd length does not match the world count")]
    for i in range(n):
        if not m.up[i] >> i & 1:
            out.append(Violation("reflexivity", f"order not reflexive at {W[i]}", (W[i],)))
    for i in range(n):
        for j in bits(m.up[i]):
            if j >= n:
                out.append(Violation("range", f"order mentions unknown world index {j}", (W[i],)))
                continue
            missing = m.up[j] & ~m.up[i] & full
            if missing:
                k = bits(missing)[0]
                out.append(Violation("transitivity", f"order not transitive: {W[i]}<={W[j]}<={W[k]}",
                                     (W[i], W[j], W[k])))
    for i in range(n):
        for j in range(i + 1, n):
            if m.leq(i, j) and m.leq(j, i):
                out.append(Violation("antisymmetry", f"order not antisymmetric: {W[i]}<->{W[j]}", (W[i], W[j])))
    for i in range(n):
        for x in m.family(i):
            if x & ~full or x < 0:
                out.append(Violation("range", f"neighborhood of {W[i]} mentions unknown worlds", (W[i],)))
    for atom, mask in sorted(m.valuation.items()):
        if mask & ~full:
            out.append(Violation("range", f"valuation of {atom} mentions unknown worlds", (atom,)))
            continue
        for i in bits(mask):
            outside = m.up[i] & full & ~mask
            if outside:
                j = bits(outside)[0]
                out.append(Violation("persistence",
                                     f"valuation not an up-set, atom {atom}, witness ({W[i]},{W[j]})",
                                     (atom, W[i], W[j])))
                break
    return out


# ---------------------------------------------------------------------------
# frame conditions

def check_conditions(m: Model, fc: Iterable[Cond]) -> dict:
    """Map each requested condition to ``None`` (holds) or a :class:`ConditionWitness`.

    Witnesses are least in the order: world indices first, then set masks
    ascending (bit ``i`` = ``i``-th input world).
    """
    m.require_valid()
    return {c: _CHECKS[c](m) for c in fc}


def _witness(m: Model, cond: Cond, worlds: Sequence[int], sets: Sequence[int]) -> ConditionWitness:
    return ConditionWitness(cond, tuple(m.worlds[i] for i in worlds), tuple(m.names(x) for x in sets))


def _pairs(m: Model):
    for i in range(m.size):
        for j in bits(m.up[i]):
            yield i, j


def _all_sets(m: Model):
    return range(m.full + 1)


def _check_c1(m, cond=Cond.C1):
    for i, j in _pairs(m):
        for x in m.family(i):
            if not x >> j & 1 and x not in m.nbhd[j]:
                return _witness(m, cond, (i, j), (x,))
    return None


def _check_c2(m):
    for i, j in _pairs(m):
        for x in m.family(i):
            if x not in m.nbhd[j]:
                return _witness(m, Cond.C2, (i, j), (x,))
    return None


def _check_cap(m):
    for i in range(m.size):
        fam = m.family(i)
        for x in fam:
            for y in fam:
                if x & y not in m.nbhd[i]:
                    return _witness(m, Cond.CAP, (i,), (x, y))
    return None


def _check_sup(m):
    for i in range(m.size):
        for x in m.family(i):
            for y in _all_sets(m):
                if x & ~y == 0 and y not in m.nbhd[i]:
                    return _witness(m, Cond.SUP, (i,), (x, y))
    return None


def _check_negsup(m):
    for i in range(m.size):
        for y in m.family(i):
            for x in _all_sets(m):
                if y & ~x == 0 and not x >> i & 1 and x not in m.nbhd[i]:
                    return _witness(m, Cond.NEGSUP, (i,), (y, x))
    return None


def _check_cbox(m):
    for i, j in _pairs(m):
        for x in _all_sets(m):
            if x >> j & 1 and x in m.nbhd[i] and x not in m.nbhd[j]:
                return _witness(m, Cond.CBOX, (i, j), (x,))
    return None


def _check_cdia(m):
    for i, j in _pairs(m):
        for x in _all_sets(m):
            cx = m.full ^ x
            if x >> j & 1 and cx not in m.nbhd[i] and cx in m.nbhd[j]:
                return _witness(m, Cond.CDIA, (i, j), (x,))
    return None


def _check_cbsq(m):
    for i, j in _pairs(m):
        for x in _all_sets(m):
            cx = m.full ^ x
            if x >> j & 1 and cx in m.nbhd[i] and cx not in m.nbhd[j]:
                return _witness(m, Cond.CBSQ, (i, j), (x,))
    return None


def _check_cblt(m):
    for i, j in _pairs(m):
        for x in _all_sets(m):
            if x >> j & 1 and x not in m.nbhd[i] and x in m.nbhd[j]:
                return _witness(m, Cond.CBLT, (i, j), (x,))
    return None


def _check_cn(m):
    for i, j in _pairs(m):
        for x in _all_sets(m):
            if not x >> j & 1:
                continue
            cx = m.full ^ x
            for y in m.family(i):
                if y & ~cx == 0 and y not in m.nbhd[j]:
                    return _witness(m, Cond.CN, (i, j), (x, y))
    return None


def _check_cons(m):
    for i in range(m.size):
        for x in m.family(i):
            if m.full ^ x in m.nbhd[i]:
                return _witness(m, Cond.CONS, (i,), (x,))
    return None


_CHECKS = {
    Cond.C1: _check_c1,
    Cond.C2: _check_c2,
    Cond.CAP: _check_cap,
    Cond.SUP: _check_sup,
    Cond.NEGSUP: _check_negsup,
    Cond.CBOX: _check_cbox,
    Cond.CDIA: _check_cdia,
    Cond.CBSQ: _check_cbsq,
    Cond.CBLT: _check_cblt,
    Cond.CN: _check_cn,
    Cond.CONS: _check_cons,
}


def satisfies(m: Model, fc: Iterable[Cond]) -> bool:
    return all(v is None for v in check_conditions(m, fc).values())
