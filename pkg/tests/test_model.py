import pytest
from hypothesis import given, settings, strategies as st

from pnmodal.model import (
    Cond, Model, ModelError, OrderError, check_conditions, parse_class, saturate_order, validate,
)
from pnmodal.search import SearchConfig, enumerate_models

from oracles import powerset


class TestValidate:
    def test_degenerate_model(self):
        assert validate(Model.build(["w"], [], {"w": []}, {})) == []

    def test_valuation_not_upset(self):
        m = Model.build(["w", "v"], [("w", "v")], {"w": [], "v": []}, {"p": ["w"]})
        msgs = [v.message for v in validate(m)]
        assert msgs == ["valuation not an up-set, atom p, witness (w,v)"]

    def test_not_reflexive(self):
        m = Model(("w",), (0,), (frozenset(),), {})
        assert any("not reflexive at w" in v.message for v in validate(m))

    def test_not_transitive(self):
        # w <= v <= u without w <= u
        m = Model(("w", "v", "u"), (0b011, 0b110, 0b100), (frozenset(),) * 3, {})
        assert any(v.kind == "transitivity" for v in validate(m))

    def test_nbhd_out_of_range(self):
        m = Model(("w",), (1,), (frozenset({0b10}),), {})
        assert validate(m)

    def test_unknown_world_in_json(self):
        with pytest.raises(ModelError):
            Model.from_json({"worlds": ["w"], "order": [], "nbhd": {"w": [["x"]]}, "valuation": {}})


class TestSaturate:
    def test_single_pair(self):
        assert saturate_order([("w", "v")], ["w", "v"]) == {("w", "w"), ("v", "v"), ("w", "v")}

    def test_transitivity(self):
        assert ("w", "u") in saturate_order([("w", "v"), ("v", "u")], ["w", "v", "u"])

    def test_cycle(self):
        with pytest.raises(OrderError) as exc:
            saturate_order([("w", "v"), ("v", "w")], ["w", "v"])
        assert set(exc.value.cycle) == {"w", "v"}


class TestConditions:
    def test_cap_fails_on_discrete_model(self):
        m = Model.build(["a", "b", "c"], [], {"a": [], "b": [], "c": [["a"], ["b"]]}, {})
        w = check_conditions(m, {Cond.CAP})[Cond.CAP]
        assert w is not None
        assert w.worlds == ("c",)
        assert w.sets == (("a",), ("b",))

    def test_powerset_everywhere(self):
        worlds = ["a", "b"]
        fam = [sorted(x) for x in powerset(worlds)]
        m = Model.build(worlds, [("a", "b")], {w: fam for w in worlds}, {})
        verdicts = check_conditions(m, parse_class("C1,C2,CAP,SUP,CBOX"))
        assert all(v is None for v in verdicts.values())

    def test_chain_with_full_set(self, chain_model):
        verdicts = check_conditions(chain_model, {Cond.C1, Cond.CBOX, Cond.CDIA})
        assert all(v is None for v in verdicts.values())

    def test_c1_violation(self):
        # {} in N_w, v not in {}, {} not in N_v
        m = Model.build(["w", "v"], [("w", "v")], {"w": [[]], "v": []}, {})
        w = check_conditions(m, {Cond.C1})[Cond.C1]
        assert w.worlds == ("w", "v") and w.sets == ((),)

    def test_parse_class(self):
        assert parse_class("C1, cap") == {Cond.C1, Cond.CAP}
        assert parse_class("") == frozenset()
        with pytest.raises(ValueError):
            parse_class("C1,NOPE")


def _all_models(n):
    return enumerate_models(SearchConfig(max_worlds=n, atoms=()), ())


def test_c2_implies_c1_at_bound():
    for m in _all_models(2):
        v = check_conditions(m, {Cond.C1, Cond.C2})
        if v[Cond.C2] is None:
            assert v[Cond.C1] is None


def test_cbsq_c1_cn_coincide_at_bound():
    # the three conditions reduce to the same first-order statement
    for m in _all_models(2):
        v = check_conditions(m, {Cond.C1, Cond.CBSQ, Cond.CN})
        assert (v[Cond.C1] is None) == (v[Cond.CBSQ] is None) == (v[Cond.CN] is None)


def _relabel(m: Model, perm) -> Model:
    data = m.to_json()
    ren = dict(zip(data["worlds"], perm))
    worlds = [ren[w] for w in data["worlds"]]
    return Model.build(
        sorted(worlds), [(ren[a], ren[b]) for a, b in data["order"]],
        {ren[w]: [[ren[x] for x in s] for s in fam] for w, fam in data["nbhd"].items()},
        {a: [ren[x] for x in v] for a, v in data["valuation"].items()},
    )


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.permutations(["x", "y", "z"]))
def test_condition_verdicts_survive_relabelling(seed, perm):
    cfg = SearchConfig(max_worlds=3, min_worlds=3, sampled=(seed, 1), atoms=("p",))
    m = next(iter(enumerate_models(cfg, ("p",))))
    r = _relabel(m, perm)
    assert validate(r) == []
    a = check_conditions(m, list(Cond))
    b = check_conditions(r, list(Cond))
    assert {c for c, v in a.items() if v is None} == {c for c, v in b.items() if v is None}
