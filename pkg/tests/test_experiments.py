import pytest

from pnmodal.experiments import (
    EXPERIMENTS, axiom_instances, instance_pool, persistence_at_bound, rule_soundness_at_bound,
    run_experiment, soundness_at_bound,
)
from pnmodal.formula import ModalOp, parse
from pnmodal.logics import RuleId, logic_spec
from pnmodal.model import Cond, Model, validate
from pnmodal.search import SearchConfig

from oracles import SetModel, ext as oracle_ext


@pytest.mark.parametrize("lid", ["W", "WC", "MW", "MWC", "A", "B", "C", "D"])
def test_soundness_exhaustive(lid):
    rep = soundness_at_bound(lid, 2)
    assert rep.ok, rep.failures
    assert rep.models_checked > 0


def test_soundness_detects_missing_condition():
    # without CBOX, box formulas stop persisting and even k fails
    rep = soundness_at_bound("A", 2, frame_class={Cond.C1})
    assert "t_box" not in rep.failures
    f, m = rep.failures["k"]
    assert validate(m) == []
    assert oracle_ext(SetModel(m), f) != set(m.worlds)


def test_axiom_instances_cover_pool():
    insts = axiom_instances(logic_spec("W"), instance_pool(ModalOp.W))
    assert ("ntax", parse("W p -> ~p")) in insts
    assert len({f for _, f in insts}) > 500


def test_persistence_needs_flag():
    fs = [parse("W p"), parse("bullet ~p")]
    checked, viol = persistence_at_bound(fs, frozenset(), 2)
    assert viol is not None
    g, m = viol
    up = SetModel(m)
    x = oracle_ext(up, g)
    assert any(w in x and v not in x for (w, v) in up.leq)
    assert persistence_at_bound([parse("W p")], {Cond.C1}, 2)[1] is None


def test_re_sound_on_w_class():
    checked, hits, viol = rule_soundness_at_bound(RuleId.RE, {Cond.C1}, instance_pool(ModalOp.W))
    assert hits > 0 and viol == []


def test_wn_unsound_without_sup():
    _, _, viol = rule_soundness_at_bound(RuleId.WN, {Cond.C1}, instance_pool(ModalOp.W))
    assert viol


def test_named_experiments_listed():
    assert set(EXPERIMENTS) == {"duality", "classical_w_persistence", "box_dia_bridge", "cons_bridge",
                                "bk_soundness"}
    with pytest.raises(KeyError):
        run_experiment("nope")


def test_duality_report_is_self_consistent():
    rep = run_experiment("duality", SearchConfig(max_worlds=2))
    assert rep["verdict"] in ("verified at bound", "counterexample")
    if rep["verdict"] == "counterexample":
        assert rep["self_check"] == "consistent"
        m = Model.from_json(rep["model"])
        sm = SetModel(m)
        phi = parse(rep["formula"])
        circ = oracle_ext(sm, parse(f"~bullet ({rep['formula']})"))
        x = oracle_ext(sm, phi)
        clause = {w for w in m.worlds if w not in x or x in sm.nbhd[w]}
        assert (rep["world"] in circ) != (rep["world"] in clause)


def test_classical_w_witness():
    rep = run_experiment("classical_w_persistence", SearchConfig(max_worlds=2))
    assert rep["verdict"] == "non-up-set witness"
    m = Model.from_json(rep["model"])
    sm = SetModel(m)
    x = oracle_ext(sm, parse(rep["formula"]))
    lo, hi = rep["witness"]
    classical = {w for w in m.worlds if w not in x and x in sm.nbhd[w]}
    assert lo in classical and hi not in classical and (lo, hi) in sm.leq


def test_bridges():
    assert run_experiment("box_dia_bridge")["verdict"].endswith("verified at bound")
    assert run_experiment("cons_bridge")["verdict"].endswith("verified at bound")


def test_bk_report_shape():
    rep = run_experiment("bk_soundness", SearchConfig(max_worlds=1))
    assert set(rep["axioms"]) == {n for n, _ in logic_spec("BK").axioms}
    assert rep["rule"]["status"] in ("sound at bound", "counterexample")
