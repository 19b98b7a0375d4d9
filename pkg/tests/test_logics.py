import pytest

from pnmodal.formula import ModalOp, parse, render
from pnmodal.logics import IPC_AXIOMS, LOGIC_IDS, RuleId, logic_spec, rule_instance
from pnmodal.model import Cond


def test_catalog_ids():
    assert set(LOGIC_IDS) == {"W", "WC", "MW", "MWC", "A", "B", "C", "D", "BK"}


def test_w_contains_ntax():
    assert str(logic_spec("W").axiom("ntax")) == "W A -> ~A"


def test_mwc_class():
    assert logic_spec("MWC").frame_class == {Cond.C1, Cond.SUP, Cond.CAP}


def test_d_has_bullet_t():
    assert "bullet A -> A" in [str(s) for _, s in logic_spec("D").axioms]


@pytest.mark.parametrize("lid,cls", [
    ("W", {Cond.C1}), ("WC", {Cond.C1, Cond.CAP}), ("MW", {Cond.C1, Cond.SUP}),
    ("A", {Cond.CBOX}), ("B", {Cond.CDIA}), ("C", {Cond.CBSQ}), ("D", {Cond.CBLT}), ("BK", set()),
])
def test_frame_classes(lid, cls):
    assert logic_spec(lid).frame_class == cls


def test_rules():
    assert RuleId.WN in logic_spec("MW").rules
    assert RuleId.WN not in logic_spec("W").rules
    assert RuleId.BKRULE in logic_spec("BK").rules


def test_ipc_basis_is_shared():
    names = [n for n, _ in IPC_AXIOMS]
    assert names == ["k", "s", "and_e1", "and_e2", "and_i", "or_i1", "or_i2", "or_e", "efq"]
    for lid in LOGIC_IDS:
        if lid != "BK":
            assert set(names) <= set(logic_spec(lid).axiom_names)


def test_unknown_logic():
    with pytest.raises(KeyError):
        logic_spec("K")


def test_rule_shapes():
    p, q = parse("p"), parse("q")
    prem, concl = rule_instance(RuleId.RE, p, q)
    assert render(prem[0]) == "(p -> q) & (q -> p)"
    assert render(concl) == "(W p -> W q) & (W q -> W p)"
    _, concl = rule_instance(RuleId.RE, p, q, op=ModalOp.DIA)
    assert render(concl) == "(dia p -> dia q) & (dia q -> dia p)"
    _, concl = rule_instance(RuleId.WN, p, q)
    assert render(concl) == "W p & ~q -> W q"
    _, concl = rule_instance(RuleId.BKRULE, p, q)
    assert render(concl) == "~bullet p & p -> ~bullet q & q"


def test_re_operator_per_logic():
    assert logic_spec("A").re_operator is ModalOp.BOX
    assert logic_spec("D").re_operator is ModalOp.BULLET
