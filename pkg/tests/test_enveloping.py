from fractions import Fraction

import pytest

from homformal.algebras import check_axioms, fixture
from homformal.graded import (CochainComplex, Contraction, GradedLinearMap,
                              GradedVectorSpace, InputError, ONE)
from homformal.enveloping import (AdjointModule, PBWTruncation, aux_envelope,
                                  envelope, pbw_eta, perturbation_lemma,
                                  quillen_check, summand_retraction,
                                  weight_grading)


def test_pbw_straightening_sl2():
    env = envelope(fixture("F5"), 2)
    # fe = ef - h  (since [e,f] = h)
    assert env.normal_form(("f", "e")) == {("e", "f"): ONE, ("h",): -ONE}


def test_pbw_odd_square():
    # for odd x, xx = [x,x]/2 = 0 in the abelian case
    env = envelope(fixture("F1"), 3)
    assert env.normal_form(("x", "x")) == {}


def test_pbw_abelian_sorting_is_signless_free():
    env = envelope(fixture("F3"), 3)
    # u odd, v even: vu -> uv with sign (-1)^{1*0}... = +1
    assert env.normal_form(("v", "u")) == {("u", "v"): ONE}


def test_mul_overflow_returns_none():
    env = envelope(fixture("F5"), 2)
    assert env.mul(("e", "f"), ("e",)) is None


def test_adjoint_module_is_a_module():
    adj = AdjointModule(fixture("F5"), 2)
    assert adj.module_defects() == []


def test_eta_bijective_and_equivariant():
    rep = pbw_eta(fixture("F5"), 2).report()
    assert rep["bijective"]
    assert rep["module_defects"] == []


def test_retraction_report():
    rep = summand_retraction(fixture("F5"), 2).report()
    assert rep["unit_killed"]
    assert rep["fixes_generators"]
    assert rep["equivariance_defects"] == []


def test_weight_grading():
    w = weight_grading(fixture("F3_nonformal"))
    assert w is not None
    assert w["p"] == w["x"] + w["y"]
    assert w["q"] == w["x"] + w["z"]
    assert weight_grading(fixture("F5")) is None


def test_aux_envelope_is_honest():
    L = fixture("F3_nonformal")
    U = aux_envelope(L, 3, weight_grading(L))
    rep = check_axioms(U)
    assert rep["passed"], rep["violations"][:3]
    assert U.unit == "1"


def test_quillen_f5():
    rep = quillen_check(fixture("F5"), 3)
    assert rep["dims_match"]
    assert rep["bijective"]
    assert rep["algebra_map_defects"] == []


def test_quillen_acyclic_envelope_is_trivial():
    rep = quillen_check(fixture("acyclic"), 3)
    assert rep["dims_match"]
    assert rep["table_hul"] == {(0, 0): 1}


def _toy_contraction():
    sp = GradedVectorSpace([("a", 0), ("u", 0), ("v", 1)])
    d = GradedLinearMap(sp, sp, 1, {"u": {"v": ONE}})
    big = CochainComplex(sp, d)
    ssp = GradedVectorSpace([("a", 0)])
    small = CochainComplex(ssp, GradedLinearMap.zero(ssp, ssp, 1))
    f = GradedLinearMap(sp, ssp, 0, {"a": {"a": ONE}})
    g = GradedLinearMap(ssp, sp, 0, {"a": {"a": ONE}})
    h = GradedLinearMap(sp, sp, -1, {"v": {"u": -ONE}})
    con = Contraction(big, small, f, g, h)
    assert con.check() == []
    return con, sp


def test_perturbation_lemma_small():
    con, sp = _toy_contraction()
    t = GradedLinearMap(sp, sp, 1, {"a": {"v": ONE}})
    filt = {"a": 1, "u": 0, "v": 0}
    out = perturbation_lemma(con, t, filt, {"t": -1, "h": 0})
    # d'(a) = v and h(v) = -u, so the perturbed inclusion picks up u
    assert out["small"].d.is_zero()
    assert out["g"].cols["a"] == {"a": ONE, "u": -ONE}


def test_perturbation_lemma_validates_input():
    con, sp = _toy_contraction()
    bad = GradedLinearMap(sp, sp, 1, {"u": {"v": ONE}})
    with pytest.raises(InputError):
        # d + t fails to square to zero... or the shift certificate trips
        perturbation_lemma(con, bad, {"a": 1, "u": 0, "v": 0},
                           {"t": -1, "h": 0})
