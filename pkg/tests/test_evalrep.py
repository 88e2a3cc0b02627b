from qcurrents.coeffcore import QScalar, qint, qq
from qcurrents.drinfeld import check_drinfeld_modes, first_failure
from qcurrents.evalrep import (
    PAR3,
    build_dual,
    build_eval,
    compare_dual,
    closed_vs_recursion,
    dual_via_antipode,
    induction_step,
    validate_proposition,
    _e,
    _xpow,
)
from qcurrents.superlin import GradedMatrix


def test_chevalley_matrices_as_printed():
    c = build_eval().chevalley
    q = qq(1)
    assert c.K[1] == GradedMatrix.diag(PAR3, [q, QScalar.const(1), qq(-1)])
    assert c.E[1] == _e(1, 2) - _e(2, 3)
    assert c.F[1] == _e(2, 1) + _e(3, 2)
    x = _xpow("x", 1)
    assert c.E[0] == (_e(2, 1, -1) + _e(3, 2)).scale(x * qq(-1))
    assert c.F[0] == (_e(1, 2) + _e(2, 3)).scale(x.invert() * q)
    # level zero: K_0 K_1 = 1
    assert (c.K[0] * c.K[1]).is_identity()


def test_closed_form_low_modes():
    rep = build_eval()
    # m=0 modes reduce to the Chevalley generators
    assert rep.xp(0) == rep.chevalley.E[1]
    assert rep.xm(0) == rep.chevalley.F[1]
    # X-_1 = x(-e21 + q^-1 e32)
    x = _xpow("x", 1)
    assert rep.xm(1) == (_e(2, 1, -1) + _e(3, 2, qq(-1))).scale(x)
    # corrected H_1 = -x(q^-1 e11 + (1+q^-1) e22 + e33)
    want = (_e(1, 1, qq(-1)) + _e(2, 2, 1 + qq(-1)) + _e(3, 3)).scale(-x)
    assert rep.h(1, "corrected") == want
    # as-printed H_1 carries (1+q) on e22 instead
    wrong = (_e(1, 1, qq(-1)) + _e(2, 2, 1 + qq(1)) + _e(3, 3)).scale(-x)
    assert rep.h(1, "as-printed") == wrong


def test_variant_difference_is_only_e22():
    rep = build_eval()
    for m in (1, 2, 3, -1, -2):
        d = rep.h(m, "as-printed") - rep.h(m, "corrected")
        assert set(d.entries) <= {(1, 1)}
        x_m = _xpow("x", m)
        want = -qint(m) / QScalar.const(m) * x_m * \
            QScalar.const((-1) ** m) * (qq(-m) - qq(m))
        assert d[(1, 1)] == want


def test_corrected_variant_passes_window6():
    rep = build_eval()
    rels = check_drinfeld_modes(rep.mode_rep(6, "corrected"), 6)
    assert first_failure(rels) is None


def test_as_printed_first_failure_is_h1_xp0():
    rep = build_eval()
    rels = check_drinfeld_modes(rep.mode_rep(6, "as-printed"), 6)
    ff = first_failure(rels)
    assert ff is not None
    assert ff.rel == "HX" and ff.params == (1, 1, 0)


def test_recursion_table_and_induction():
    rep = build_eval()
    table = closed_vs_recursion(rep, 4, "corrected")
    assert all(ok for _, _, ok, _ in table)
    bad = closed_vs_recursion(rep, 2, "as-printed")
    assert any(not ok for kind, _, ok, _ in bad if kind == "H")
    assert all(r.ok for r in induction_step(rep, 6, "corrected"))


def test_validate_proposition_report_shape():
    rep = build_eval()
    report = validate_proposition(rep, 2)
    assert first_failure(report["chevalley"]) is None
    assert report["variants"]["corrected"]["first_failure"] is None
    assert report["variants"]["corrected"]["recursion_ok"]
    ff = report["variants"]["as-printed"]["first_failure"]
    assert ff is not None and ff.rel == "HX"
    assert not report["variants"]["as-printed"]["recursion_ok"]


def test_dual_matrices_as_printed():
    c = build_dual().chevalley
    q = qq(1)
    x = _xpow("x", 1)
    assert c.K[1] == GradedMatrix.diag(PAR3, [qq(-1), QScalar.const(1), q])
    assert c.E[1] == (_e(2, 1, qq(-1)) + _e(3, 2)).scale(QScalar.const(-1))
    assert c.F[1] == _e(1, 2, q) - _e(2, 3)
    assert c.F[0] == (_e(2, 1, -1) + _e(3, 2, q)).scale(x.invert() * q)


def test_dual_closed_forms_pass_and_match_recursion():
    dual = build_dual()
    rels = check_drinfeld_modes(dual.mode_rep(6, "corrected"), 6)
    assert first_failure(rels) is None
    # for the dual, the printed forms already agree with the recursion
    table = closed_vs_recursion(dual, 4, "as-printed")
    assert all(ok for _, _, ok, _ in table)


def test_dual_via_antipode_matches_printed():
    assert compare_dual(build_eval(), build_dual()) == []


def test_dual_via_antipode_generator_values():
    got = dual_via_antipode(build_eval())
    q = qq(1)
    x = _xpow("x", 1)
    assert got.E[1] == (_e(2, 1, qq(-1)) + _e(3, 2)).scale(QScalar.const(-1))
    assert got.K[1] == GradedMatrix.diag(PAR3, [qq(-1), QScalar.const(1), q])
    assert got.F[0] == (_e(2, 1, -1) + _e(3, 2, q)).scale(x.invert() * q)
