import pytest

from qcurrents.coeffcore import QScalar, q_minus_qinv, qq
from qcurrents.drinfeld import (
    ChevalleyRep,
    acomm,
    assert_all_ok,
    check_chevalley,
    check_drinfeld_modes,
    check_hopf,
    chevalley_from_drinfeld,
    comm,
    coproduct_rep,
    drinfeld_from_chevalley,
    first_failure,
    h_from_psi,
    level_from_chevalley,
    psi_modes_from_h,
    psi_via_anticommutator,
    _partitions,
)
from qcurrents.errors import NonCentralLevel, RelationViolation, WindowTooSmall
from qcurrents.evalrep import build_dual, build_eval
from qcurrents.superlin import GradedMatrix


def test_partitions_enumeration():
    # partitions of 4 as multiplicity vectors
    parts = {tuple(sorted(p.items())) for p in _partitions(4)}
    assert parts == {
        ((4, 1),), ((1, 1), (3, 1)), ((2, 2),), ((1, 2), (2, 1)), ((1, 4),),
    }
    assert len(list(_partitions(6))) == 11


def test_check_chevalley_on_eval():
    assert_all_ok(check_chevalley(build_eval().chevalley))
    assert_all_ok(check_chevalley(build_dual().chevalley))


def test_check_chevalley_detects_violation():
    c = build_eval().chevalley
    broken = ChevalleyRep(E=(c.E[0], c.E[1].scale(qq(1))), F=c.F,
                          K=c.K, Kinv=c.Kinv, one=c.one)
    with pytest.raises(RelationViolation):
        assert_all_ok(check_chevalley(broken))


def test_level_detection():
    assert level_from_chevalley(build_eval().chevalley) == 0
    c = build_eval().chevalley
    # scale K_0 by q^2: now K_0 K_1 = q^2, level 2
    shifted = ChevalleyRep(E=c.E, F=c.F, K=(c.K[0].scale(qq(2)), c.K[1]),
                           Kinv=(c.Kinv[0].scale(qq(-2)), c.Kinv[1]), one=c.one)
    assert level_from_chevalley(shifted) == 2
    broken = ChevalleyRep(E=c.E, F=c.F, K=(c.K[0] + c.E[1], c.K[1]),
                          Kinv=c.Kinv, one=c.one)
    with pytest.raises(NonCentralLevel):
        level_from_chevalley(broken)


def test_drinfeld_from_chevalley_window_guard():
    with pytest.raises(WindowTooSmall):
        drinfeld_from_chevalley(build_eval().chevalley, 0)


def test_mode_relations_eval_window3():
    rep = build_eval()
    assert_all_ok(check_drinfeld_modes(rep.mode_rep(3), 3))


def test_mode_relations_xpxm_zero_instance():
    # {X+_0, X-_0} = (K - K^-1)/(q - q^-1)
    mode = build_eval().mode_rep(1)
    lhs = acomm(mode.Xp[0], mode.Xm[0])
    rhs = (mode.K - mode.Kinv).scale(q_minus_qinv().invert())
    assert (lhs - rhs).is_zero()


def test_mode_relations_hx_low_instance():
    # [H_1, X+_0] = -X+_1 at level 0
    mode = build_eval().mode_rep(2)
    assert (comm(mode.H[1], mode.Xp[0]) + mode.Xp[1]).is_zero()


def test_hh_central_term_vanishes_at_level_zero():
    mode = build_eval().mode_rep(2)
    assert comm(mode.H[1], mode.H[-1]).is_zero()


def test_psi_roundtrip_window5():
    for build in (build_eval, build_dual):
        mode = build().mode_rep(5)
        psip, psim = psi_modes_from_h(mode, 5)
        assert (psip[0] - mode.K).is_zero()
        assert (psip[1] - (mode.K * mode.H[1]).scale(q_minus_qinv())).is_zero()
        back = h_from_psi(psip, psim, mode.K, mode.Kinv, 5)
        for n in list(range(1, 6)) + list(range(-5, 0)):
            assert (back[n] - mode.H[n]).is_zero(), n


def test_psi_window_guard():
    mode = build_eval().mode_rep(2)
    with pytest.raises(WindowTooSmall):
        psi_modes_from_h(mode, 10)


def test_psi_anticommutator_shortcut():
    mode = build_eval().mode_rep(4)
    psip, psim = psi_modes_from_h(mode, 4)
    for n in range(1, 5):
        assert (psi_via_anticommutator(mode, n, 1) - psip[n]).is_zero()
        assert (psi_via_anticommutator(mode, n, -1) - psim[-n]).is_zero()


def test_conversion_coherence():
    # chevalley_from_drinfeld(drinfeld_from_chevalley(rep)) == rep
    for build in (build_eval, build_dual):
        chev = build().chevalley
        mode = drinfeld_from_chevalley(chev, 2)
        back = chevalley_from_drinfeld(mode)
        for a, b in ((back.E, chev.E), (back.F, chev.F), (back.K, chev.K)):
            for i in range(2):
                assert (a[i] - b[i]).is_zero()


def test_recursion_vs_closed_forms():
    rep = build_eval()
    oracle = drinfeld_from_chevalley(rep.chevalley, 4)
    for n in range(-4, 5):
        if n:
            assert (oracle.H[n] - rep.h(n, "corrected")).is_zero()
        assert (oracle.Xp[n] - rep.xp(n)).is_zero()
        assert (oracle.Xm[n] - rep.xm(n)).is_zero()


def test_hopf_checks_on_tensor():
    reports = check_hopf(build_eval("x").chevalley, build_eval("w").chevalley)
    assert_all_ok(reports)
    # sanity: all four families of checks are present
    rels = {r.rel.split(".")[0] for r in reports}
    assert {"Delta", "counit", "antipode", "S"} <= rels


def test_coproduct_k1_action_on_v1v1():
    tensor = coproduct_rep(build_eval("x").chevalley, build_eval("w").chevalley)
    assert tensor.K[1][(0, 0)] == qq(2)


def test_hopf_detects_broken_coproduct():
    cx = build_eval("x").chevalley
    cw = build_eval("w").chevalley
    broken = ChevalleyRep(E=(cx.E[0], cx.E[1].scale(QScalar.const(2))),
                          F=cx.F, K=cx.K, Kinv=cx.Kinv, one=cx.one)
    assert first_failure(check_hopf(broken, cw)) is not None
