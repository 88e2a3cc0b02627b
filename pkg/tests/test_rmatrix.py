import pytest

from qcurrents.coeffcore import Laurent, QScalar, qq
from qcurrents.errors import YbeViolation
from qcurrents.rmatrix import (
    LAYOUT,
    PARITIES,
    build_r,
    build_r_zw,
    check_homogeneity,
    check_ybe_random,
    check_ybe_symbolic,
    r_at,
    r_entries,
    special_points,
)
from qcurrents.superlin import graded_permutation

U = QScalar.var("u")
Q = qq(1)


def test_entry_closed_forms():
    ent = r_entries()
    assert ent["a"] == Q * (U - 1) / (U * Q**2 - 1)
    assert ent["f"] == U * (Q**2 - 1) / (U * Q**2 - 1)
    # b at u=1 equals 1
    assert ent["b"].substitute("u", Laurent.const(1)).is_one()
    # e at u=1 equals -1
    assert ent["e"].substitute("u", Laurent.const(1)) == QScalar.const(-1)


def test_sparsity_pattern():
    r = build_r()
    assert set(r.entries) == set(LAYOUT)
    assert r[(0, 0)].is_one() and r[(8, 8)].is_one()


def test_parity_preserving():
    r = build_r()
    p = r.parities
    for (i, j) in r.entries:
        assert p[i] == p[j]


def test_r_at_one_is_graded_permutation():
    assert r_at(Laurent.const(1)) == graded_permutation(PARITIES)


def test_homogeneity_degree_zero():
    # entries written in z, w are invariant under z,w -> lam z, lam w
    assert check_homogeneity()
    # and the z/w form reproduces the u form
    rzw = build_r_zw()
    assert rzw.substitute("w", Laurent.const(1)).substitute(
        "z", Laurent.var("u")) == build_r()


def test_ybe_symbolic():
    check_ybe_symbolic()  # raises on failure


def test_ybe_random_trials():
    pts = check_ybe_random(trials=20, seed=11)
    assert len(pts) == 20


def test_ybe_mutation_detected():
    with pytest.raises(YbeViolation):
        check_ybe_symbolic(corrupt={"b": QScalar.const(2)})
    with pytest.raises(YbeViolation):
        check_ybe_random(trials=5, seed=1, corrupt={"d": qq(1)})


def test_special_points_report():
    sp = special_points()
    assert sp["r_at_one_is_permutation"]
    assert sp["poles"]["d"] == ["q^-2", "-q^-1"]
    assert sp["poles"]["a"] == ["q^-2"]
    assert sp["poles"]["b"] == ["q^-2"]
    # informational only: this R happens to satisfy R12(u) R21(1/u) = scalar
    assert isinstance(sp["unitarity_scalar"], bool)
