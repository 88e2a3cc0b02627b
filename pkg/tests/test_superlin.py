import itertools
import random

import pytest

from qcurrents.coeffcore import QScalar, S
from qcurrents.errors import MixedParity, Singular
from qcurrents.superlin import (
    GradedMatrix,
    embed_pair,
    graded_kron,
    graded_permutation,
    tensor_parities,
)

P = (0, 1, 0)


def unit(i, j, coeff=1):
    return GradedMatrix.unit(P, i, j, coeff)


def op_parity(i, j):
    return (P[i] + P[j]) % 2


def test_matrix_ring_basics():
    a = unit(0, 1) + unit(1, 2, 3)
    b = unit(1, 0) - unit(2, 2)
    assert (a + b) - b == a
    assert a * GradedMatrix.identity(P) == a
    assert GradedMatrix.identity(P) * a == a
    assert (a * b)[(0, 0)] == QScalar.const(1)
    assert a.scale(0).is_zero()


def test_parity_detection():
    assert unit(0, 1).parity() == 1
    assert unit(0, 2).parity() == 0
    assert GradedMatrix.zero(P).parity() == 0
    with pytest.raises(MixedParity):
        (unit(0, 1) + unit(0, 2)).parity()


def test_kron_homomorphism_with_koszul_sign():
    # (A x B)(C x D) = (-1)^{[B][C]} (AC x BD) on all matrix units
    for i, j, k, l, a, b, c, d in itertools.product(range(3), repeat=8):
        if (i + 2 * j + 3 * k + l + a + b + c + d) % 11:  # thin but fixed sample
            continue
        A, B, C, D = unit(i, j), unit(k, l), unit(a, b), unit(c, d)
        lhs = graded_kron(A, B) * graded_kron(C, D)
        sign = -1 if (op_parity(k, l) * op_parity(a, b)) % 2 else 1
        rhs = graded_kron(A * C, B * D).scale(sign)
        assert lhs == rhs


def test_permutation_involution_and_conjugation():
    perm = graded_permutation(P)
    assert perm * perm == GradedMatrix.identity(tensor_parities(P, P))
    rng = random.Random(5)
    for _ in range(25):
        i, j, k, l = (rng.randrange(3) for _ in range(4))
        A, B = unit(i, j), unit(k, l)
        sign = -1 if (op_parity(i, j) * op_parity(k, l)) % 2 else 1
        assert perm * graded_kron(A, B) * perm == graded_kron(B, A).scale(sign)


def test_permutation_on_odd_vector():
    # P(v2 x v2) = -v2 x v2: column 4 has single entry -1 at row 4
    perm = graded_permutation(P)
    assert perm[(4, 4)] == QScalar.const(-1)
    assert perm[(1, 3)] == QScalar.const(1)


def test_supertranspose_is_graded_antihomomorphism():
    rng = random.Random(6)
    for _ in range(30):
        i, j, k, l = (rng.randrange(3) for _ in range(4))
        A, B = unit(i, j), unit(k, l)
        sign = -1 if (op_parity(i, j) * op_parity(k, l)) % 2 else 1
        assert (A * B).supertranspose() == \
            (B.supertranspose() * A.supertranspose()).scale(sign)


def test_supertranspose_frozen_signs():
    # (e_ij)^st = (-1)^{[i]([i]+[j])} e_ji with parities (0,1,0)
    assert unit(1, 0).supertranspose() == unit(0, 1, -1)
    assert unit(0, 1).supertranspose() == unit(1, 0)
    assert unit(1, 1).supertranspose() == unit(1, 1)
    assert unit(0, 2).supertranspose() == unit(2, 0)


def test_supertrace():
    m = GradedMatrix.diag(P, [QScalar.const(1), QScalar.const(2), QScalar.const(3)])
    assert m.supertrace() == QScalar.const(2)


def test_inverse_roundtrip_and_singular():
    m = GradedMatrix.from_rows(P, [[S, 1, 0], [1, S**2, S], [0, 1, 1]])
    inv = m.inverse()
    assert (m * inv).is_identity()
    assert (inv * m).is_identity()
    with pytest.raises(Singular):
        GradedMatrix.from_rows(P, [[1, 1, 0], [1, 1, 0], [0, 0, 1]]).inverse()


def test_embed_pair_multiplicative():
    m = graded_kron(unit(0, 1), unit(1, 2))
    n = graded_kron(unit(1, 0), unit(2, 1))
    for pos in ((1, 2), (2, 3), (1, 3)):
        assert embed_pair(m, P, pos) * embed_pair(n, P, pos) == \
            embed_pair(m * n, P, pos)


def test_embed_13_vs_explicit_sum():
    # e_ij (x) e_kl at sites (1,3) acts as e_ij (x) 1 (x) e_kl up to the
    # sign from moving e_kl past the middle site; oracle: apply to basis
    # vectors via column inspection on an even middle operator
    two_site = graded_kron(unit(0, 2), unit(2, 0))  # both factors even
    emb = embed_pair(two_site, P, (1, 3))
    direct = graded_kron(graded_kron(unit(0, 2), GradedMatrix.identity(P)),
                         unit(2, 0))
    assert emb == direct
