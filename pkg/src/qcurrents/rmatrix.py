"""The 9x9 trigonometric R-matrix on V (x) V, V of parity (0,1,0).

Entries are rational functions of the spectral ratio u = z/w and of
s = q**(1/2).  The matrix is parity preserving, degenerates to the graded
permutation at u = 1, and satisfies the graded Yang-Baxter equation

    R12(z) R13(zw) R23(w) = R23(w) R13(zw) R12(z),

which is checked both symbolically (exact rational arithmetic, identically
zero residual) and at random rational points.
"""

from __future__ import annotations

import random as _random

from .coeffcore import Laurent, QScalar, q_power, qq, random_point
from .errors import YbeViolation
from .superlin import GradedMatrix, embed_pair, graded_permutation

PARITIES = (0, 1, 0)


def r_entries(uvar="u"):
    """The nine distinct entry functions, keyed by their conventional letters."""
    u = QScalar.var(uvar)
    q = qq(1)
    one = QScalar.const(1)
    da = u * q**2 - 1          # common denominator factor
    db = u * q + 1
    a = q * (u - 1) / da
    b = (q**2 - 1) / da
    c = -q_power(1) * (q**2 - 1) * (u - 1) / (da * db)
    d = q * (u - 1) * (u + q) / (da * db)
    e = a - u * (q**2 - 1) * (q + 1) / (da * db)
    f = u * (q**2 - 1) / da
    g = -q_power(1) * u * (q**2 - 1) * (u - 1) / (da * db)
    r = (q - 1) * (q + 1) ** 2 / (da * db)
    s = u**2 * (q - 1) * (q + 1) ** 2 / (da * db)
    return {"a": a, "b": b, "c": c, "d": d, "e": e,
            "f": f, "g": g, "r": r, "s": s, "one": one}


# sparsity layout: (row, col) -> entry letter, basis order
# (11,12,13,21,22,23,31,32,33) on indices 0..8
LAYOUT = {
    (0, 0): "one",
    (1, 1): "a", (1, 3): "b",
    (2, 2): "d", (2, 4): "c", (2, 6): "r",
    (3, 1): "f", (3, 3): "a",
    (4, 2): "g", (4, 4): "e", (4, 6): "c",
    (5, 5): "a", (5, 7): "b",
    (6, 2): "s", (6, 4): "g", (6, 6): "d",
    (7, 5): "f", (7, 7): "a",
    (8, 8): "one",
}

_TENSOR_PARITIES = tuple((x + y) % 2 for x in PARITIES for y in PARITIES)


def build_r(uvar="u") -> GradedMatrix:
    """The R-matrix as a 9x9 graded matrix over Q(s)(u)."""
    ent = r_entries(uvar)
    return GradedMatrix(_TENSOR_PARITIES,
                        {pos: ent[name] for pos, name in LAYOUT.items()})


def build_r_zw(zvar="z", wvar="w") -> GradedMatrix:
    """Same matrix with u replaced by z/w (degree-0 homogeneous form)."""
    ratio = Laurent.monomial(1, {zvar: 1, wvar: -1})
    return build_r().substitute("u", ratio)


def check_homogeneity(lam="lam") -> bool:
    """Scaling z -> lam*z, w -> lam*w leaves every entry unchanged."""
    rz = build_r_zw()
    scaled = rz.substitute("z", Laurent.monomial(1, {"z": 1, lam: 1}))
    scaled = scaled.substitute("w", Laurent.monomial(1, {"w": 1, lam: 1}))
    return scaled == rz


def r_at(u_value) -> GradedMatrix:
    """R with the ratio variable substituted (value: Laurent monomial/const)."""
    return build_r().substitute("u", u_value)


def ybe_residual(corrupt=None) -> GradedMatrix:
    """R12(z) R13(zw) R23(w) - R23(w) R13(zw) R12(z) on V (x) V (x) V,
    with the common scalar denominator cleared.

    Every entry of R(u) has denominator dividing (u q^2 - 1)(u q + 1), and
    both orderings of the triple product carry the same scalar factor
    d(z) d(zw) d(w), so the residual may be computed with denominator-free
    polynomial arithmetic.  It vanishes iff the rational residual does.

    ``corrupt`` optionally maps an entry letter to a multiplier, used by
    mutation tests to confirm the check has teeth.
    """
    def rm(u_mono):
        den = (QScalar(u_mono) * qq(2) - 1) * (QScalar(u_mono) * qq(1) + 1)
        m = build_r().substitute("u", u_mono).scale(den)
        if corrupt:
            ent = dict(m.entries)
            for pos, name in LAYOUT.items():
                if name in corrupt and pos in ent:
                    ent[pos] = ent[pos] * corrupt[name]
            m = GradedMatrix(_TENSOR_PARITIES, ent)
        return m

    r_z = rm(Laurent.var("z"))
    r_zw = rm(Laurent.monomial(1, {"z": 1, "w": 1}))
    r_w = rm(Laurent.var("w"))
    r12 = embed_pair(r_z, PARITIES, (1, 2))
    r13 = embed_pair(r_zw, PARITIES, (1, 3))
    r23 = embed_pair(r_w, PARITIES, (2, 3))
    return r12 * r13 * r23 - r23 * r13 * r12


def check_ybe_symbolic(corrupt=None):
    """Exact YBE check.  Returns None on success, raises YbeViolation."""
    res = ybe_residual(corrupt=corrupt)
    if not res.is_zero():
        (i, j), v = sorted(res.entries.items())[0]
        raise YbeViolation(f"YBE residual nonzero at ({i},{j}): {v!r}")


def check_ybe_random(trials=20, seed=0, corrupt=None):
    """Evaluate the YBE at random rational (z, w, s) points.

    Returns the list of points used; raises YbeViolation on any nonzero
    residual entry.
    """
    rng = _random.Random(seed)
    # denominators vanish when u*q**2 = 1 or u*q = -1 for u in {z, zw, w}
    guards = []
    for mono in ({"z": 1}, {"w": 1}, {"z": 1, "w": 1}):
        u = QScalar(Laurent.monomial(1, {**mono}))
        guards.append(u * qq(2) - 1)
        guards.append(u * qq(1) + 1)
    points = []
    for _ in range(trials):
        pt = random_point(["z", "w", "s"], rng, avoid=guards, bound=32)
        points.append(pt)
        res = _numeric_ybe_residual(pt, corrupt=corrupt)
        if res:
            (i, j), v = sorted(res.items())[0]
            raise YbeViolation(f"YBE residual nonzero at ({i},{j}) for {pt}: {v}")
    return points


def _numeric_ybe_residual(pt, corrupt=None):
    """Residual entries at a rational point, as {(i, j): rational}."""
    def rm(u_mono):
        m = build_r().substitute("u", u_mono)
        if corrupt:
            ent = dict(m.entries)
            for pos, name in LAYOUT.items():
                if name in corrupt and pos in ent:
                    ent[pos] = ent[pos] * corrupt[name]
            m = GradedMatrix(_TENSOR_PARITIES, ent)
        num = m.evaluate(pt)
        return GradedMatrix(_TENSOR_PARITIES, {k: QScalar.const(v) for k, v in num.items()})

    r12 = embed_pair(rm(Laurent.var("z")), PARITIES, (1, 2))
    r13 = embed_pair(rm(Laurent.monomial(1, {"z": 1, "w": 1})), PARITIES, (1, 3))
    r23 = embed_pair(rm(Laurent.var("w")), PARITIES, (2, 3))
    res = r12 * r13 * r23 - r23 * r13 * r12
    return {k: v.num.const_value() for k, v in res.entries.items()}


def special_points():
    """Structure facts: R(1) = P, pole locations, informational unitarity.

    Returns a dict of named boolean/structured results.
    """
    r1 = r_at(Laurent.const(1))
    perm = graded_permutation(PARITIES)
    ent = r_entries()
    poles = {}
    for name, v in ent.items():
        if name == "one":
            continue
        locs = []
        # denominator factors are (u q^2 - 1) and (u q + 1)
        for cand, tag in ((qq(-2), "q^-2"), (-qq(-1), "-q^-1")):
            if v.den.subst("u", cand.as_monomial()).is_zero():
                locs.append(tag)
        poles[name] = locs
    return {
        "r_at_one_is_permutation": r1 == perm,
        "poles": poles,
        "unitarity_scalar": _unitarity_info(),
    }


def _unitarity_info():
    """Whether R12(u) R21(1/u) is a scalar multiple of the identity."""
    r = build_r()
    p = graded_permutation(PARITIES)
    r21_inv_u = (p * build_r() * p).substitute(
        "u", Laurent.var("u", -1))
    prod = r * r21_inv_u
    diag = prod[(0, 0)]
    if diag.is_zero():
        return False
    scaled = prod - GradedMatrix.identity(_TENSOR_PARITIES).scale(diag)
    return scaled.is_zero()
