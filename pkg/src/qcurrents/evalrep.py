"""The level-zero 3x3 evaluation representation and its dual.

Both come with closed-form mode families m -> (H_m, X+_m, X-_m).  Each
family exists in two variants: ``as-printed`` (the source display) and
``corrected`` (the variant validated against the recursive reconstruction
from the Chevalley matrices; for the plain representation the difference
is the e22 coefficient of H_m, q^m vs q^-m).  Neither variant is silently
preferred — validate_proposition reports both, with a discrepancy table.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coeffcore import Laurent, QScalar, qint, qq
from .drinfeld import (
    ChevalleyRep,
    ModeRep,
    RelationReport,
    check_chevalley,
    check_drinfeld_modes,
    comm,
    drinfeld_from_chevalley,
    first_failure,
    q_power,
)
from .errors import MismatchReport
from .superlin import GradedMatrix

PAR3 = (0, 1, 0)

VARIANTS = ("as-printed", "corrected")


def _e(i, j, coeff=1):
    """Matrix unit with 1-based indices (e(1,2) is the top-middle unit)."""
    return GradedMatrix.unit(PAR3, i - 1, j - 1, coeff)


def _xpow(xvar, m):
    return QScalar(Laurent.monomial(1, {xvar: m}))


@dataclass
class EvaluationRep:
    """Chevalley matrices plus the closed-form mode families."""
    xvar: str
    dual: bool
    chevalley: ChevalleyRep

    # -- closed forms ------------------------------------------------------

    def h(self, m, variant="corrected"):
        if m == 0:
            raise ValueError("H_0 does not exist")
        x_m = _xpow(self.xvar, m)
        sgn = (-1) ** m
        pref = -qint(m) / QScalar.const(m)
        if not self.dual:
            c22 = 1 - QScalar.const(sgn) * (qq(m) if variant == "as-printed"
                                            else qq(-m))
            body = _e(1, 1, QScalar.const(-sgn) * qq(-m)) \
                + _e(2, 2, c22) + _e(3, 3)
            return body.scale(pref * x_m)
        # dual family: both variants carry the e22 coefficient that the
        # recursion validates; as-printed already agrees (see the report)
        c22 = 1 - QScalar.const(sgn) * qq(-m)
        body = _e(1, 1) + _e(2, 2, c22) + _e(3, 3, QScalar.const(-sgn) * qq(-m))
        return body.scale(pref * x_m * QScalar.const(sgn) * qq(-m))

    def xp(self, m):
        x_m = _xpow(self.xvar, m)
        sgn = (-1) ** m
        if not self.dual:
            return (_e(1, 2, QScalar.const(-sgn)) + _e(2, 3, qq(-m))
                    ).scale(-x_m)
        return (_e(2, 1, qq(-m - 1)) + _e(3, 2, QScalar.const(sgn))
                ).scale(-x_m * QScalar.const(sgn) * qq(-m))

    def xm(self, m):
        x_m = _xpow(self.xvar, m)
        sgn = (-1) ** m
        if not self.dual:
            return (_e(2, 1, QScalar.const(sgn)) + _e(3, 2, qq(-m))
                    ).scale(x_m)
        return (_e(1, 2, qq(-m + 1)) + _e(2, 3, QScalar.const(-sgn))
                ).scale(x_m * QScalar.const(sgn) * qq(-m))

    # -- assembled mode representation ------------------------------------

    def mode_rep(self, window, variant="corrected") -> ModeRep:
        """Closed forms packaged with X modes out to 2*window and H modes
        out to 2*window (so every anticommutator instance is expressible)."""
        w2 = 2 * window
        return ModeRep(
            level=0,
            K=self.chevalley.K[1], Kinv=self.chevalley.Kinv[1],
            H={n: self.h(n, variant) for n in range(-w2, w2 + 1) if n},
            Xp={n: self.xp(n) for n in range(-w2, w2 + 1)},
            Xm={n: self.xm(n) for n in range(-w2, w2 + 1)},
            one=self.chevalley.one)


def build_eval(xvar="x") -> EvaluationRep:
    q = qq(1)
    qi = qq(-1)
    x = _xpow(xvar, 1)
    xi = _xpow(xvar, -1)
    chev = ChevalleyRep.from_matrices(
        E0=(_e(2, 1, -1) + _e(3, 2)).scale(x * qi),
        E1=_e(1, 2) - _e(2, 3),
        F0=(_e(1, 2) + _e(2, 3)).scale(xi * q),
        F1=_e(2, 1) + _e(3, 2),
        K0=GradedMatrix.diag(PAR3, [qi, QScalar.const(1), q]),
        K1=GradedMatrix.diag(PAR3, [q, QScalar.const(1), qi]))
    return EvaluationRep(xvar=xvar, dual=False, chevalley=chev)


def build_dual(xvar="x") -> EvaluationRep:
    q = qq(1)
    qi = qq(-1)
    x = _xpow(xvar, 1)
    xi = _xpow(xvar, -1)
    chev = ChevalleyRep.from_matrices(
        E0=(_e(1, 2) + _e(2, 3, qi)).scale(-x * qi),
        E1=(_e(2, 1, qi) + _e(3, 2)).scale(QScalar.const(-1)),
        F0=(_e(2, 1, -1) + _e(3, 2, q)).scale(xi * q),
        F1=_e(1, 2, q) - _e(2, 3),
        K0=GradedMatrix.diag(PAR3, [q, QScalar.const(1), qi]),
        K1=GradedMatrix.diag(PAR3, [qi, QScalar.const(1), q]))
    return EvaluationRep(xvar=xvar, dual=True, chevalley=chev)


# ---------------------------------------------------------------------------
# validation against the recursion oracle
# ---------------------------------------------------------------------------

def closed_vs_recursion(rep: EvaluationRep, window, variant):
    """Mode-by-mode discrepancy table between the closed forms and the
    recursive reconstruction from the Chevalley matrices."""
    oracle = drinfeld_from_chevalley(rep.chevalley, window)
    table = []
    for n in range(-window, window + 1):
        if n:
            diff = rep.h(n, variant) - oracle.H[n]
            table.append(("H", n, diff.is_zero(), diff))
        diff = rep.xp(n) - oracle.Xp[n]
        table.append(("X+", n, diff.is_zero(), diff))
        diff = rep.xm(n) - oracle.Xm[n]
        table.append(("X-", n, diff.is_zero(), diff))
    return table


def induction_step(rep: EvaluationRep, window, variant):
    """The Proposition's induction pattern: the closed forms at m+1 equal
    the ad(H_{+-1}) recursion applied to the closed forms at m."""
    out = []
    h1 = rep.h(1, variant)
    hm1 = rep.h(-1, variant)
    for m in range(0, window):
        for sgn, xm in ((1, rep.xp), (-1, rep.xm)):
            # at level zero q^{+-c/2} = 1, so the step is -+ [H_{+-1}, .]
            step = comm(h1, xm(m)).scale(QScalar.const(-sgn))
            diff = xm(m + 1) - step
            out.append(RelationReport("induction+", (sgn, m), diff.is_zero(), diff))
            step = comm(hm1, xm(-m)).scale(QScalar.const(-sgn))
            diff = xm(-m - 1) - step
            out.append(RelationReport("induction-", (sgn, m), diff.is_zero(), diff))
    return out


def validate_proposition(rep: EvaluationRep, window):
    """Full report: Chevalley relations, both closed-form variants against
    the mode catalog, and the closed-forms-vs-recursion table."""
    report = {"chevalley": check_chevalley(rep.chevalley), "variants": {}}
    for variant in VARIANTS:
        mode = rep.mode_rep(window, variant)
        rels = check_drinfeld_modes(mode, window)
        table = closed_vs_recursion(rep, window, variant)
        report["variants"][variant] = {
            "mode_relations": rels,
            "first_failure": first_failure(rels),
            "recursion_table": table,
            "recursion_ok": all(ok for _, _, ok, _ in table),
            "induction": induction_step(rep, window, variant),
        }
    return report


# ---------------------------------------------------------------------------
# dual via the antipode
# ---------------------------------------------------------------------------

def dual_via_antipode(rep: EvaluationRep) -> ChevalleyRep:
    """pi*(a) = pi(S(a))^st applied to each Chevalley generator."""
    c = rep.chevalley

    def st(m):
        return m.supertranspose()

    E0 = st((c.Kinv[0] * c.E[0]).scale(QScalar.const(-1)))
    E1 = st((c.Kinv[1] * c.E[1]).scale(QScalar.const(-1)))
    F0 = st((c.F[0] * c.K[0]).scale(QScalar.const(-1)))
    F1 = st((c.F[1] * c.K[1]).scale(QScalar.const(-1)))
    K0 = st(c.Kinv[0])
    K1 = st(c.Kinv[1])
    return ChevalleyRep(E=(E0, E1), F=(F0, F1), K=(K0, K1),
                        Kinv=(K0.inverse(), K1.inverse()), one=c.one)


def compare_dual(rep: EvaluationRep, dual: EvaluationRep, raise_on_mismatch=False):
    """Entrywise comparison of the antipode-built dual with the printed one."""
    got = dual_via_antipode(rep)
    want = dual.chevalley
    mismatches = []
    for name, a, b in (("E0", got.E[0], want.E[0]), ("E1", got.E[1], want.E[1]),
                       ("F0", got.F[0], want.F[0]), ("F1", got.F[1], want.F[1]),
                       ("K0", got.K[0], want.K[0]), ("K1", got.K[1], want.K[1])):
        if a != b:
            mismatches.append((name, a - b))
    if mismatches and raise_on_mismatch:
        raise MismatchReport(f"dual mismatch on {[m[0] for m in mismatches]}")
    return mismatches
