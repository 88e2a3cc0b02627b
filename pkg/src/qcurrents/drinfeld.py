"""Relation catalog for the twisted current superalgebra.

This module is representation-agnostic: every check takes operators that
support ``*`` (composition), ``+``/``-``, ``scale(QScalar)`` and
``is_zero()``, so the same catalog runs against exact 3x3 matrices, 9x9
tensor-product matrices, and bounded Fock-space operators.

Covered here:

* the Chevalley-Serre style presentation (Cartan matrix, K-conjugations,
  the {E, F} anticommutator),
* Hopf structure checks at the representation level (coproduct images,
  counit, antipode, graded anti-homomorphism consistency),
* the mode-form current relations for ``{H_n, X+-_n, K, c}``,
* the conversion formulas between the two presentations: Chevalley from
  modes, modes from Chevalley (recursive), psi-modes from H (exponential)
  and H from psi-modes (multinomial logarithm), plus the anticommutator
  shortcut for psi-modes,
* the rational prefactors of the current-form relations, shared by the
  series and distribution pipelines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

from .coeffcore import QScalar, q_minus_qinv, q_power, qint, qq
from .errors import NonCentralLevel, RelationViolation, WindowTooSmall
from .superlin import GradedMatrix, graded_kron

CARTAN = ((1, -1), (-1, 1))


def comm(a, b):
    return a * b - b * a


def acomm(a, b):
    return a * b + b * a


@dataclass
class RelationReport:
    rel: str
    params: tuple
    ok: bool
    witness: object = None

    def __str__(self):
        tag = "ok" if self.ok else "FAIL"
        return f"{self.rel}{self.params}: {tag}"


def assert_all_ok(reports):
    for r in reports:
        if not r.ok:
            raise RelationViolation(f"{r.rel}{r.params}: {r.witness!r}")
    return reports


def first_failure(reports):
    for r in reports:
        if not r.ok:
            return r
    return None


# ---------------------------------------------------------------------------
# Chevalley presentation
# ---------------------------------------------------------------------------

@dataclass
class ChevalleyRep:
    """The six generators with K-inverses and the representation identity."""
    E: tuple  # (E0, E1)
    F: tuple
    K: tuple
    Kinv: tuple
    one: object

    @classmethod
    def from_matrices(cls, E0, E1, F0, F1, K0, K1):
        return cls(E=(E0, E1), F=(F0, F1), K=(K0, K1),
                   Kinv=(K0.inverse(), K1.inverse()),
                   one=GradedMatrix.identity(K0.parities))


def check_chevalley(rep: ChevalleyRep):
    """The defining relations (q-Serre relations deliberately excluded)."""
    out = []
    qmq = q_minus_qinv()
    for i in range(2):
        r = rep.K[i] * rep.Kinv[i] - rep.one
        out.append(RelationReport("KKinv", (i,), r.is_zero(), r))
    for i in range(2):
        for j in range(2):
            r = comm(rep.K[i], rep.K[j])
            out.append(RelationReport("KK", (i, j), r.is_zero(), r))
            # K_j E_i K_j^-1 = q^{a_ij} E_i
            r = rep.K[j] * rep.E[i] * rep.Kinv[j] - rep.E[i].scale(qq(CARTAN[i][j]))
            out.append(RelationReport("KEK", (i, j), r.is_zero(), r))
            r = rep.K[j] * rep.F[i] * rep.Kinv[j] - rep.F[i].scale(qq(-CARTAN[i][j]))
            out.append(RelationReport("KFK", (i, j), r.is_zero(), r))
            # {E_i, F_j} = delta_ij (K_i - K_i^-1)/(q - q^-1)
            rhs = (rep.K[i] - rep.Kinv[i]).scale(qmq.invert()) if i == j else None
            r = acomm(rep.E[i], rep.F[j])
            if rhs is not None:
                r = r - rhs
            out.append(RelationReport("EF", (i, j), r.is_zero(), r))
    return out


# ---------------------------------------------------------------------------
# Hopf structure at the representation level
# ---------------------------------------------------------------------------

def _coproduct_terms(rep, kind, i):
    """Coproduct as a list of (label_left, op_left, label_right, op_right).

    Labels tag the abstract generator for counit evaluation:
    'E','F' -> 0 under the counit, 'K','Kinv','1' -> 1.
    """
    if kind == "E":
        return [("E", rep.E[i], "1", rep.one), ("K", rep.K[i], "E", rep.E[i])]
    if kind == "F":
        return [("F", rep.F[i], "Kinv", rep.Kinv[i]), ("1", rep.one, "F", rep.F[i])]
    if kind == "K":
        return [("K", rep.K[i], "K", rep.K[i])]
    raise ValueError(kind)


def antipode_image(rep, kind, i):
    """S(E_i) = -K_i^-1 E_i, S(F_i) = -F_i K_i, S(K_i) = K_i^-1."""
    if kind == "E":
        return (rep.Kinv[i] * rep.E[i]).scale(QScalar.const(-1))
    if kind == "F":
        return (rep.F[i] * rep.K[i]).scale(QScalar.const(-1))
    if kind == "K":
        return rep.Kinv[i]
    raise ValueError(kind)


_COUNIT = {"E": 0, "F": 0, "K": 1, "Kinv": 1, "1": 1}


def coproduct_rep(repx: ChevalleyRep, repw: ChevalleyRep) -> ChevalleyRep:
    """Chevalley generators acting on the graded tensor product."""
    def dg(kind, i):
        total = None
        for _, a, _, b in _coproduct_terms_pair(repx, repw, kind, i):
            t = graded_kron(a, b)
            total = t if total is None else total + t
        return total

    one = graded_kron(repx.one, repw.one)
    K0, K1 = dg("K", 0), dg("K", 1)
    return ChevalleyRep(E=(dg("E", 0), dg("E", 1)),
                        F=(dg("F", 0), dg("F", 1)),
                        K=(K0, K1),
                        Kinv=(K0.inverse(), K1.inverse()),
                        one=one)


def _coproduct_terms_pair(repx, repw, kind, i):
    left = _coproduct_terms(repx, kind, i)
    right = _coproduct_terms(repw, kind, i)
    return [(la, a, rb, b)
            for (la, a, _, _), (_, _, rb, b) in zip(left, right)]


def check_hopf(repx: ChevalleyRep, repw: ChevalleyRep):
    """Coproduct images satisfy the defining relations; counit and antipode
    axioms hold; the antipode behaves as a graded anti-homomorphism."""
    out = []
    tensor = coproduct_rep(repx, repw)
    for r in check_chevalley(tensor):
        out.append(RelationReport("Delta." + r.rel, r.params, r.ok, r.witness))

    # counit axiom (eps (x) id) Delta(g) = g, evaluated on the second factor
    for kind in ("E", "F", "K"):
        for i in range(2):
            total = None
            for la, _, _, b in _coproduct_terms_pair(repx, repw, kind, i):
                if _COUNIT[la] == 0:
                    continue
                total = b if total is None else total + b
            target = {"E": repw.E, "F": repw.F, "K": repw.K}[kind][i]
            r = (total - target) if total is not None else target
            out.append(RelationReport("counit", (kind, i), r.is_zero(), r))

    # antipode axiom: mult (S (x) id) Delta(g) = eps(g) 1 (single space)
    for kind in ("E", "F", "K"):
        for i in range(2):
            total = None
            for la, a, rb, b in _coproduct_terms(repx, kind, i):
                sa = _antipode_of_label(repx, la, i)
                t = sa * b
                total = t if total is None else total + t
            if _COUNIT[kind] == 1:
                total = total - repx.one
            out.append(RelationReport("antipode", (kind, i), total.is_zero(), total))

    # graded anti-homomorphism consistency: the S-images satisfy the
    # relations obtained by applying S to the defining ones, e.g.
    # {S(E_i), S(F_j)} = delta_ij (K_i - K_i^-1)/(q - q^-1)
    qmq = q_minus_qinv()
    for i in range(2):
        for j in range(2):
            se = antipode_image(repx, "E", i)
            sf = antipode_image(repx, "F", j)
            r = acomm(se, sf)
            if i == j:
                r = r - (repx.K[i] - repx.Kinv[i]).scale(qmq.invert())
            out.append(RelationReport("S.EF", (i, j), r.is_zero(), r))
            # S applied to the conjugation relation: the order swap and the
            # K inversions cancel, so K_j S(E_i) K_j^-1 = q^{a_ij} S(E_i)
            r = repx.K[j] * se * repx.Kinv[j] - se.scale(qq(CARTAN[i][j]))
            out.append(RelationReport("S.KEK", (i, j), r.is_zero(), r))
    return out


def _antipode_of_label(rep, label, i):
    if label == "E":
        return antipode_image(rep, "E", i)
    if label == "F":
        return antipode_image(rep, "F", i)
    if label == "K":
        return rep.Kinv[i]
    if label == "Kinv":
        return rep.K[i]
    if label == "1":
        return rep.one
    raise ValueError(label)


# ---------------------------------------------------------------------------
# mode representations
# ---------------------------------------------------------------------------

@dataclass
class ModeRep:
    """Drinfeld modes on a representation: level c, K, H_n, X+-_n windows."""
    level: int
    K: object
    Kinv: object
    H: dict          # n -> operator, 0 < |n| <= hwindow
    Xp: dict         # n -> operator, |n| <= xwindow
    Xm: dict
    one: object
    _psi_cache: dict = field(default_factory=dict, repr=False)

    @property
    def hwindow(self):
        return max((abs(n) for n in self.H), default=0)

    @property
    def xwindow(self):
        return max((abs(n) for n in self.Xp), default=0)

    def psi(self, window=None):
        window = self.hwindow if window is None else window
        if window not in self._psi_cache:
            if window > self.hwindow:
                raise WindowTooSmall(
                    f"psi window {window} exceeds H window {self.hwindow}")
            self._psi_cache[window] = psi_modes_from_h(self, window)
        return self._psi_cache[window]


def _exp_window(terms, one, window):
    """Coefficients e_0..e_window of exp(sum_k terms[k] t^k) for commuting
    operator coefficients (e_n = (1/n) sum k terms_k e_{n-k})."""
    e = {0: one}
    for n in range(1, window + 1):
        acc = None
        for k in range(1, n + 1):
            tk = terms.get(k)
            if tk is None:
                continue
            t = (tk * e[n - k]).scale(QScalar.const(k))
            acc = t if acc is None else acc + t
        if acc is None:
            e[n] = one.scale(QScalar.const(0))
        else:
            e[n] = acc.scale(QScalar.const(1) / QScalar.const(n))
    return e


def psi_modes_from_h(rep: ModeRep, window):
    """psi windows from the exponential form
    psi+-(z) = K^{+-1} exp(+-(q-q^-1) sum_{n>0} H_{+-n} z^{-+n})."""
    if window > rep.hwindow:
        raise WindowTooSmall(f"window {window} > H window {rep.hwindow}")
    qmq = q_minus_qinv()
    plus = _exp_window({n: rep.H[n].scale(qmq) for n in range(1, window + 1)},
                       rep.one, window)
    minus = _exp_window({n: rep.H[-n].scale(-qmq) for n in range(1, window + 1)},
                        rep.one, window)
    psip = {n: rep.K * plus[n] for n in range(0, window + 1)}
    psim = {-n: rep.Kinv * minus[n] for n in range(0, window + 1)}
    return psip, psim


def _partitions(n):
    """All multiplicity vectors {i: p_i} with sum i*p_i = n, n >= 1."""
    def rec(remaining, max_part):
        if remaining == 0:
            yield {}
            return
        for i in range(min(remaining, max_part), 0, -1):
            for cnt in range(remaining // i, 0, -1):
                for rest in rec(remaining - i * cnt, i - 1):
                    d = dict(rest)
                    d[i] = cnt
                    yield d
    yield from rec(n, n)


def h_from_psi(psip, psim, K, Kinv, window):
    """Multinomial logarithm: recover H_{+-n} from the psi windows."""
    qmq_inv = q_minus_qinv().invert()
    H = {}
    for sign in (1, -1):
        psi = psip if sign == 1 else psim
        kpow = Kinv if sign == 1 else K
        for n in range(1, window + 1):
            total = None
            for part in _partitions(n):
                sp = sum(part.values())
                coef = QScalar.const(((-1) ** (sp - 1)) * factorial(sp - 1))
                for p in part.values():
                    coef = coef / QScalar.const(factorial(p))
                term = None
                for i, p in sorted(part.items()):
                    base = kpow * psi[sign * i]
                    for _ in range(p):
                        term = base if term is None else term * base
                term = term.scale(coef)
                total = term if total is None else total + term
            H[sign * n] = total.scale(qmq_inv if sign == 1 else -qmq_inv)
    return H


def psi_via_anticommutator(rep: ModeRep, n, sign):
    """psi+-_{+-n} = +-(q-q^-1) q^{-+c(n-2)/2} {X+-_{+-n-+1}, X-+_{+-1}}."""
    if n < 1:
        raise ValueError("n >= 1 required")
    qmq = q_minus_qinv()
    if sign == 1:
        pref = qmq * q_power(-rep.level * (n - 2))
        return acomm(rep.Xp[n - 1], rep.Xm[1]).scale(pref)
    pref = qmq * q_power(rep.level * (n - 2))
    return acomm(rep.Xm[-n + 1], rep.Xp[-1]).scale(-pref)


# ---------------------------------------------------------------------------
# conversions between the presentations
# ---------------------------------------------------------------------------

def chevalley_from_drinfeld(rep: ModeRep) -> ChevalleyRep:
    """K1=K, E1=X+_0, F1=X-_0, K0=q^c K^-1, E0=X-_1 K^-1, F0=-K X+_{-1}."""
    if rep.xwindow < 1:
        raise WindowTooSmall("need X modes up to |n|=1")
    qc = qq(rep.level)
    K0 = rep.Kinv.scale(qc)
    return ChevalleyRep(
        E=(rep.Xm[1] * rep.Kinv, rep.Xp[0]),
        F=((rep.K * rep.Xp[-1]).scale(QScalar.const(-1)), rep.Xm[0]),
        K=(K0, rep.K),
        Kinv=(rep.K.scale(qc.invert()), rep.Kinv),
        one=rep.one)


def _matrix_scalar(m: GradedMatrix):
    """The scalar lambda with m = lambda * 1, or None."""
    n = m.dim
    lam = m[(0, 0)]
    for i in range(n):
        if m[(i, i)] != lam:
            return None
    if len(m.entries) != n:
        return None
    return lam


def level_from_chevalley(rep: ChevalleyRep) -> int:
    """c with K_0 K_1 = q^c (requires a scalar matrix that is a power of q)."""
    prod = rep.K[0] * rep.K[1]
    lam = _matrix_scalar(prod)
    if lam is None:
        raise NonCentralLevel("K_0 K_1 is not scalar")
    mono = lam.as_monomial()
    if mono is None:
        raise NonCentralLevel(f"K_0 K_1 = {lam!r} is not a power of q")
    if mono.is_const():
        if mono.const_value() != 1:
            raise NonCentralLevel(f"K_0 K_1 = {lam!r} is not a power of q")
        return 0
    coeff, exps = mono.monomial_parts()
    if coeff != 1 or set(exps) != {"s"} or exps["s"] % 2:
        raise NonCentralLevel(f"K_0 K_1 = {lam!r} is not an integer power of q")
    return exps["s"] // 2  # q^c = s^{2c}


def drinfeld_from_chevalley(rep: ChevalleyRep, window, xwindow=None) -> ModeRep:
    """Recursive reconstruction of the Drinfeld modes.

    H_{+-1} come from the anticommutator formulas, higher X modes from
    ad(H_{+-1}), and higher H modes from the anticommutator psi shortcut
    fed through the multinomial logarithm.
    """
    if window < 1:
        raise WindowTooSmall("window must be >= 1")
    xwindow = 2 * window if xwindow is None else xwindow
    c = level_from_chevalley(rep)
    K, Kinv = rep.K[1], rep.Kinv[1]
    Xp = {0: rep.E[1]}
    Xm = {0: rep.F[1]}
    Xm[1] = rep.E[0] * rep.K[1]
    Xp[-1] = (rep.Kinv[1] * rep.F[0]).scale(QScalar.const(-1))
    qc2 = q_power(c)      # q^{c/2}
    qmc2 = q_power(-c)
    H1 = (Kinv * acomm(Xp[0], Xm[1])).scale(qc2)
    Hm1 = (K * acomm(Xp[-1], Xm[0])).scale(qmc2)
    for n in range(0, xwindow):
        # X+-_{n+1} = -+ q^{+-c/2} [H_1, X+-_n]
        Xp[n + 1] = comm(H1, Xp[n]).scale(-qc2)
        Xm_next = comm(H1, Xm[n]).scale(qmc2)
        if n + 1 in Xm:
            # consistency between the seeded X-_1 and the recursion
            if not (Xm[n + 1] - Xm_next).is_zero():
                raise NonCentralLevel("recursion disagrees with seeded X-_1")
        else:
            Xm[n + 1] = Xm_next
        # X+-_{-n-1} = -+ q^{+-c/2} [H_{-1}, X+-_{-n}]
        if -(n + 1) not in Xp:
            Xp[-(n + 1)] = comm(Hm1, Xp[-n]).scale(-qc2)
        Xm[-(n + 1)] = comm(Hm1, Xm[-n]).scale(qmc2)

    partial = ModeRep(level=c, K=K, Kinv=Kinv, H={1: H1, -1: Hm1},
                      Xp=Xp, Xm=Xm, one=rep.one)
    psip = {0: K, 1: psi_via_anticommutator(partial, 1, 1)}
    psim = {0: Kinv, -1: psi_via_anticommutator(partial, 1, -1)}
    for n in range(2, window + 1):
        psip[n] = psi_via_anticommutator(partial, n, 1)
        psim[-n] = psi_via_anticommutator(partial, n, -1)
    H = h_from_psi(psip, psim, K, Kinv, window)
    return ModeRep(level=c, K=K, Kinv=Kinv, H=H, Xp=Xp, Xm=Xm, one=rep.one)


# ---------------------------------------------------------------------------
# mode relation catalog
# ---------------------------------------------------------------------------

def check_drinfeld_modes(rep: ModeRep, window):
    """Every mode relation instance with |n|, |m| <= window that the stored
    operator windows can express."""
    out = []
    c = rep.level
    qmq = q_minus_qinv()
    hw, xw = rep.hwindow, rep.xwindow
    if window > xw:
        raise WindowTooSmall(f"window {window} > X window {xw}")
    def spiral(lo, hi, with_zero):
        out = [0] if with_zero and lo <= 0 <= hi else []
        for k in range(1, max(abs(lo), abs(hi)) + 1):
            if k <= hi:
                out.append(k)
            if -k >= lo:
                out.append(-k)
        return out

    # small indices first, so the first reported failure is the canonical
    # lowest-order instance
    hbound = min(window, hw)
    hrange = spiral(-hbound, hbound, with_zero=False)
    xrange = spiral(-window, window, with_zero=True)

    r = rep.K * rep.Kinv - rep.one
    out.append(RelationReport("KKinv", (), r.is_zero(), r))

    for n in hrange:
        r = comm(rep.K, rep.H[n])
        out.append(RelationReport("KH", (n,), r.is_zero(), r))
    for n in xrange:
        for sgn, X in ((1, rep.Xp), (-1, rep.Xm)):
            r = rep.K * X[n] * rep.Kinv - X[n].scale(qq(sgn))
            out.append(RelationReport("KXK", (sgn, n), r.is_zero(), r))

    for n in hrange:
        for m in hrange:
            r = comm(rep.H[n], rep.H[m])
            if n + m == 0:
                coef = qint(n) * qint(n * c) * QScalar.const((-1) ** n) \
                    / QScalar.const(n)
                r = r - rep.one.scale(coef)
            out.append(RelationReport("HH", (n, m), r.is_zero(), r))

    for n in hrange:
        for m in xrange:
            for sgn, X in ((1, rep.Xp), (-1, rep.Xm)):
                if abs(n + m) > xw:
                    continue
                coef = QScalar.const(sgn * (-1) ** n) * qint(n) \
                    * q_power(-sgn * c * abs(n)) / QScalar.const(n)
                r = comm(rep.H[n], X[m]) - X[n + m].scale(coef)
                out.append(RelationReport("HX", (sgn, n, m), r.is_zero(), r))

    for sgn, X in ((1, rep.Xp), (-1, rep.Xm)):
        qs = qq(sgn)
        for n in range(-window, window):
            for m in range(n, window):  # symmetric in n <-> m
                if max(n + 1, m + 1) > window:
                    continue
                r = (X[n + 1] * X[m] + (X[m] * X[n + 1]).scale(qs)
                     + (X[n] * X[m + 1]).scale(qs) + X[m + 1] * X[n])
                out.append(RelationReport("XXquartic", (sgn, n, m), r.is_zero(), r))

    psip, psim = rep.psi(min(hw, 2 * window))
    for n in xrange:
        for m in xrange:
            k = n + m
            if abs(k) > min(hw, 2 * window):
                continue
            r = acomm(rep.Xp[n], rep.Xm[m])
            rhs = None
            if k >= 0:  # psi+_k = 0 for k < 0
                rhs = psip[k].scale(q_power(c * (n - m)))
            if k <= 0:  # psi-_k = 0 for k > 0
                t = psim[k].scale(-q_power(c * (m - n)))
                rhs = t if rhs is None else rhs + t
            r = r - rhs.scale(qmq.invert())
            out.append(RelationReport("XpXm", (n, m), r.is_zero(), r))
    return out


# ---------------------------------------------------------------------------
# current-form relation prefactors (shared by series and delta pipelines)
# ---------------------------------------------------------------------------

def current_prefactors(c, zvar="z", wvar="w"):
    """The rational coefficient functions of the current relations, with
    z_+- = z q^{+-c/2} substituted for the integer level ``c``.

    Returns a dict:
      psi_pm       : f with psi+(z) psi-(w) = f psi-(w) psi+(z)
      psi_xp[s]    : f with psi^s(z)^-1 X+(w) psi^s(z) = f X+(w), s in {+1,-1}
      psi_xm[s]    : f with psi^s(z) X-(w) psi^s(z)^-1 = f X-(w)
      xx_same[s]   : (f1, f2) with f1 X^s(z)X^s(w) + f2 X^s(w)X^s(z) = 0
    """
    z = QScalar.var(zvar)
    w = QScalar.var(wvar)
    q = qq(1)

    def zs(sign):
        return z * q_power(sign * c)

    def ws(sign):
        return w * q_power(sign * c)

    psi_pm = ((zs(1) * q + ws(-1)) * (zs(-1) + ws(1) * q)) / \
             ((zs(1) + ws(-1) * q) * (zs(-1) * q + ws(1)))
    psi_xp = {s: (zs(s) + w * q) / (zs(s) * q + w) for s in (1, -1)}
    psi_xm = {s: (zs(-s) + w * q) / (zs(-s) * q + w) for s in (1, -1)}
    xx_same = {1: (z + w * q, z * q + w),
               -1: (z + w * qq(-1), z * qq(-1) + w)}
    return {"psi_pm": psi_pm, "psi_xp": psi_xp, "psi_xm": psi_xm,
            "xx_same": xx_same}
