"""Exact coefficient arithmetic.

Everything downstream works over the fraction field of sparse multivariate
Laurent polynomials with rational coefficients.  The base deformation
indeterminate is ``s`` with ``q = s**2``, so every half-integer power of q
that shows up in R-matrix entries and vertex-operator prefactors is an
integer power of s.

The module provides:

* :class:`Laurent` -- sparse multivariate Laurent polynomials,
* :class:`QScalar` -- elements of the fraction field, kept in a canonical
  form so that equality is a plain data comparison,
* :class:`TruncatedSeries` -- one-direction truncated expansions with a
  hard validity bound (reading past it raises, never silently yields 0),
* :class:`FormalDelta` -- finite sums of delta-distribution terms
  ``c * z**m * delta(a/z)``,
* :func:`series_expand` / :func:`boundary_difference` connecting them.

All values are immutable after construction; operations are pure.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import (
    BadDirection,
    DivisionByZero,
    HigherOrderPole,
    OrderExhausted,
    UnresolvedPole,
)

try:  # gmpy2 is optional but much faster for rational arithmetic
    from gmpy2 import mpq as QNum
except ImportError:  # pragma: no cover
    QNum = Fraction

_ZERO = QNum(0)
_ONE = QNum(1)


def qnum(a, b=None):
    """Exact rational from ints, Fraction, or another rational."""
    if b is not None:
        return QNum(a) / QNum(b)
    if isinstance(a, Fraction):
        return QNum(a.numerator) / QNum(a.denominator)
    return QNum(a)


# ---------------------------------------------------------------------------
# sparse multivariate Laurent polynomials
# ---------------------------------------------------------------------------

class Laurent:
    """Sparse Laurent polynomial: ordered variable tuple + exponent->coeff map.

    Variables are kept sorted and unused variables are pruned, so two equal
    polynomials always have identical ``(vars, terms)`` data.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars=(), terms=None, _clean=True):
        if terms is None:
            terms = {}
        if _clean:
            vars, terms = _clean_terms(tuple(vars), terms)
        self.vars = vars
        self.terms = terms

    # -- constructors ------------------------------------------------------

    @classmethod
    def const(cls, c):
        c = qnum(c)
        if c == 0:
            return cls((), {}, _clean=False)
        return cls((), {(): c}, _clean=False)

    @classmethod
    def var(cls, name, exp=1):
        if exp == 0:
            return cls.const(1)
        return cls((name,), {(exp,): _ONE}, _clean=False)

    @classmethod
    def monomial(cls, coeff, exps):
        """``coeff * prod(v**e for v, e in exps.items())``."""
        c = qnum(coeff)
        if c == 0:
            return cls.const(0)
        names = tuple(sorted(v for v, e in exps.items() if e != 0))
        key = tuple(exps[v] for v in names)
        return cls(names, {key: c}, _clean=False)

    # -- predicates --------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_const(self):
        return not self.vars

    def is_monomial(self):
        return len(self.terms) == 1

    def const_value(self):
        if self.vars:
            raise ValueError("not a constant")
        return self.terms.get((), _ZERO)

    def monomial_parts(self):
        """(coeff, {var: exp}) for a single-term polynomial."""
        if len(self.terms) != 1:
            raise ValueError("not a monomial")
        (exps, c), = self.terms.items()
        return c, dict(zip(self.vars, exps))

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = _as_laurent(other)
        vs, t1, t2 = _align(self, other)
        out = dict(t1)
        for k, c in t2.items():
            nc = out.get(k, _ZERO) + c
            if nc == 0:
                out.pop(k, None)
            else:
                out[k] = nc
        return Laurent(vs, out)

    __radd__ = __add__

    def __neg__(self):
        return Laurent(self.vars, {k: -c for k, c in self.terms.items()},
                       _clean=False)

    def __sub__(self, other):
        return self + (-_as_laurent(other))

    def __rsub__(self, other):
        return _as_laurent(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) or type(other) is type(_ONE):
            c = qnum(other)
            if c == 0:
                return Laurent((), {}, _clean=False)
            return Laurent(self.vars,
                           {k: v * c for k, v in self.terms.items()},
                           _clean=False)
        other = _as_laurent(other)
        vs, t1, t2 = _align(self, other)
        out = {}
        if len(t1) > len(t2):
            t1, t2 = t2, t1
        for k1, c1 in t1.items():
            for k2, c2 in t2.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                nc = out.get(k, _ZERO) + c1 * c2
                if nc == 0:
                    out.pop(k, None)
                else:
                    out[k] = nc
        return Laurent(vs, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n == 0:
            return Laurent.const(1)
        if n < 0:
            c, exps = self.monomial_parts()  # only monomials are invertible
            return Laurent.monomial(_ONE / c, {v: -e for v, e in exps.items()}) ** (-n)
        out = Laurent.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Laurent):
            other = _as_laurent(other)
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash(self.key())

    def key(self):
        return (self.vars, tuple(sorted((k, str(c)) for k, c in self.terms.items())))

    # -- structure ---------------------------------------------------------

    def degree(self, var):
        i = self._vi(var)
        if i is None or not self.terms:
            return 0
        return max(k[i] for k in self.terms)

    def valuation(self, var):
        i = self._vi(var)
        if i is None or not self.terms:
            return 0
        return min(k[i] for k in self.terms)

    def _vi(self, var):
        try:
            return self.vars.index(var)
        except ValueError:
            return None

    def coeff_of(self, var, exp):
        """Coefficient of var**exp, a Laurent in the remaining variables."""
        i = self._vi(var)
        if i is None:
            return self if exp == 0 else Laurent.const(0)
        rest = self.vars[:i] + self.vars[i + 1:]
        out = {}
        for k, c in self.terms.items():
            if k[i] == exp:
                out[k[:i] + k[i + 1:]] = c
        return Laurent(rest, out)

    def exponents_of(self, var):
        i = self._vi(var)
        if i is None:
            return {0} if self.terms else set()
        return {k[i] for k in self.terms}

    def monomial_split(self):
        """Factor into (monomial, polynomial) with the polynomial having
        valuation 0 in every variable."""
        if not self.terms:
            return Laurent.const(1), self
        mins = [min(k[i] for k in self.terms) for i in range(len(self.vars))]
        if not any(mins):
            return Laurent.const(1), self
        mono = Laurent.monomial(1, dict(zip(self.vars, mins)))
        terms = {tuple(a - b for a, b in zip(k, mins)): c
                 for k, c in self.terms.items()}
        return mono, Laurent(self.vars, terms)

    def least_term(self):
        """(exponent tuple, coeff) of the lexicographically least monomial."""
        k = min(self.terms)
        return k, self.terms[k]

    def derivative(self, var):
        i = self._vi(var)
        if i is None:
            return Laurent.const(0)
        out = {}
        for k, c in self.terms.items():
            if k[i] == 0:
                continue
            nk = k[:i] + (k[i] - 1,) + k[i + 1:]
            out[nk] = out.get(nk, _ZERO) + c * k[i]
        return Laurent(self.vars, out)

    def subst(self, var, value):
        """Substitute a Laurent value for a variable.

        Negative exponents of the substituted variable require the value to
        be a monomial.
        """
        i = self._vi(var)
        if i is None:
            return self
        value = _as_laurent(value)
        rest = self.vars[:i] + self.vars[i + 1:]
        powers = {}
        out = Laurent.const(0)
        for k, c in self.terms.items():
            e = k[i]
            if e not in powers:
                powers[e] = value ** e
            mono = Laurent(rest, {k[:i] + k[i + 1:]: c})
            out = out + mono * powers[e]
        return out

    def evaluate(self, point):
        """Evaluate at rational values given for every variable."""
        total = _ZERO
        for k, c in self.terms.items():
            v = c
            for name, e in zip(self.vars, k):
                b = qnum(point[name])
                if e < 0 and b == 0:
                    raise DivisionByZero(f"evaluating {name}**{e} at 0")
                v = v * b ** e
            total += v
        return total

    def scale_coeffs(self, c):
        c = qnum(c)
        if c == 0:
            return Laurent.const(0)
        return Laurent(self.vars, {k: v * c for k, v in self.terms.items()},
                       _clean=False)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for k in sorted(self.terms):
            c = self.terms[k]
            mono = "*".join(f"{v}^{e}" for v, e in zip(self.vars, k) if e)
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(bits)


def _as_laurent(x):
    if isinstance(x, Laurent):
        return x
    if isinstance(x, (int, Fraction)) or type(x) is type(_ONE):
        return Laurent.const(x)
    raise TypeError(f"cannot coerce {x!r} to Laurent")


def _clean_terms(vars, terms):
    terms = {k: v for k, v in terms.items() if v != 0}
    if not terms:
        return (), {}
    used = [i for i in range(len(vars)) if any(k[i] for k in terms)]
    if len(used) == len(vars) and all(vars[i] <= vars[i + 1] for i in range(len(vars) - 1)):
        return vars, terms
    new_vars = tuple(vars[i] for i in used)
    order = sorted(range(len(new_vars)), key=lambda j: new_vars[j])
    sorted_vars = tuple(new_vars[j] for j in order)
    out = {}
    for k, v in terms.items():
        kk = tuple(k[used[j]] for j in order)
        out[kk] = out.get(kk, _ZERO) + v
    return sorted_vars, {k: v for k, v in out.items() if v != 0}


def _align(a, b):
    if a.vars == b.vars:
        return a.vars, a.terms, b.terms
    vs = tuple(sorted(set(a.vars) | set(b.vars)))

    def remap(p):
        idx = [p.vars.index(v) if v in p.vars else None for v in vs]
        return {tuple(0 if i is None else k[i] for i in idx): c
                for k, c in p.terms.items()}

    return vs, remap(a), remap(b)


# ---------------------------------------------------------------------------
# multivariate polynomial gcd (recursive primitive PRS)
# ---------------------------------------------------------------------------
# Internal representation: a polynomial in n variables is a QNum for n == 0
# and otherwise a dict {exponent of var n-1: poly in n-1 variables}.

def _rec_from_terms(terms, n):
    if n == 0:
        return terms.get((), _ZERO)
    groups = {}
    for k, c in terms.items():
        groups.setdefault(k[-1], {})[k[:-1]] = c
    return {e: _rec_from_terms(sub, n - 1) for e, sub in groups.items()}


def _rec_to_terms(p, n):
    if n == 0:
        return {(): p} if p != 0 else {}
    out = {}
    for e, sub in p.items():
        for k, c in _rec_to_terms(sub, n - 1).items():
            out[k + (e,)] = c
    return out


def _r_is_zero(p, n):
    return (p == 0) if n == 0 else (not p)


def _r_add(p, q, n):
    if n == 0:
        return p + q
    out = dict(p)
    for e, c in q.items():
        if e in out:
            s = _r_add(out[e], c, n - 1)
            if _r_is_zero(s, n - 1):
                del out[e]
            else:
                out[e] = s
        else:
            out[e] = c
    return out


def _r_neg(p, n):
    if n == 0:
        return -p
    return {e: _r_neg(c, n - 1) for e, c in p.items()}


def _r_mul(p, q, n):
    if n == 0:
        return p * q
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = e1 + e2
            prod = _r_mul(c1, c2, n - 1)
            if e in out:
                s = _r_add(out[e], prod, n - 1)
                if _r_is_zero(s, n - 1):
                    del out[e]
                else:
                    out[e] = s
            elif not _r_is_zero(prod, n - 1):
                out[e] = prod
    return out


def _r_divexact(p, q, n):
    """Exact division p / q, or None when it does not divide."""
    if n == 0:
        if q == 0:
            return None
        return p / q
    if not p:
        return {}
    if not q:
        return None
    dq = max(q.keys())
    lq = q[dq]
    out = {}
    p = dict(p)
    while p:
        dp = max(p.keys())
        if dp < dq:
            return None
        c = _r_divexact(p[dp], lq, n - 1)
        if c is None:
            return None
        out[dp - dq] = c
        for e, qc in q.items():
            prod = _r_neg(_r_mul(qc, c, n - 1), n - 1)
            tgt = e + dp - dq
            cur = p.get(tgt)
            s = prod if cur is None else _r_add(cur, prod, n - 1)
            if _r_is_zero(s, n - 1):
                p.pop(tgt, None)
            else:
                p[tgt] = s
    return out


def _r_content(p, n):
    """gcd of the coefficients (polynomials in n-1 variables)."""
    g = None
    for c in p.values():
        g = c if g is None else _r_gcd(g, c, n - 1)
        if not _r_is_zero(g, n - 1) and n - 1 == 0:
            return _ONE  # field coefficients: content is a unit
    return g


def _r_primitive(p, n):
    c = _r_content(p, n)
    if n - 1 == 0:
        # normalize by the leading rational coefficient instead
        lead = p[max(p.keys())]
        return {e: v / lead for e, v in p.items()}, lead
    pp = {e: _r_divexact(v, c, n - 1) for e, v in p.items()}
    return pp, c


def _r_prem(f, g, n):
    """Pseudo-remainder of univariate-in-main-var polynomials."""
    df, dg = max(f.keys()), max(g.keys())
    lg = g[dg]
    while f and max(f.keys()) >= dg:
        dfc = max(f.keys())
        lf = f[dfc]
        # f := lg*f - lf * x^(df-dg) * g
        nf = {}
        for e, c in f.items():
            nf[e] = _r_mul(c, lg, n - 1)
        for e, c in g.items():
            tgt = e + dfc - dg
            prod = _r_neg(_r_mul(c, lf, n - 1), n - 1)
            cur = nf.get(tgt)
            s = prod if cur is None else _r_add(cur, prod, n - 1)
            if _r_is_zero(s, n - 1):
                nf.pop(tgt, None)
            else:
                nf[tgt] = s
        f = nf
    return f


def _uni_gcd_field(p, q):
    """Euclidean gcd for univariate polynomials over the rationals (dicts)."""
    while q:
        dq = max(q.keys())
        lq = q[dq]
        q = {e: c / lq for e, c in q.items()}
        r = dict(p)
        while r and max(r.keys()) >= dq:
            dr = max(r.keys())
            lr = r[dr]
            for e, c in q.items():
                tgt = e + dr - dq
                nc = r.get(tgt, _ZERO) - lr * c
                if nc == 0:
                    r.pop(tgt, None)
                else:
                    r[tgt] = nc
        p, q = q, r
    if not p:
        return {}
    dp = max(p.keys())
    lp = p[dp]
    return {e: c / lp for e, c in p.items()}


def _r_one(n):
    return _ONE if n == 0 else {0: _r_one(n - 1)}


def _r_gcd(p, q, n):
    if n == 0:
        if p == 0 and q == 0:
            return _ZERO
        return _ONE
    if not p:
        return q
    if not q:
        return p
    if p == q:
        return p
    if n == 1:
        return _uni_gcd_field(p, q)
    fp, cp = _r_primitive(p, n)
    fq, cq = _r_primitive(q, n)
    cg = _r_gcd(cp, cq, n - 1)
    f, g = (fp, fq) if max(fp) >= max(fq) else (fq, fp)
    # primitive pseudo-remainder sequence in the main variable
    while True:
        if max(g) == 0:
            g = {0: _r_one(n - 1)}  # primitive parts are coprime in main var
            break
        r = _r_prem(f, g, n)
        if not r:
            break
        f, g = g, _r_primitive(r, n)[0]
    return {e: _r_mul(c, cg, n - 1) for e, c in g.items()}


def poly_gcd(a: Laurent, b: Laurent) -> Laurent:
    """gcd of the polynomial parts (valuation-0) of two Laurent polynomials."""
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    vs, t1, t2 = _align(a, b)
    n = len(vs)
    if n == 0:
        return Laurent.const(1)
    g = _r_gcd(_rec_from_terms(t1, n), _rec_from_terms(t2, n), n)
    return Laurent(vs, _rec_to_terms(g, n))


def poly_divexact(a: Laurent, b: Laurent) -> Laurent:
    """Exact division of Laurent polynomials (raises on failure)."""
    if a.is_zero():
        return a
    mb, pb = b.monomial_split()
    ma, pa = a.monomial_split()
    vs, t1, t2 = _align(pa, pb)
    n = len(vs)
    if n == 0:
        q = Laurent.const(pa.const_value() / pb.const_value())
    else:
        r = _r_divexact(_rec_from_terms(t1, n), _rec_from_terms(t2, n), n)
        if r is None:
            raise ValueError("division is not exact")
        q = Laurent(vs, _rec_to_terms(r, n))
    return q * ma * mb ** -1


# ---------------------------------------------------------------------------
# the fraction field
# ---------------------------------------------------------------------------

class QScalar:
    """Element of the fraction field of Laurent polynomials, canonicalized.

    Canonical form: common polynomial gcd removed, all monomial content moved
    to the numerator, and the denominator scaled so its lexicographically
    least monomial has coefficient +1.  Equality is then a data comparison.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _reduced=False):
        num = _as_laurent(num)
        den = Laurent.const(1) if den is None else _as_laurent(den)
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if not _reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den

    # -- constructors ------------------------------------------------------

    @classmethod
    def const(cls, c):
        return cls(Laurent.const(c), _reduced=True)

    @classmethod
    def var(cls, name, exp=1):
        return cls(Laurent.var(name, exp), _reduced=True)

    @classmethod
    def monomial(cls, coeff, exps):
        return cls(Laurent.monomial(coeff, exps), _reduced=True)

    # -- predicates --------------------------------------------------------

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return (self.den.is_const() and self.num.is_const()
                and not self.num.is_zero()
                and self.num.const_value() == self.den.const_value())

    def is_monomial(self):
        return self.den.is_const() and self.num.is_monomial()

    def as_monomial(self):
        """The value as a Laurent monomial, or None."""
        if not self.den.is_const():
            return None
        if self.num.is_zero() or not self.num.is_monomial():
            return None
        return self.num.scale_coeffs(_ONE / self.den.const_value())

    def free_vars(self):
        return tuple(sorted(set(self.num.vars) | set(self.den.vars)))

    # -- field operations --------------------------------------------------

    def __add__(self, other):
        other = _as_qscalar(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return QScalar(self.num + other.num, self.den)
        return QScalar(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return QScalar(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-_as_qscalar(other))

    def __rsub__(self, other):
        return _as_qscalar(other) - self

    def __mul__(self, other):
        other = _as_qscalar(other)
        if self.is_zero() or other.is_zero():
            return QScalar.const(0)
        return QScalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_qscalar(other)
        return self * other.invert()

    def __rtruediv__(self, other):
        return _as_qscalar(other) / self

    def invert(self):
        if self.is_zero():
            raise DivisionByZero("inverting zero")
        return QScalar(self.den, self.num)

    def __pow__(self, n):
        if n < 0:
            return self.invert() ** (-n)
        out = QScalar.const(1)
        b = self
        while n:
            if n & 1:
                out = out * b
            b = b * b if n > 1 else b
            n >>= 1
        return out

    def __eq__(self, other):
        try:
            other = _as_qscalar(other)
        except TypeError:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash(self.key())

    def key(self):
        return (self.num.key(), self.den.key())

    # -- substitution / evaluation ----------------------------------------

    def substitute(self, var, value):
        """Substitute ``value`` (QScalar, Laurent, or rational) for ``var``."""
        if isinstance(value, QScalar):
            mono = value.as_monomial()
            if mono is not None:
                value = mono
            else:
                n = _eval_laurent_at_qscalar(self.num, var, value)
                d = _eval_laurent_at_qscalar(self.den, var, value)
                if d.is_zero():
                    raise DivisionByZero("substitution hits a pole")
                return n / d
        value = _as_laurent(value)
        n = self.num.subst(var, value)
        d = self.den.subst(var, value)
        if d.is_zero():
            raise DivisionByZero("substitution hits a pole")
        return QScalar(n, d)

    def evaluate(self, point):
        d = self.den.evaluate(point)
        if d == 0:
            raise DivisionByZero("evaluation hits a pole")
        return self.num.evaluate(point) / d

    def __repr__(self):
        if self.den.is_const() and self.den.const_value() == 1:
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


def _as_qscalar(x):
    if isinstance(x, QScalar):
        return x
    if isinstance(x, Laurent):
        return QScalar(x, _reduced=True)
    if isinstance(x, (int, Fraction)) or type(x) is type(_ONE):
        return QScalar.const(x)
    raise TypeError(f"cannot coerce {x!r} to QScalar")


def _eval_laurent_at_qscalar(p: Laurent, var, value: QScalar) -> QScalar:
    i = p._vi(var)
    if i is None:
        return QScalar(p, _reduced=True)
    powers = {}
    total = QScalar.const(0)
    rest = p.vars[:i] + p.vars[i + 1:]
    for k, c in p.terms.items():
        e = k[i]
        if e not in powers:
            powers[e] = value ** e
        total = total + powers[e] * Laurent(rest, {k[:i] + k[i + 1:]: c})
    return total


def _reduce(num: Laurent, den: Laurent):
    if num.is_zero():
        return num, Laurent.const(1)
    mn, pn = num.monomial_split()
    md, pd = den.monomial_split()
    mono = mn * md ** -1
    if pd.is_const():
        c = pd.const_value()
        return pn * mono.scale_coeffs(_ONE / c), Laurent.const(1)
    if pn == pd:
        return mono, Laurent.const(1)
    if not pn.is_const():
        g = poly_gcd(pn, pd)
        if not g.is_const():
            pn = poly_divexact(pn, g)
            pd = poly_divexact(pd, g)
    if pd.is_const():
        c = pd.const_value()
        return pn * mono.scale_coeffs(_ONE / c), Laurent.const(1)
    _, lc = pd.least_term()
    inv = _ONE / lc
    return (pn * mono).scale_coeffs(inv), pd.scale_coeffs(inv)


# ---------------------------------------------------------------------------
# standard symbols and q-arithmetic
# ---------------------------------------------------------------------------

S = QScalar.var("s")


def q_power(k):
    """q**(k/2) expressed as an integer power of s (k counts half-powers of q... )

    Here ``q_power(k) == q**(k/2) == s**k``.
    """
    return QScalar.var("s", k)


def qq(exp=1):
    """q**exp as a QScalar (q = s**2)."""
    return QScalar.var("s", 2 * exp)


def qint(n):
    """The symmetric q-integer (q**n - q**-n)/(q - q**-1)."""
    num = Laurent.var("s", 2 * n) - Laurent.var("s", -2 * n)
    den = Laurent.var("s", 2) - Laurent.var("s", -2)
    return QScalar(num, den)


def q_minus_qinv():
    return qq(1) - qq(-1)


# ---------------------------------------------------------------------------
# truncated one-direction series
# ---------------------------------------------------------------------------

AROUND_ZERO = "around-zero"
AROUND_INFINITY = "around-infinity"


class TruncatedSeries:
    """Truncated expansion of a function of one variable.

    Internally the series lives in ``t`` where ``t = var`` for expansions
    around zero and ``t = 1/var`` for expansions around infinity; ``coeffs``
    maps powers of t to QScalars in the remaining variables.  ``valid``
    is the largest t-power whose coefficient is known; asking beyond it
    raises :class:`OrderExhausted`.
    """

    __slots__ = ("var", "direction", "coeffs", "low", "valid")

    def __init__(self, var, direction, coeffs, low, valid):
        self.var = var
        self.direction = direction
        self.coeffs = {k: c for k, c in coeffs.items() if not c.is_zero()}
        self.low = low
        self.valid = valid

    def coeff(self, k):
        """Coefficient of t**k (t as described in the class docstring)."""
        if k > self.valid:
            raise OrderExhausted(f"series only valid through order {self.valid}")
        return self.coeffs.get(k, QScalar.const(0))

    def var_coeff(self, e):
        """Coefficient of var**e."""
        k = e if self.direction == AROUND_ZERO else -e
        return self.coeff(k)

    def _check(self, other):
        if self.var != other.var or self.direction != other.direction:
            raise ValueError("incompatible series")

    def __add__(self, other):
        self._check(other)
        valid = min(self.valid, other.valid)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, QScalar.const(0)) + c
        out = {k: c for k, c in out.items() if k <= valid}
        return TruncatedSeries(self.var, self.direction, out,
                               min(self.low, other.low), valid)

    def __neg__(self):
        return TruncatedSeries(self.var, self.direction,
                               {k: -c for k, c in self.coeffs.items()},
                               self.low, self.valid)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            valid = min(self.valid + other.low, other.valid + self.low)
            out = {}
            for k1, c1 in self.coeffs.items():
                for k2, c2 in other.coeffs.items():
                    k = k1 + k2
                    if k > valid:
                        continue
                    out[k] = out.get(k, QScalar.const(0)) + c1 * c2
            return TruncatedSeries(self.var, self.direction, out,
                                   self.low + other.low, valid)
        other = _as_qscalar(other)
        return TruncatedSeries(self.var, self.direction,
                               {k: c * other for k, c in self.coeffs.items()},
                               self.low, self.valid)

    __rmul__ = __mul__

    def shift(self, e):
        """Multiply by t**e."""
        return TruncatedSeries(self.var, self.direction,
                               {k + e: c for k, c in self.coeffs.items()},
                               self.low + e, self.valid + e)

    def same_through(self, other, order=None):
        """Equality of coefficients through the common validity bound."""
        self._check(other)
        valid = min(self.valid, other.valid)
        if order is not None:
            valid = min(valid, order)
        lo = min(self.low, other.low)
        for k in range(lo, valid + 1):
            if self.coeff(k) != other.coeff(k):
                return False
        return True

    def is_zero_through(self, order=None):
        valid = self.valid if order is None else min(self.valid, order)
        return all(k > valid or c.is_zero() for k, c in self.coeffs.items())

    def exp(self, order=None):
        """exp of a series with strictly positive valuation."""
        valid = self.valid if order is None else min(self.valid, order)
        if any(k <= 0 and not c.is_zero() for k, c in self.coeffs.items()):
            raise ValueError("exp needs positive valuation")
        e = {0: QScalar.const(1)}
        for n in range(1, valid + 1):
            acc = QScalar.const(0)
            for k in range(1, n + 1):
                sk = self.coeffs.get(k)
                if sk is None:
                    continue
                ek = e.get(n - k)
                if ek is None:
                    continue
                acc = acc + QScalar.const(k) * sk * ek
            if not acc.is_zero():
                e[n] = acc / QScalar.const(n)
        return TruncatedSeries(self.var, self.direction, e, 0, valid)

    def __repr__(self):
        t = self.var if self.direction == AROUND_ZERO else f"{self.var}^-1"
        bits = [f"({self.coeffs[k]!r})*{t}^{k}" for k in sorted(self.coeffs)]
        body = " + ".join(bits) or "0"
        return body + f"  (valid through {self.valid})"


def series_expand(f: QScalar, var, direction, order) -> TruncatedSeries:
    """Geometric-series expansion of a rational function in one variable.

    ``order`` counts coefficients past the leading one: the result knows
    its coefficients for t-powers ``low .. low+order``.
    """
    if direction not in (AROUND_ZERO, AROUND_INFINITY):
        raise BadDirection(f"unknown direction {direction!r}")
    if f.is_zero():
        return TruncatedSeries(var, direction, {}, 0, order)
    sign = 1 if direction == AROUND_ZERO else -1

    def poly_coeffs(p):
        return {sign * e: QScalar(p.coeff_of(var, e), _reduced=True)
                for e in p.exponents_of(var)}

    num = poly_coeffs(f.num)
    den = poly_coeffs(f.den)
    if not den:
        raise BadDirection("denominator vanishes")
    d0e = min(den)
    d0 = den[d0e]
    if d0.is_zero():
        raise BadDirection("extreme denominator coefficient vanishes")
    n0e = min(num)
    low = n0e - d0e
    out = {}
    for k in range(order + 1):
        acc = num.get(n0e + k, QScalar.const(0))
        for j in range(1, k + 1):
            dj = den.get(d0e + j)
            bj = out.get(low + k - j)
            if dj is None or bj is None:
                continue
            acc = acc - dj * bj
        c = acc / d0
        if not c.is_zero():
            out[low + k] = c
    return TruncatedSeries(var, direction, out, low, low + order)


# ---------------------------------------------------------------------------
# formal delta distributions
# ---------------------------------------------------------------------------

def _coeff_is_zero(c):
    return c.is_zero()


def _coeff_scale(c, f):
    if hasattr(c, "scale"):
        return c.scale(f)
    return c * f


class FormalDelta:
    """Finite sum of terms ``c * delta(a/z)`` for monomial supports ``a``.

    A term ``c * z**m * delta(a/z)`` is stored with the power absorbed into
    the coefficient via the substitution property ``z**m delta(a/z) =
    a**m delta(a/z)``.  Coefficients may be QScalars or any object with
    ``scale`` / ``__add__`` / ``is_zero`` (e.g. graded matrices).
    """

    __slots__ = ("var", "terms")

    def __init__(self, var, terms=None):
        self.var = var
        self.terms = {}
        if terms:
            for support, coeff in (terms.items() if isinstance(terms, dict) else terms):
                self._accum(support, coeff)

    def _accum(self, support, coeff):
        if _coeff_is_zero(coeff):
            return
        key = support.key()
        if key in self.terms:
            old_s, old_c = self.terms[key]
            nc = old_c + coeff
            if _coeff_is_zero(nc):
                del self.terms[key]
            else:
                self.terms[key] = (old_s, nc)
        else:
            self.terms[key] = (support, coeff)

    @classmethod
    def term(cls, var, support: Laurent, coeff, power=0):
        """``coeff * var**power * delta(support/var)``."""
        if power:
            coeff = _coeff_scale(coeff, QScalar(support, _reduced=True) ** power)
        return cls(var, [(support, coeff)])

    @classmethod
    def zero(cls, var):
        return cls(var)

    def is_zero(self):
        return not self.terms

    def items(self):
        return list(self.terms.values())

    def __add__(self, other):
        if other.var != self.var:
            raise ValueError("mismatched delta variables")
        out = FormalDelta(self.var)
        for s, c in self.terms.values():
            out._accum(s, c)
        for s, c in other.terms.values():
            out._accum(s, c)
        return out

    def __neg__(self):
        return FormalDelta(self.var,
                           [(s, _coeff_scale(c, QScalar.const(-1)))
                            for s, c in self.terms.values()])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f: QScalar):
        return FormalDelta(self.var,
                           [(s, _coeff_scale(c, f)) for s, c in self.terms.values()])

    def mul_rational(self, f: QScalar):
        """Multiply by a rational function of the delta variable, reducing
        via ``f(z) delta(a/z) = f(a) delta(a/z)`` (exact)."""
        out = FormalDelta(self.var)
        for s, c in self.terms.values():
            fs = f.substitute(self.var, s)
            out._accum(s, _coeff_scale(c, fs))
        return out

    def compose_argument(self, scale_mono: Laurent):
        """Reinterpret D(z) as D(c*z): a term supported at ``c*z = a``
        becomes a term supported at ``z = a/c``."""
        inv = scale_mono ** -1
        return FormalDelta(self.var,
                           [(s * inv, c) for s, c in self.terms.values()])

    def mode(self, n, shift=1, zero=None):
        """Coefficient of var**(-n-shift): for a current
        ``X(z) = sum_n X_n z**(-n-1)`` use shift=1.

        Since ``delta(a/z) = sum_m (a/z)**m``, the coefficient of
        ``z**(-n-shift)`` in ``c*delta(a/z)`` is ``c * a**(n+shift)``.
        """
        total = zero
        for s, c in self.terms.values():
            term = _coeff_scale(c, QScalar(s, _reduced=True) ** (n + shift))
            total = term if total is None else total + term
        return total

    def supports(self):
        return [s for s, _ in self.terms.values()]

    def __eq__(self, other):
        return isinstance(other, FormalDelta) and (self - other).is_zero()

    def __repr__(self):
        bits = [f"({c!r})*delta(({s!r})/{self.var})"
                for s, c in self.terms.values()]
        return " + ".join(bits) or "0"


def _uni_poly(f_part: Laurent, var):
    """Laurent polynomial viewed as {exp: QScalar coefficient} in one var."""
    return {e: QScalar(f_part.coeff_of(var, e), _reduced=True)
            for e in f_part.exponents_of(var)}


def _uni_gcd_qscalar(p, q):
    """Monic Euclid over the QScalar field for {exp: QScalar} dicts."""
    p = {e: c for e, c in p.items() if not c.is_zero()}
    q = {e: c for e, c in q.items() if not c.is_zero()}
    while q:
        dq = max(q)
        lq = q[dq]
        q = {e: c / lq for e, c in q.items()}
        r = dict(p)
        while r and max(r) >= dq:
            dr = max(r)
            lr = r.pop(dr)
            for e, c in q.items():
                if e == dq:
                    continue
                tgt = e + dr - dq
                nc = r.get(tgt, QScalar.const(0)) - lr * c
                if nc.is_zero():
                    r.pop(tgt, None)
                else:
                    r[tgt] = nc
        p, q = q, r
    return p


def _uni_eval(poly, value: QScalar):
    total = QScalar.const(0)
    powers = {}
    for e, c in poly.items():
        if e not in powers:
            powers[e] = value ** e
        total = total + c * powers[e]
    return total


def default_pole_candidates(f: QScalar, var, s_range=8):
    """Monomial candidates for pole locations: ``+-v*s**k`` and ``+-s**k``
    over the other variables v appearing in f."""
    others = [v for v in f.free_vars() if v not in (var, "s")]
    out = []
    for sign in (1, -1):
        for k in range(-s_range, s_range + 1):
            for v in others:
                out.append(Laurent.monomial(sign, {v: 1, "s": k}))
            out.append(Laurent.monomial(sign, {"s": k}))
    return out


def boundary_difference(f: QScalar, var, candidates=None) -> FormalDelta:
    """(expansion around infinity) - (expansion around zero) of a rational
    function with simple poles, as an exact FormalDelta.

    Each simple pole z = a contributes ``residue(a) * z**-1 * delta(a/z)``.
    Poles must be at Laurent-monomial locations; beyond linear denominators
    they are located by testing monomial candidates.
    """
    work = f
    out = FormalDelta(var)
    zvar = QScalar.var(var)
    guard = 0
    while True:
        guard += 1
        if guard > 64:
            raise UnresolvedPole("pole elimination did not terminate")
        den = work.den
        if var not in den.vars:
            return out
        dpoly = _uni_poly(den, var)
        # shift away negative exponents (harmless: z**k units)
        shift = -min(dpoly)
        if shift > 0:
            dpoly = {e + shift: c for e, c in dpoly.items()}
        deriv = {e - 1: c * QScalar.const(e) for e, c in dpoly.items() if e != 0}
        g = _uni_gcd_qscalar(dpoly, deriv)
        if g and max(g) > 0:
            raise HigherOrderPole(f"denominator not square-free in {var}")
        deg = max(dpoly) - min(dpoly)
        if deg == 1:
            e1, e0 = max(dpoly), min(dpoly)
            root = -(dpoly[e0] / dpoly[e1])
            mono = root.as_monomial()
            if mono is None:
                raise UnresolvedPole(f"pole at non-monomial point {root!r}")
        else:
            if candidates is None:
                candidates = default_pole_candidates(f, var)
            mono = None
            for cand in candidates:
                val = _uni_eval(dpoly, QScalar(cand, _reduced=True))
                if val.is_zero():
                    mono = cand
                    break
            if mono is None:
                raise UnresolvedPole(
                    f"no monomial candidate matches a pole of degree-{deg} "
                    f"denominator in {var}")
        root_q = QScalar(mono, _reduced=True)
        num_at = _eval_laurent_at_qscalar(work.num, var, root_q)
        dden = work.den.derivative(var)
        dden_at = _eval_laurent_at_qscalar(dden, var, root_q)
        residue = num_at / dden_at
        out = out + FormalDelta.term(var, mono, residue * root_q ** -1)
        work = work - residue / (zvar - root_q)


# ---------------------------------------------------------------------------
# randomized evaluation support
# ---------------------------------------------------------------------------

def random_rational(rng: random.Random, bound=64):
    """Small nonzero rational with |numerator|, denominator <= bound."""
    while True:
        n = rng.randint(-bound, bound)
        if n != 0:
            break
    d = rng.randint(1, bound)
    return Fraction(n, d)


def random_point(names, rng: random.Random, avoid=(), bound=64):
    """Random rational values for each name, retrying while any QScalar in
    ``avoid`` has a vanishing denominator (or numerator) at the point."""
    for _ in range(1000):
        point = {v: random_rational(rng, bound) for v in names}
        ok = True
        for f in avoid:
            try:
                d = f.den.evaluate(point)
                n = f.num.evaluate(point)
            except DivisionByZero:
                ok = False
                break
            if d == 0 or n == 0:
                ok = False
                break
        if ok:
            return point
    raise RuntimeError("could not find an admissible random point")
