"""Z2-graded linear algebra over the exact scalar field.

A graded space is a parity vector; a graded matrix is a square sparse
matrix tagged with that vector.  The graded tensor product carries the
Koszul sign ``(a (x) b)(a' (x) b') = (-1)^{[b][a']} aa' (x) bb'``, which at
the level of matrix units means

    (A (x) B)_{(i,k),(j,l)} = (-1)^{([k]+[l]) [j]} A_{ij} B_{kl}.

Embeddings into triple tensor products are built by conjugating with
graded permutations rather than by ad-hoc sign formulas, so a single
sign convention drives everything.
"""

from __future__ import annotations

from .coeffcore import QScalar, qnum
from .errors import MixedParity, Singular

_Q0 = QScalar.const(0)
_Q1 = QScalar.const(1)


def _as_scalar(x):
    if isinstance(x, QScalar):
        return x
    return QScalar.const(qnum(x))


class GradedMatrix:
    """Square sparse matrix over QScalar with a parity vector on the space."""

    __slots__ = ("parities", "entries")

    def __init__(self, parities, entries=None):
        self.parities = tuple(parities)
        self.entries = {}
        if entries:
            for (i, j), v in entries.items():
                v = _as_scalar(v)
                if not v.is_zero():
                    self.entries[(i, j)] = v

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, parities):
        return cls(parities)

    @classmethod
    def identity(cls, parities):
        return cls(parities, {(i, i): _Q1 for i in range(len(parities))})

    @classmethod
    def unit(cls, parities, i, j, coeff=1):
        """Matrix unit e_ij times a coefficient."""
        return cls(parities, {(i, j): coeff})

    @classmethod
    def diag(cls, parities, values):
        return cls(parities, {(i, i): v for i, v in enumerate(values)})

    @classmethod
    def from_rows(cls, parities, rows):
        return cls(parities, {(i, j): v
                              for i, row in enumerate(rows)
                              for j, v in enumerate(row)})

    # -- basic queries -----------------------------------------------------

    @property
    def dim(self):
        return len(self.parities)

    def __getitem__(self, ij):
        return self.entries.get(ij, _Q0)

    def is_zero(self):
        return not self.entries

    def is_identity(self):
        return self == GradedMatrix.identity(self.parities)

    def parity(self):
        """Operator parity if homogeneous (0 for the zero matrix)."""
        ps = {(self.parities[i] + self.parities[j]) % 2
              for (i, j) in self.entries}
        if not ps:
            return 0
        if len(ps) > 1:
            raise MixedParity("matrix is not parity-homogeneous")
        return ps.pop()

    def rows(self):
        n = self.dim
        return [[self[(i, j)] for j in range(n)] for i in range(n)]

    # -- arithmetic --------------------------------------------------------

    def _check(self, other):
        if self.parities != other.parities:
            raise ValueError("graded spaces differ")

    def __add__(self, other):
        self._check(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            nv = out.get(k, _Q0) + v
            if nv.is_zero():
                out.pop(k, None)
            else:
                out[k] = nv
        return GradedMatrix(self.parities, out)

    def __neg__(self):
        return GradedMatrix(self.parities,
                            {k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = _as_scalar(c)
        if c.is_zero():
            return GradedMatrix(self.parities)
        return GradedMatrix(self.parities,
                            {k: v * c for k, v in self.entries.items()})

    def __mul__(self, other):
        if isinstance(other, GradedMatrix):
            self._check(other)
            cols = {}
            for (k, j), v in other.entries.items():
                cols.setdefault(k, []).append((j, v))
            out = {}
            for (i, k), a in self.entries.items():
                for j, b in cols.get(k, ()):
                    key = (i, j)
                    nv = out.get(key, _Q0) + a * b
                    if nv.is_zero():
                        out.pop(key, None)
                    else:
                        out[key] = nv
            return GradedMatrix(self.parities, out)
        return self.scale(other)

    __rmul__ = scale

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = GradedMatrix.identity(self.parities)
        b = self
        while n:
            if n & 1:
                out = out * b
            b = b * b if n > 1 else b
            n >>= 1
        return out

    def __eq__(self, other):
        return (isinstance(other, GradedMatrix)
                and self.parities == other.parities
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.parities,
                     tuple(sorted((k, v.key()) for k, v in self.entries.items()))))

    # -- graded structure --------------------------------------------------

    def supertranspose(self):
        """(A^st)_{ji} = (-1)^{[i]([i]+[j])} A_{ij}."""
        p = self.parities
        out = {}
        for (i, j), v in self.entries.items():
            sign = -1 if p[i] * ((p[i] + p[j]) % 2) % 2 else 1
            out[(j, i)] = v if sign == 1 else -v
        return GradedMatrix(p, out)

    def supertrace(self):
        total = _Q0
        for (i, j), v in self.entries.items():
            if i == j:
                total = total + (-v if self.parities[i] else v)
        return total

    # -- elementwise maps --------------------------------------------------

    def map_entries(self, f):
        return GradedMatrix(self.parities,
                            {k: f(v) for k, v in self.entries.items()})

    def substitute(self, var, value):
        return self.map_entries(lambda v: v.substitute(var, value))

    def evaluate(self, point):
        """Numeric matrix (dict of rationals) at a rational point."""
        return {k: v.evaluate(point) for k, v in self.entries.items()}

    # -- inversion ---------------------------------------------------------

    def inverse(self):
        """Exact inverse by Gaussian elimination (raises Singular)."""
        n = self.dim
        aug = [[self[(i, j)] for j in range(n)]
               + [_Q1 if i == j else _Q0 for j in range(n)]
               for i in range(n)]
        for col in range(n):
            # prefer structurally simple pivots to keep gcds cheap
            pivot = None
            best = None
            for r in range(col, n):
                v = aug[r][col]
                if v.is_zero():
                    continue
                cost = (0 if v.is_one() else
                        1 if v.as_monomial() is not None else
                        2 + len(v.num.terms) + len(v.den.terms))
                if best is None or cost < best:
                    best, pivot = cost, r
                if cost == 0:
                    break
            if pivot is None:
                raise Singular("matrix is not invertible")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            pv = aug[col][col]
            if not pv.is_one():
                inv = pv.invert()
                aug[col] = [x * inv for x in aug[col]]
            for r in range(n):
                if r == col:
                    continue
                f = aug[r][col]
                if f.is_zero():
                    continue
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
        return GradedMatrix(self.parities,
                            {(i, j): aug[i][n + j]
                             for i in range(n) for j in range(n)})

    def __repr__(self):
        n = self.dim
        lines = []
        for i in range(n):
            lines.append("[" + ", ".join(repr(self[(i, j)]) for j in range(n)) + "]")
        return "GradedMatrix(\n " + "\n ".join(lines) + "\n)"


# ---------------------------------------------------------------------------
# graded tensor calculus
# ---------------------------------------------------------------------------

def tensor_parities(pa, pb):
    return tuple((x + y) % 2 for x in pa for y in pb)


def graded_kron(a: GradedMatrix, b: GradedMatrix) -> GradedMatrix:
    """Graded tensor product with the Koszul sign on the column index."""
    pa, pb = a.parities, b.parities
    nb = len(pb)
    out = {}
    for (i, j), va in a.entries.items():
        sj = pa[j]
        for (k, l), vb in b.entries.items():
            sign = -1 if ((pb[k] + pb[l]) * sj) % 2 else 1
            v = va * vb
            out[(i * nb + k, j * nb + l)] = v if sign == 1 else -v
    return GradedMatrix(tensor_parities(pa, pb), out)


def graded_permutation(parities) -> GradedMatrix:
    """P(v (x) w) = (-1)^{[v][w]} w (x) v on V (x) V."""
    n = len(parities)
    out = {}
    for j in range(n):
        for l in range(n):
            sign = -1 if (parities[j] * parities[l]) % 2 else 1
            out[(l * n + j, j * n + l)] = sign
    return GradedMatrix(tensor_parities(parities, parities), out)


def embed_pair(m: GradedMatrix, parities, positions) -> GradedMatrix:
    """Embed a two-site operator into V (x) V (x) V at the given positions.

    ``m`` acts on V (x) V with single-site parity vector ``parities``;
    ``positions`` is one of (1,2), (1,3), (2,3).  The (1,3) embedding is
    realized as P23 . M12 . P23 so all signs come from one convention.
    """
    ident = GradedMatrix.identity(parities)
    if positions == (1, 2):
        return graded_kron(m, ident)
    if positions == (2, 3):
        return graded_kron(ident, m)
    if positions == (1, 3):
        p23 = graded_kron(ident, graded_permutation(parities))
        return p23 * graded_kron(m, ident) * p23
    raise ValueError(f"bad positions {positions!r}")
