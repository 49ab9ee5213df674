"""Exact scalars and dense linear algebra over Q and Q(i).

Everything downstream builds on this layer: vectors are tuples of GRat,
matrices are immutable dense arrays, and subspaces are stored as reduced
row echelon bases so that two equal subspaces have bitwise-equal
representations.  All arithmetic is exact; no floats anywhere.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Rat = Fraction


class ExactError(Exception):
    pass


class DimensionMismatch(ExactError):
    pass


class ScalarSyntaxError(ExactError):
    pass


class GRat:
    """Gaussian rational a + b*i with Fraction components."""

    __slots__ = ("re", "im", "_nz")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)
        self._nz = bool(self.re) or bool(self.im)

    def is_zero(self) -> bool:
        return not self._nz

    def is_real(self) -> bool:
        return not self.im

    def conj(self) -> "GRat":
        return GRat(self.re, -self.im)

    def sqmod(self) -> Rat:
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    @staticmethod
    def _coerce(x):
        if isinstance(x, GRat):
            return x
        if isinstance(x, (int, Fraction)):
            return GRat(x)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GRat(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GRat(o.re - self.re, o.im - self.im)

    def __neg__(self):
        return GRat(-self.re, -self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.im:
            if not self.im:
                return GRat(self.re * o.re)
            return GRat(self.re * o.re, self.im * o.re)
        if not self.im:
            return GRat(self.re * o.re, self.re * o.im)
        return GRat(self.re * o.re - self.im * o.im,
                    self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "GRat":
        if self.is_zero():
            raise ZeroDivisionError("inverse of 0")
        if not self.im:
            return GRat(1 / self.re)
        n = self.sqmod()
        return GRat(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self._nz

    def __repr__(self):
        return format_scalar(self)


ZERO = GRat(0)
ONE = GRat(1)
I = GRat(0, 1)


def grat(x) -> GRat:
    g = GRat._coerce(x)
    if g is None:
        raise TypeError(f"cannot coerce {x!r} to GRat")
    return g


_RAT_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def parse_rat(s: str) -> Rat:
    s = s.strip()
    if not _RAT_RE.match(s):
        raise ScalarSyntaxError(f"bad rational: {s!r}")
    return Fraction(s)


def format_rat(x: Rat) -> str:
    return str(x)


def parse_scalar(s: str) -> GRat:
    """Parse 'p/q', 'a+bi', 'a-bi', 'bi', 'i', '-i'."""
    t = s.strip().replace(" ", "")
    if not t:
        raise ScalarSyntaxError("empty scalar")
    if not t.endswith("i"):
        return GRat(parse_rat(t))
    body = t[:-1]
    # split off the imaginary coefficient: last +/- not at position 0
    cut = -1
    for idx in range(len(body) - 1, 0, -1):
        if body[idx] in "+-" and body[idx - 1] not in "+-/":
            cut = idx
            break
    if cut == -1:
        re_part, im_part = "", body
    else:
        re_part, im_part = body[:cut], body[cut:]
    if im_part in ("", "+"):
        im = Fraction(1)
    elif im_part == "-":
        im = Fraction(-1)
    else:
        im = parse_rat(im_part)
    if not re_part:
        return GRat(0, im)
    return GRat(parse_rat(re_part), im)


def format_scalar(z: GRat) -> str:
    if not z.im:
        return str(z.re)
    if z.im == 1:
        im = "i"
    elif z.im == -1:
        im = "-i"
    else:
        im = f"{z.im}i"
    if not z.re:
        return im
    sign = "+" if z.im > 0 and not im.startswith("-") else ""
    return f"{z.re}{sign}{im}"


# ---------------------------------------------------------------------------
# vectors

Vec = tuple


def vec(xs: Iterable) -> Vec:
    return tuple(grat(x) for x in xs)

def vzero(n: int) -> Vec:
    return (ZERO,) * n

def vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))

def vsub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))

def vscale(c: GRat, a: Vec) -> Vec:
    return tuple(c * x for x in a)

def vconj(a: Vec) -> Vec:
    return tuple(x.conj() for x in a)

def vdot(a: Vec, b: Vec) -> GRat:
    """Bilinear dot product (no conjugation)."""
    s = ZERO
    for x, y in zip(a, b):
        s = s + x * y
    return s

def vis_zero(a: Vec) -> bool:
    return all(x.is_zero() for x in a)

def vis_real(a: Vec) -> bool:
    return all(x.is_real() for x in a)


def _rref(rows: list) -> tuple:
    """In-place reduced row echelon form; returns (nonzero rows, pivots)."""
    rows = [list(r) for r in rows]
    m = len(rows)
    ncols = len(rows[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, m):
            if not rows[i][c].is_zero():
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][c].inverse()
        rr = rows[r]
        if not (inv.re == 1 and not inv.im):
            for j in range(c, ncols):
                if not rr[j].is_zero():
                    rr[j] = inv * rr[j]
        nz = [(j, rr[j]) for j in range(c, ncols) if not rr[j].is_zero()]
        for i in range(m):
            if i != r:
                f = rows[i][c]
                if not f.is_zero():
                    ri = rows[i]
                    for j, b in nz:
                        ri[j] = ri[j] - f * b
        pivots.append(c)
        r += 1
        if r == m:
            break
    return [tuple(row) for row in rows[:r]], pivots


class Mat:
    """Immutable dense matrix over Q(i); acts on column vectors."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Sequence[Sequence], rows: Optional[int] = None,
                 cols: Optional[int] = None):
        d = tuple(tuple(grat(x) for x in row) for row in data)
        self.data = d
        self.rows = len(d) if rows is None else rows
        self.cols = (len(d[0]) if d else 0) if cols is None else cols
        for row in d:
            if len(row) != self.cols:
                raise DimensionMismatch("ragged matrix")

    @staticmethod
    def _wrap(data: tuple, rows: int, cols: int) -> "Mat":
        m = object.__new__(Mat)
        m.data = data
        m.rows = rows
        m.cols = cols
        return m

    @staticmethod
    def zero(r: int, c: int) -> "Mat":
        return Mat._wrap(tuple((ZERO,) * c for _ in range(r)), r, c)

    @staticmethod
    def identity(n: int) -> "Mat":
        return Mat([[ONE if i == j else ZERO for j in range(n)]
                    for i in range(n)], n, n)

    @staticmethod
    def from_cols(cols: Sequence[Vec], nrows: Optional[int] = None) -> "Mat":
        if not cols:
            return Mat.zero(nrows or 0, 0)
        n = len(cols[0]) if nrows is None else nrows
        return Mat([[cols[j][i] for j in range(len(cols))] for i in range(n)],
                   n, len(cols))

    def col(self, j: int) -> Vec:
        return tuple(self.data[i][j] for i in range(self.rows))

    def row(self, i: int) -> Vec:
        return self.data[i]

    def apply(self, v: Vec) -> Vec:
        if len(v) != self.cols:
            raise DimensionMismatch("matrix/vector size")
        out = []
        for i in range(self.rows):
            s = ZERO
            ri = self.data[i]
            for j, x in enumerate(v):
                if not x.is_zero() and not ri[j].is_zero():
                    s = s + ri[j] * x
            out.append(s)
        return tuple(out)

    def __add__(self, other: "Mat") -> "Mat":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix add")
        return Mat._wrap(tuple(tuple(a + b for a, b in zip(r1, r2))
                               for r1, r2 in zip(self.data, other.data)),
                         self.rows, self.cols)

    def __sub__(self, other: "Mat") -> "Mat":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix sub")
        return Mat._wrap(tuple(tuple(a - b for a, b in zip(r1, r2))
                               for r1, r2 in zip(self.data, other.data)),
                         self.rows, self.cols)

    def __neg__(self) -> "Mat":
        return Mat._wrap(tuple(tuple(-a for a in r) for r in self.data),
                         self.rows, self.cols)

    def scale(self, c) -> "Mat":
        c = grat(c)
        return Mat._wrap(tuple(tuple(c * a for a in r) for r in self.data),
                         self.rows, self.cols)

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise DimensionMismatch("matrix mul")
        ot = list(zip(*other.data)) if other.data else []
        out = []
        for r in self.data:
            nz = [(k, a) for k, a in enumerate(r) if a._nz]
            row = []
            for c in range(other.cols):
                s = ZERO
                oc = ot[c]
                for k, a in nz:
                    b = oc[k]
                    if b._nz:
                        s = s + a * b
                row.append(s)
            out.append(tuple(row))
        return Mat._wrap(tuple(out), self.rows, other.cols)

    def pow(self, k: int) -> "Mat":
        if self.rows != self.cols:
            raise DimensionMismatch("power of non-square")
        out = Mat.identity(self.rows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base if k > 1 else base
            k >>= 1
        return out

    @property
    def T(self) -> "Mat":
        return Mat._wrap(tuple(zip(*self.data)) if self.data else (),
                         self.cols, self.rows)

    def conj(self) -> "Mat":
        return Mat._wrap(tuple(tuple(a.conj() for a in r)
                               for r in self.data), self.rows, self.cols)

    def conj_T(self) -> "Mat":
        return self.T.conj()

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.data for a in r)

    def is_real(self) -> bool:
        return all(a.is_real() for r in self.data for a in r)

    def is_nilpotent(self) -> bool:
        if self.rows != self.cols:
            return False
        p = self
        for _ in range(self.rows):
            if p.is_zero():
                return True
            p = p @ self
        return p.is_zero()

    def exp_nilpotent(self) -> "Mat":
        """exp(M) for nilpotent M; exact, terminating series."""
        n = self.rows
        out = Mat.identity(n)
        term = Mat.identity(n)
        for k in range(1, n + 2):
            term = (term @ self).scale(Fraction(1, k))
            if term.is_zero():
                return out
            out = out + term
        raise ExactError("exp_nilpotent: matrix is not nilpotent")

    def inverse(self) -> "Mat":
        if self.rows != self.cols:
            raise DimensionMismatch("inverse of non-square")
        n = self.rows
        aug = [list(self.data[i]) + [ONE if j == i else ZERO for j in range(n)]
               for i in range(n)]
        red, piv = _rref(aug)
        if piv != list(range(n)):
            raise ExactError("matrix is singular")
        return Mat([row[n:] for row in red], n, n)

    def det(self) -> GRat:
        if self.rows != self.cols:
            raise DimensionMismatch("det of non-square")
        n = self.rows
        a = [list(r) for r in self.data]
        d = ONE
        for c in range(n):
            pr = None
            for i in range(c, n):
                if not a[i][c].is_zero():
                    pr = i
                    break
            if pr is None:
                return ZERO
            if pr != c:
                a[c], a[pr] = a[pr], a[c]
                d = -d
            d = d * a[c][c]
            inv = a[c][c].inverse()
            for i in range(c + 1, n):
                if not a[i][c].is_zero():
                    f = a[i][c] * inv
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return d

    def rank(self) -> int:
        _, piv = _rref(list(self.data))
        return len(piv)

    def max_sqmod(self) -> Rat:
        m = Fraction(0)
        for r in self.data:
            for a in r:
                s = a.sqmod()
                if s > m:
                    m = s
        return m

    def kron(self, other: "Mat") -> "Mat":
        out = []
        for i in range(self.rows):
            for k in range(other.rows):
                row = []
                for j in range(self.cols):
                    a = self.data[i][j]
                    row.extend(a * b for b in other.data[k])
                out.append(row)
        return Mat(out, self.rows * other.rows, self.cols * other.cols)

    def direct_sum(self, other: "Mat") -> "Mat":
        out = []
        for r in self.data:
            out.append(list(r) + [ZERO] * other.cols)
        for r in other.data:
            out.append([ZERO] * self.cols + list(r))
        return Mat(out, self.rows + other.rows, self.cols + other.cols)

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return (self.rows, self.cols, self.data) == \
               (other.rows, other.cols, other.data)

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __repr__(self):
        body = "; ".join(" ".join(format_scalar(a) for a in r)
                         for r in self.data)
        return f"Mat[{self.rows}x{self.cols}: {body}]"


def solve_linear(a: Mat, b: Vec) -> Optional[Vec]:
    """Particular solution of A x = b (free variables set to 0), or None."""
    if a.rows != len(b):
        raise DimensionMismatch("solve_linear")
    aug = [list(a.data[i]) + [b[i]] for i in range(a.rows)]
    if not aug:
        return vzero(a.cols)
    red, piv = _rref(aug)
    if a.cols in piv:
        return None
    x = [ZERO] * a.cols
    for r, c in enumerate(piv):
        x[c] = red[r][a.cols]
    return tuple(x)


def nullspace(a: Mat) -> "Subspace":
    """Right nullspace {x : A x = 0} as a canonical Subspace."""
    red, piv = _rref(list(a.data))
    pivset = set(piv)
    basis = []
    for c in range(a.cols):
        if c in pivset:
            continue
        v = [ZERO] * a.cols
        v[c] = ONE
        for r, pc in enumerate(piv):
            v[pc] = -red[r][c]
        basis.append(tuple(v))
    return Subspace.span(a.cols, basis)


class Subspace:
    """Linear subspace of Q(i)^n stored as a canonical RREF basis."""

    __slots__ = ("ambient", "rows", "pivots", "_ann", "_proj")

    def __init__(self, ambient: int, rows: tuple, pivots: tuple):
        self.ambient = ambient
        self.rows = rows
        self.pivots = pivots
        self._ann = None
        self._proj = None

    @staticmethod
    def span(ambient: int, vectors: Iterable[Vec]) -> "Subspace":
        vs = [tuple(grat(x) for x in v) for v in vectors]
        for v in vs:
            if len(v) != ambient:
                raise DimensionMismatch("span: wrong vector length")
        if not vs:
            return Subspace(ambient, (), ())
        rows, piv = _rref(vs)
        return Subspace(ambient, tuple(rows), tuple(piv))

    @staticmethod
    def zero(ambient: int) -> "Subspace":
        return Subspace(ambient, (), ())

    @staticmethod
    def full(ambient: int) -> "Subspace":
        return Subspace.span(ambient,
                             [tuple(ONE if j == i else ZERO
                                    for j in range(ambient))
                              for i in range(ambient)])

    @property
    def dim(self) -> int:
        return len(self.rows)

    def is_real(self) -> bool:
        return all(vis_real(r) for r in self.rows)

    def coords_of(self, v: Vec) -> Optional[Vec]:
        """Coefficients of v in the RREF basis, or None if v is outside."""
        if len(v) != self.ambient:
            raise DimensionMismatch("coords_of")
        coeffs = tuple(v[p] for p in self.pivots)
        w = list(v)
        for c, row in zip(coeffs, self.rows):
            if not c.is_zero():
                w = [a - c * b for a, b in zip(w, row)]
        if not all(a.is_zero() for a in w):
            return None
        return coeffs

    def contains_vector(self, v: Vec) -> bool:
        return self.coords_of(v) is not None

    def contains(self, other: "Subspace") -> bool:
        return all(self.contains_vector(r) for r in other.rows)

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient != other.ambient:
            raise DimensionMismatch("sum of subspaces")
        return Subspace.span(self.ambient, list(self.rows) + list(other.rows))

    def annihilator(self) -> Mat:
        """Matrix K with self = {x : K x = 0}; rows form a basis of the
        annihilator under the bilinear (non-hermitian) pairing."""
        if self._ann is None:
            if self.dim == 0:
                self._ann = Mat.identity(self.ambient)
            else:
                ns = nullspace(Mat(self.rows, self.dim, self.ambient))
                self._ann = Mat(ns.rows, ns.dim, self.ambient)
        return self._ann

    def intersect(self, other: "Subspace") -> "Subspace":
        """Zassenhaus: reduce [[A|A],[B|0]]; zero-left rows carry A ∩ B."""
        if self.ambient != other.ambient:
            raise DimensionMismatch("intersection")
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient)
        d = self.ambient
        stacked = [list(r) + list(r) for r in self.rows] \
            + [list(r) + [ZERO] * d for r in other.rows]
        red, piv = _rref(stacked)
        inter_rows = [row[d:] for row in red if all(x.is_zero()
                                                    for x in row[:d])]
        return Subspace.span(d, inter_rows)

    def image_under(self, m: Mat) -> "Subspace":
        if m.cols != self.ambient:
            raise DimensionMismatch("image_under")
        return Subspace.span(m.rows, [m.apply(r) for r in self.rows])

    def preimage_under(self, m: Mat) -> "Subspace":
        if m.rows != self.ambient:
            raise DimensionMismatch("preimage_under")
        return nullspace(self.annihilator() @ m)

    def conj(self) -> "Subspace":
        return Subspace(self.ambient, tuple(vconj(r) for r in self.rows),
                        self.pivots)

    def basis_matrix(self) -> Mat:
        """Basis vectors as columns (ambient x dim)."""
        return Mat(self.rows, self.dim, self.ambient).T

    def hermitian_projector(self) -> Mat:
        """Orthogonal projector onto self for the standard hermitian form.

        Canonical: depends only on the subspace, not the basis.
        """
        if self._proj is None:
            if self.dim == 0:
                self._proj = Mat.zero(self.ambient, self.ambient)
            else:
                b = self.basis_matrix()
                bs = b.conj_T()
                self._proj = b @ (bs @ b).inverse() @ bs
        return self._proj

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient, self.rows) == (other.ambient, other.rows)

    def __hash__(self):
        return hash((self.ambient, self.rows))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of {self.ambient})"


def pivot_complement(inner: "Subspace", outer: "Subspace") -> list:
    """Rows of `outer` whose pivots are new relative to `inner`.

    Requires inner <= outer; the returned vectors project to a basis of
    outer/inner.  Deterministic (echelon pivots break ties).
    """
    pin = set(inner.pivots)
    return [r for r, p in zip(outer.rows, outer.pivots) if p not in pin]


class QuotientMap:
    """Quotient A/B of nested subspaces with a recorded pivot basis."""

    __slots__ = ("sub", "total", "reps", "dim", "_classes")

    def __init__(self, total: Subspace, sub: Subspace):
        if not total.contains(sub):
            raise ExactError("QuotientMap: B is not contained in A")
        self.total = total
        self.sub = sub
        self.reps = tuple(pivot_complement(sub, total))
        self.dim = len(self.reps)
        # class of each basis row of `total` in the quotient basis
        span_rows = list(sub.rows) + list(self.reps)
        mat = Mat.from_cols(span_rows) if span_rows else Mat.zero(total.ambient, 0)
        classes = []
        for r in total.rows:
            sol = solve_linear(mat, r)
            if sol is None:
                raise ExactError("QuotientMap: internal solve failed")
            classes.append(tuple(sol[sub.dim:]))
        self._classes = tuple(classes)

    def project(self, v: Vec) -> Vec:
        """Class of v (must lie in A) in the quotient basis."""
        c = self.total.coords_of(v)
        if c is None:
            raise ExactError("QuotientMap.project: vector outside A")
        out = [ZERO] * self.dim
        for coeff, cls in zip(c, self._classes):
            if not coeff.is_zero():
                for i in range(self.dim):
                    out[i] = out[i] + coeff * cls[i]
        return tuple(out)

    def lift(self, coords: Vec) -> Vec:
        """Pivot section: the representative sum(c_i * rep_i)."""
        out = vzero(self.total.ambient)
        for c, r in zip(coords, self.reps):
            if not c.is_zero():
                out = vadd(out, vscale(c, r))
        return out

    def project_subspace(self, s: Subspace) -> Subspace:
        return Subspace.span(self.dim, [self.project(r) for r in s.rows])

    def induced(self, m: Mat) -> Mat:
        """Matrix of the endomorphism induced on A/B (m must preserve A, B)."""
        cols = [self.project(m.apply(r)) for r in self.reps]
        return Mat.from_cols(cols) if cols else Mat.zero(0, 0)


def hermitian_posdef(h: Mat) -> bool:
    """Exact positive-definiteness of a hermitian matrix via leading minors."""
    if h.rows != h.cols:
        raise DimensionMismatch("hermitian_posdef")
    if h != h.conj_T():
        raise ExactError("matrix is not hermitian")
    for k in range(1, h.rows + 1):
        minor = Mat([r[:k] for r in h.data[:k]], k, k).det()
        if not minor.is_real():
            raise ExactError("hermitian minor came out complex")
        if minor.re <= 0:
            return False
    return True


def realify_matrix(m: Mat) -> Mat:
    """Restriction of scalars Q(i) -> Q: z acts on (re, im) block pairs."""
    a = Mat([[x.re for x in r] for r in m.data], m.rows, m.cols)
    b = Mat([[x.im for x in r] for r in m.data], m.rows, m.cols)
    top = [list(ar) + [-x for x in br] for ar, br in zip(a.data, b.data)]
    bot = [list(br) + list(ar) for ar, br in zip(a.data, b.data)]
    return Mat(top + bot, 2 * m.rows, 2 * m.cols)


def realify_subspace(s: Subspace) -> Subspace:
    """Same subspace viewed over Q: dimension doubles."""
    vecs = []
    for r in s.rows:
        for mult in (ONE, I):
            w = vscale(mult, r)
            vecs.append(tuple(Fraction(x.re) for x in w)
                        + tuple(Fraction(x.im) for x in w))
    return Subspace.span(2 * s.ambient, [vec(v) for v in vecs])
