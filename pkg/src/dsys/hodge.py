"""Hodge filtrations over Q(i), mixed-Hodge-structure checks, the unique
(s', delta) splitting pair, canonical splittings, and polarization forms.

A mixed Hodge structure here is a pair (W, F) on a real space V whose
graded quotients gr^W_w carry pure Hodge structures of weight w.  For such
a pair there is a unique pair (s', delta) of a splitting s': gr^W -> V and
a real map delta: gr^W -> gr^W whose Hodge (p,q)-components vanish unless
p < 0 and q < 0, with  F = s'(exp(i*delta) gr^W(F)).  The canonical
splitting is s = s' o exp(-zeta) where zeta is a universal Lie polynomial
in the components of delta; the polynomial is not reproduced here, so zeta
is computed by a pluggable provider (the default handles exactly the
delta = 0 case, which is the only value derivable without outside input).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .exactfield import (
    DimensionMismatch, ExactError, GRat, I, Mat, ONE, Rat, Subspace, ZERO,
    hermitian_posdef, solve_linear, vadd, vconj, vscale, vzero,
)
from .filtration import Grading, IncFiltration


class HodgeError(ExactError):
    pass


class ZetaDomainError(HodgeError):
    """The zeta provider does not cover this delta."""


class DecFiltration:
    """Finite decreasing filtration; the full space far below, 0 far above."""

    __slots__ = ("ambient", "_jumps")

    def __init__(self, ambient: int, jumps: Tuple[Tuple[int, Subspace], ...]):
        self.ambient = ambient
        self._jumps = jumps  # sorted by p ascending; at p below min: full

    @staticmethod
    def from_steps(ambient: int, steps: Dict[int, Subspace]) -> "DecFiltration":
        items = sorted(steps.items())
        prev = Subspace.full(ambient)
        jumps = []
        for p, s in items:
            if s.ambient != ambient:
                raise DimensionMismatch("filtration step in wrong space")
            if not prev.contains(s):
                raise HodgeError(f"filtration is not decreasing at {p}")
            if s.dim < prev.dim:
                jumps.append((p, s))
            prev = s
        if prev.dim != 0:
            raise HodgeError("decreasing filtration does not end at 0")
        return DecFiltration(ambient, tuple(jumps))

    def jumps(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self._jumps)

    def at(self, p: int) -> Subspace:
        res = Subspace.full(self.ambient)
        for jp, s in self._jumps:
            if jp <= p:
                res = s
            else:
                break
        return res

    def levels(self) -> Tuple[int, ...]:
        """All p where the step can change: jumps plus the level below."""
        if not self._jumps:
            return ()
        return tuple(range(self._jumps[0][0] - 1, self._jumps[-1][0] + 1))

    def map_by(self, m: Mat) -> "DecFiltration":
        return DecFiltration(
            m.rows, tuple((p, s.image_under(m)) for p, s in self._jumps))

    def restrict(self, u: Subspace) -> "DecFiltration":
        steps = {}
        for p, s in self._jumps:
            inter = s.intersect(u)
            steps[p] = Subspace.span(u.dim,
                                     [u.coords_of(r) for r in inter.rows])
        return DecFiltration.from_steps(u.dim, steps)

    def shift(self, k: int) -> "DecFiltration":
        return DecFiltration(self.ambient,
                             tuple((p + k, s) for p, s in self._jumps))

    def conj(self) -> "DecFiltration":
        return DecFiltration(self.ambient,
                             tuple((p, s.conj()) for p, s in self._jumps))

    def __eq__(self, other):
        if not isinstance(other, DecFiltration):
            return NotImplemented
        return (self.ambient, self._jumps) == (other.ambient, other._jumps)

    def __hash__(self):
        return hash((self.ambient, self._jumps))

    def __repr__(self):
        body = ", ".join(f"{p}:{s.dim}" for p, s in self._jumps)
        return f"DecFiltration({self.ambient}; {body})"


def induced_dec_on_graded(f: DecFiltration, w_filt: IncFiltration,
                          w: int) -> DecFiltration:
    """Filtration induced by F on the graded quotient gr^W_w (complexified:
    the quotient's pivot basis is used for coordinates)."""
    q = w_filt.graded(w)
    if q.dim == 0:
        return DecFiltration(0, ())
    ww = w_filt.at(w)
    steps = {}
    for p in f.jumps():
        steps[p] = q.project_subspace(f.at(p).intersect(ww))
    steps[max(steps) + 1] = Subspace.zero(q.dim)
    return DecFiltration.from_steps(q.dim, steps)


def is_pure_hs(dim: int, w: int, f: DecFiltration) -> bool:
    """Purity of weight w:  F^p ⊕ conj(F^{w-p+1}) = V for every p."""
    if f.ambient != dim:
        raise DimensionMismatch("is_pure_hs")
    if dim == 0:
        return True
    ps = f.jumps()
    if not ps:
        return False
    lo = min(ps[0], w + 1 - ps[-1]) - 1
    hi = max(ps[-1], w + 1 - ps[0]) + 1
    for p in range(lo, hi + 1):
        a = f.at(p)
        b = f.at(w - p + 1).conj()
        if a.dim + b.dim != dim or a.intersect(b).dim != 0:
            return False
    return True


def hodge_decomposition(dim: int, w: int,
                        f: DecFiltration) -> Dict[Tuple[int, int], Subspace]:
    """H^{p,q} = F^p ∩ conj(F^q) for a pure structure of weight w."""
    if not is_pure_hs(dim, w, f):
        raise HodgeError("not a pure Hodge structure")
    out = {}
    hi = f.jumps()[-1] if f.jumps() else 0
    for p in range(w - hi, hi + 1):
        q = w - p
        h = f.at(p).intersect(f.at(q).conj())
        if h.dim:
            out[(p, q)] = h
    if sum(s.dim for s in out.values()) != dim:
        raise HodgeError("Hodge pieces do not exhaust the space")
    return out


@dataclass
class MhsReport:
    ok: bool
    failures: List[str]

    def __bool__(self):
        return self.ok


def is_mhs(w_filt: IncFiltration, f: DecFiltration) -> MhsReport:
    """Graded-purity check: each gr^W_w with the induced F is pure of
    weight w."""
    if w_filt.ambient != f.ambient:
        raise DimensionMismatch("is_mhs")
    failures = []
    for w in w_filt.jumps():
        q = w_filt.graded(w)
        ind = induced_dec_on_graded(f, w_filt, w)
        if not is_pure_hs(q.dim, w, ind):
            failures.append(f"graded piece at w={w} is not pure")
    return MhsReport(not failures, failures)


# ---------------------------------------------------------------------------
# the (s', delta) splitting


@dataclass
class DeltaSplitting:
    """The unique pair (s', delta), plus the graded bookkeeping needed to
    take Hodge components of maps on gr^W."""
    s_prime: Mat           # gr^W -> V in the canonical graded basis
    delta: Mat             # real endomorphism of gr^W
    u: Mat                 # s' = s0 (1 + u) against the pivot section s0
    s0: Mat                # the pivot section gr^W -> V
    blocks: Tuple[Tuple[int, int, int], ...]   # (weight, start, size)
    types: Tuple[Tuple[int, int, Subspace], ...]  # (p, q, subspace of gr_C)
    _hb: Mat = field(repr=False, default=None)
    _hbinv: Mat = field(repr=False, default=None)

    @property
    def dim(self) -> int:
        return self.s_prime.rows

    def type_projector(self, p: int, q: int) -> Mat:
        n = self.dim
        pos = 0
        sel = []
        for (tp, tq, sub) in self.types:
            for _ in range(sub.dim):
                sel.append(tp == p and tq == q)
                pos += 1
        selm = Mat([[ONE if (i == j and sel[i]) else ZERO for j in range(n)]
                    for i in range(n)])
        return self._hb @ selm @ self._hbinv

    def bicomponent(self, m: Mat, a: int, b: int) -> Mat:
        """Component of a gr-endomorphism shifting Hodge type by (a, b)."""
        out = Mat.zero(self.dim, self.dim)
        for (p, q, _) in self.types:
            out = out + self.type_projector(p + a, q + b) @ m \
                @ self.type_projector(p, q)
        return out

    def delta_component(self, a: int, b: int) -> Mat:
        return self.bicomponent(self.delta, a, b)

    def sprime_grading(self) -> Grading:
        parts = {}
        for (w, start, size) in self.blocks:
            cols = [self.s_prime.col(j) for j in range(start, start + size)]
            parts[w] = Subspace.span(self.dim, cols)
        return Grading.from_parts(self.dim, parts)


def _depth_block(m: Mat, blocks, d: int) -> Mat:
    """Keep only the components mapping weight w to weight w - d."""
    n = m.rows
    out = [[ZERO] * n for _ in range(n)]
    for (w1, s1, z1) in blocks:
        for (w2, s2, z2) in blocks:
            if w2 - w1 == d:
                for i in range(s1, s1 + z1):
                    for j in range(s2, s2 + z2):
                        out[i][j] = m.data[i][j]
    return Mat(out, n, n)


def delta_splitting(w_filt: IncFiltration, f: DecFiltration,
                    section: Optional[Mat] = None) -> DeltaSplitting:
    """Solve for the unique (s', delta) with F = s'(exp(i delta) gr^W(F)).

    Strategy: transport everything to graded coordinates through the pivot
    section s0, find one unipotent lowering E0 with (1+E0) F_gr = F_0, then
    correct depth by depth inside the stabilizer of F_gr until the factor
    has the shape (1+u) exp(i delta) with u real and delta of pure Hodge
    type (<0, <0).  Uniqueness makes every step an exact linear solve.

    `section` overrides the pivot section (columns must represent the same
    graded classes); the solved pair does not depend on it.
    """
    rep = is_mhs(w_filt, f)
    if not rep.ok:
        raise HodgeError(f"not a mixed Hodge structure: {rep.failures}")
    d = w_filt.ambient
    if d == 0:
        z = Mat.zero(0, 0)
        return DeltaSplitting(z, z, z, z, (), (), z, z)
    # graded coordinates
    blocks = []
    cols = []
    pos = 0
    for w in w_filt.jumps():
        q = w_filt.graded(w)
        blocks.append((w, pos, q.dim))
        cols.extend(q.reps)
        pos += q.dim
    s0 = Mat.from_cols(cols, nrows=d)
    if section is not None:
        _check_section(w_filt, blocks, section, s0)
        s0 = section
    s0inv = s0.inverse()
    f0 = f.map_by(s0inv)
    # split Hodge filtration F_gr and Hodge types per block
    types: List[Tuple[int, int, Subspace]] = []
    fgr_steps: Dict[int, List] = {}
    for (w, start, size) in blocks:
        sub_f = _block_filtration(f0, blocks, w, start, size)
        dec = hodge_decomposition(size, w, sub_f)
        for (p, q), h in sorted(dec.items()):
            emb = Subspace.span(d, [_pad(r, start, d) for r in h.rows])
            types.append((p, q, emb))
    types.sort(key=lambda t: (-(t[0] + t[1]), -t[0]))
    hcols = []
    for (p, q, emb) in types:
        hcols.extend(emb.rows)
    hb = Mat.from_cols(hcols, nrows=d)
    hbinv = hb.inverse()
    fgr: Dict[int, Subspace] = {}
    for pl in set(p for (p, _, _) in types):
        acc = [r for (p, q, emb) in types if p >= pl for r in emb.rows]
        fgr[pl] = Subspace.span(d, acc)
    # particular solution E0
    e0_cols = []
    block_of = {w: (start, size) for (w, start, size) in blocks}
    for (p, q, emb) in types:
        w = p + q
        for x in emb.rows:
            y = _match_leading(f0, w_filt_jumpspace(blocks, w, d), x, p,
                               block_of[w])
            e0_cols.append(vsub_vec(y, x))
    e0 = Mat.from_cols(e0_cols, nrows=d) @ hbinv
    ds = DeltaSplitting(Mat.identity(d), Mat.zero(d, d), Mat.zero(d, d),
                        s0, tuple(blocks), tuple(types), hb, hbinv)
    # depth-by-depth correction
    ws = [w for (w, _, _) in blocks]
    max_depth = ws[-1] - ws[0] if ws else 0
    u_sum = Mat.zero(d, d)
    g_sum = Mat.zero(d, d)
    delta_sum = Mat.zero(d, d)
    ident = Mat.identity(d)
    for depth in range(1, max_depth + 1):
        lhs = (ident + u_sum) @ (delta_sum.scale(I)).exp_nilpotent()
        rhs = (ident + e0) @ (ident + g_sum)
        k_d = _depth_block(lhs - rhs, blocks, depth)
        sol = _solve_depth(ds, blocks, depth, k_d)
        if sol is None:
            raise HodgeError("splitting solve failed (input is not an MHS?)")
        g_d, u_d, delta_d = sol
        u_sum = u_sum + u_d
        delta_sum = delta_sum + delta_d
        g_sum = g_sum + g_d + _depth_products(g_sum, g_d)
    # final factor checks
    u = u_sum
    delta = delta_sum
    if not u.is_real() or not delta.is_real():
        raise HodgeError("internal: splitting factors are not real")
    e_total = (ident + u) @ (delta.scale(I)).exp_nilpotent()
    for p, s in fgr.items():
        if s.image_under(e_total) != f0.at(p):
            raise HodgeError("internal: splitting does not reproduce F")
    s_prime = s0 @ (ident + u)
    out = DeltaSplitting(s_prime, delta, u, s0, tuple(blocks), tuple(types),
                         hb, hbinv)
    return out


def _check_section(w_filt: IncFiltration, blocks, section: Mat,
                   s0: Mat) -> None:
    for (w, start, size) in blocks:
        q = w_filt.graded(w)
        for j in range(start, start + size):
            col = section.col(j)
            if not w_filt.at(w).contains_vector(col):
                raise HodgeError("section column lies outside its W step")
            if q.project(col) != q.project(s0.col(j)):
                raise HodgeError("section column has the wrong graded class")


def _depth_products(g_sum: Mat, g_d: Mat) -> Mat:
    # stabilizer elements compose as (1+a)(1+b) = 1 + a + b + ab
    return g_sum @ g_d


def _pad(row, start: int, d: int):
    out = [ZERO] * d
    for i, x in enumerate(row):
        out[start + i] = x
    return tuple(out)


def vsub_vec(a, b):
    return tuple(x - y for x, y in zip(a, b))


def w_filt_jumpspace(blocks, w: int, d: int) -> Subspace:
    """Standard-coordinate subspace spanned by blocks of weight <= w."""
    vecs = []
    for (bw, start, size) in blocks:
        if bw <= w:
            for i in range(start, start + size):
                v = [ZERO] * d
                v[i] = ONE
                vecs.append(tuple(v))
    return Subspace.span(d, vecs)


def _block_filtration(f0: DecFiltration, blocks, w: int, start: int,
                      size: int) -> DecFiltration:
    """Induced filtration of f0 on the weight-w coordinate block."""
    d = f0.ambient
    wspace = w_filt_jumpspace(blocks, w, d)
    steps = {}
    for p in f0.jumps():
        inter = f0.at(p).intersect(wspace)
        rows = [tuple(r[start:start + size]) for r in inter.rows]
        steps[p] = Subspace.span(size, rows)
    hi = (max(steps) + 1) if steps else 0
    steps[hi] = Subspace.zero(size)
    return DecFiltration.from_steps(size, steps)


def _match_leading(f0: DecFiltration, wspace: Subspace, x, p: int, block):
    """Some y in F0^p ∩ W_w whose weight-w block equals that of x (echelon
    particular solution, hence deterministic)."""
    start, size = block
    space = f0.at(p).intersect(wspace)
    d = len(x)
    lead = list(range(start, start + size))
    rows = space.rows
    cols = [[r[i] for r in rows] for i in lead]
    a = Mat(cols, len(lead), len(rows))
    b = tuple(x[i] for i in lead)
    sol = solve_linear(a, b)
    if sol is None:
        raise HodgeError("internal: cannot lift a Hodge vector")
    y = vzero(d)
    for c, r in zip(sol, rows):
        y = vadd(y, vscale(c, r))
    return y


def _solve_depth(ds: DeltaSplitting, blocks, depth: int, k_d: Mat):
    """Solve g - u - i*delta = k at one depth, with g in the stabilizer of
    F_gr (first Hodge index never drops), u real, delta of type (<0, <0)."""
    d = ds.dim
    slots = []  # (i, j) positions allowed at this depth
    for (w1, s1, z1) in blocks:
        for (w2, s2, z2) in blocks:
            if w2 - w1 == depth:
                for i in range(s1, s1 + z1):
                    for j in range(s2, s2 + z2):
                        slots.append((i, j))
    nslot = len(slots)
    if nslot == 0:
        z = Mat.zero(d, d)
        return z, z, z
    # unknowns: u (real), delta (real), g.re, g.im  -> 4 * nslot rationals
    nunk = 4 * nslot
    rows: List[List[Rat]] = []
    rhs: List[Rat] = []

    def add_complex_eq(coeffs_re, coeffs_im, target: GRat):
        rows.append(coeffs_re)
        rhs.append(target.re)
        rows.append(coeffs_im)
        rhs.append(target.im)

    # (A) g - u - i delta = k  entrywise on slots
    for idx, (i, j) in enumerate(slots):
        cre = [Fraction(0)] * nunk
        cim = [Fraction(0)] * nunk
        # g.re + i g.im - u - i delta
        cre[2 * nslot + idx] = Fraction(1)   # g.re
        cre[idx] = Fraction(-1)              # -u
        cim[3 * nslot + idx] = Fraction(1)   # g.im
        cim[nslot + idx] = Fraction(-1)      # -delta
        add_complex_eq(cre, cim, k_d.data[i][j])
    # (B) stabilizer membership of g: bicomponents with a < 0 vanish.
    # (C) delta: bicomponents vanish unless p < 0 and q < 0.
    pair_shifts = sorted({(p2 - p1, q2 - q1)
                          for (p1, q1, _) in ds.types
                          for (p2, q2, _) in ds.types
                          if (p1 + q1) - (p2 + q2) == depth})
    basis_mats = []
    for idx, (i, j) in enumerate(slots):
        m = [[ZERO] * d for _ in range(d)]
        m[i][j] = ONE
        basis_mats.append(Mat(m, d, d))
    for (a, b) in pair_shifts:
        need_g = a < 0
        need_delta = not (a < 0 and b < 0)
        if not (need_g or need_delta):
            continue
        comps = [ds.bicomponent(bm, a, b) for bm in basis_mats]
        for i in range(d):
            for j in range(d):
                entries = [c.data[i][j] for c in comps]
                if all(e.is_zero() for e in entries):
                    continue
                if need_g:
                    cre = [Fraction(0)] * nunk
                    cim = [Fraction(0)] * nunk
                    for idx, e in enumerate(entries):
                        cre[2 * nslot + idx] += e.re
                        cre[3 * nslot + idx] += -e.im
                        cim[2 * nslot + idx] += e.im
                        cim[3 * nslot + idx] += e.re
                    add_complex_eq(cre, cim, ZERO)
                if need_delta:
                    cre = [Fraction(0)] * nunk
                    cim = [Fraction(0)] * nunk
                    for idx, e in enumerate(entries):
                        cre[nslot + idx] += e.re
                        cim[nslot + idx] += e.im
                    add_complex_eq(cre, cim, ZERO)
    a_mat = Mat([[GRat(x) for x in row] for row in rows], len(rows), nunk)
    sol = solve_linear(a_mat, tuple(GRat(x) for x in rhs))
    if sol is None:
        return None

    def unpack(offset):
        m = [[ZERO] * d for _ in range(d)]
        for idx, (i, j) in enumerate(slots):
            m[i][j] = sol[offset + idx]
        return Mat(m, d, d)

    u_d = unpack(0)
    delta_d = unpack(nslot)
    g_d = unpack(2 * nslot) + unpack(3 * nslot).scale(I)
    return g_d, u_d, delta_d


# ---------------------------------------------------------------------------
# zeta providers and the canonical splitting


class ZeroZetaProvider:
    """Accepts only delta = 0 (then zeta = 0); rejects anything else rather
    than silently computing a wrong canonical splitting."""

    name = "zero-only"

    def __call__(self, ds: DeltaSplitting) -> Mat:
        if not ds.delta.is_zero():
            raise ZetaDomainError(
                "delta != 0: supply a Lie-polynomial table provider")
        return Mat.zero(ds.dim, ds.dim)


class TableZetaProvider:
    """zeta as an explicit polynomial in the delta_{p,q} components.

    entries: iterable of (coefficient, ((p1,q1), (p2,q2), ...)) meaning
    coeff * delta_{p1,q1} @ delta_{p2,q2} @ ... summed into zeta.
    """

    name = "table"

    def __init__(self, entries):
        self.entries = tuple((Fraction(c), tuple(word)) for c, word in entries)

    def __call__(self, ds: DeltaSplitting) -> Mat:
        d = ds.dim
        out = Mat.zero(d, d)
        for coeff, word in self.entries:
            term = Mat.identity(d)
            for (p, q) in word:
                term = term @ ds.delta_component(p, q)
            out = out + term.scale(coeff)
        if not out.is_real():
            raise ZetaDomainError("table produced a non-real zeta")
        return out


DEFAULT_ZETA = ZeroZetaProvider()


def canonical_splitting_map(w_filt: IncFiltration, f: DecFiltration,
                            provider=DEFAULT_ZETA):
    """The canonical splitting s = s' o exp(-zeta) as a matrix gr^W -> V,
    together with the solved (s', delta) data."""
    ds = delta_splitting(w_filt, f)
    zeta = provider(ds)
    s = ds.s_prime @ (-zeta).exp_nilpotent()
    return s, ds


def canonical_splitting(w_filt: IncFiltration, f: DecFiltration,
                        provider=DEFAULT_ZETA) -> Grading:
    """Grading of V induced by the canonical splitting of (W, F)."""
    s, ds = canonical_splitting_map(w_filt, f, provider)
    parts = {}
    for (w, start, size) in ds.blocks:
        parts[w] = Subspace.span(ds.dim,
                                 [s.col(j) for j in range(start, start + size)])
    g = Grading.from_parts(w_filt.ambient, parts)
    if not g.splits(w_filt):
        raise HodgeError("internal: canonical splitting does not split W")
    return g


# ---------------------------------------------------------------------------
# polarizations


@dataclass(frozen=True)
class GradedForm:
    """Nondegenerate bilinear form on a graded piece: symmetric for even
    weight, antisymmetric for odd weight.  gram[i][j] = <e_i, e_j>."""
    weight: int
    gram: Mat

    def pairing(self, u, v) -> GRat:
        s = ZERO
        gu = self.gram.apply(v)
        for x, y in zip(u, gu):
            s = s + x * y
        return s


def _form_ok(form: GradedForm) -> None:
    g = form.gram
    if not g.is_real():
        raise HodgeError("form must be real")
    sign = GRat(1) if form.weight % 2 == 0 else GRat(-1)
    if g.T != g.scale(sign):
        raise HodgeError("form has the wrong symmetry for its weight")
    if g.det().is_zero():
        raise HodgeError("degenerate form")


def verify_polarization(w: int, form: GradedForm,
                        f: DecFiltration) -> bool:
    """Exact polarization check: Hodge pieces pair only with their mirror,
    and the hermitian form h(u, v) = i^{p-q} <u, conj v> is positive
    definite on each H^{p,q} (leading principal minors over Q)."""
    _form_ok(form)
    dim = form.gram.rows
    if not is_pure_hs(dim, w, f):
        return False
    dec = hodge_decomposition(dim, w, f)
    items = sorted(dec.items())
    for (p1, q1), h1 in items:
        for (p2, q2), h2 in items:
            if (p2, q2) == (q1, p1):
                continue
            for u in h1.rows:
                for v in h2.rows:
                    if not form.pairing(u, v).is_zero():
                        return False
    for (p, q), h in items:
        rows = []
        for u in h.rows:
            row = []
            for v in h.rows:
                row.append((I ** (p - q)) * form.pairing(u, vconj(v)))
            rows.append(row)
        herm = Mat(rows, h.dim, h.dim)
        if not hermitian_posdef(herm):
            return False
    return True


def construct_polarization(w: int, f: DecFiltration) -> GradedForm:
    """Build a form polarizing the given pure Hodge structure."""
    dim = f.ambient
    if not is_pure_hs(dim, w, f):
        raise HodgeError("construct_polarization: purity fails")
    if dim == 0:
        return GradedForm(w, Mat.zero(0, 0))
    dec = hodge_decomposition(dim, w, f)
    # gram on a Hodge-adapted basis, then transport to the standard basis
    cols = []
    entries = []  # (row index, col index, value) on the adapted basis
    order = []    # adapted basis vectors
    index = {}
    for (p, q), h in sorted(dec.items()):
        if p > q:
            conj_h = dec[(q, p)]
            for a, u in enumerate(h.rows):
                iu = len(order)
                order.append(u)
                index[(p, q, a)] = iu
            # pair with the conjugate basis; record after both are placed
    for (p, q), h in sorted(dec.items()):
        if p < q:
            for a, u in enumerate(dec[(q, p)].rows):
                iu = len(order)
                order.append(vconj(u))
                index[(p, q, a)] = iu
        elif p == q:
            real_basis = _real_points_basis(h)
            for a, u in enumerate(real_basis):
                iu = len(order)
                order.append(u)
                index[(p, q, a)] = iu
    for (p, q), h in sorted(dec.items()):
        if p > q:
            for a in range(h.dim):
                iu = index[(p, q, a)]
                iv = index[(q, p, a)]
                val = I ** (q - p)
                entries.append((iu, iv, val))
                sign = GRat(1) if w % 2 == 0 else GRat(-1)
                entries.append((iv, iu, sign * val))
        elif p == q:
            for a in range(h.dim):
                iu = index[(p, q, a)]
                entries.append((iu, iu, ONE))
    gram_adapted = [[ZERO] * dim for _ in range(dim)]
    for (i, j, v) in entries:
        gram_adapted[i][j] = v
    c = Mat.from_cols(order, nrows=dim)
    cinv = c.inverse()
    gram = cinv.T @ Mat(gram_adapted, dim, dim) @ cinv
    form = GradedForm(w, gram)
    if not verify_polarization(w, form, f):
        raise HodgeError("internal: constructed form fails verification")
    return form


def _real_points_basis(h: Subspace) -> List:
    """Basis of the real points of a conjugation-stable complex subspace."""
    cand = []
    for r in h.rows:
        cand.append(vadd(r, vconj(r)))
        cand.append(vscale(I, vsub_vec(vconj(r), r)))
    real = Subspace.span(h.ambient, cand)
    if real.dim != h.dim or not real.is_real():
        raise HodgeError("subspace is not conjugation stable")
    return list(real.rows)
