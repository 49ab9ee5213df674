"""Increasing filtrations, gradings, and relative monodromy filtrations.

The relative monodromy filtration of a nilpotent operator N with respect
to an increasing filtration W is the unique filtration W' (it need not
exist) with

  (i)  N W'_w <= W'_{w-2},
  (ii) N^m : gr^{W'}_{w+m} gr^W_w -> gr^{W'}_{w-m} gr^W_w  an isomorphism
       for all w and m >= 0.

`verify_rmf` checks (i) and (ii) exactly; `compute_rmf` constructs a
candidate (pure case: two-sided kernel/image formula; mixed case: a
recursion over the top weight with an exact correction solve) and then
re-verifies it, so a returned filtration is always certified.
"""
from __future__ import annotations

from fractions import Fraction
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .exactfield import (
    DimensionMismatch, ExactError, GRat, Mat, ONE, QuotientMap, Rat,
    Subspace, ZERO, grat, nullspace, pivot_complement, solve_linear, vadd,
    vscale, vzero,
)


class FiltrationError(ExactError):
    pass


class IncFiltration:
    """Finite increasing filtration; 0 far below, the full space far above."""

    __slots__ = ("ambient", "_jumps", "_graded")

    def __init__(self, ambient: int, jumps: Tuple[Tuple[int, Subspace], ...]):
        self.ambient = ambient
        self._jumps = jumps
        self._graded: Dict[int, QuotientMap] = {}

    @staticmethod
    def from_steps(ambient: int, steps: Dict[int, Subspace]) -> "IncFiltration":
        items = sorted(steps.items())
        prev = Subspace.zero(ambient)
        jumps = []
        for w, s in items:
            if s.ambient != ambient:
                raise DimensionMismatch("filtration step in wrong space")
            if not s.contains(prev):
                raise FiltrationError(f"filtration is not increasing at {w}")
            if s.dim > prev.dim:
                jumps.append((w, s))
            prev = s
        if prev.dim != ambient:
            raise FiltrationError("top filtration step is not the full space")
        return IncFiltration(ambient, tuple(jumps))

    @staticmethod
    def pure(ambient: int, w: int) -> "IncFiltration":
        if ambient == 0:
            return IncFiltration(0, ())
        return IncFiltration(ambient, ((w, Subspace.full(ambient)),))

    def jumps(self) -> Tuple[int, ...]:
        return tuple(w for w, _ in self._jumps)

    def at(self, w: int) -> Subspace:
        res = Subspace.zero(self.ambient)
        for jw, s in self._jumps:
            if jw <= w:
                res = s
            else:
                break
        return res

    def min_jump(self) -> Optional[int]:
        return self._jumps[0][0] if self._jumps else None

    def max_jump(self) -> Optional[int]:
        return self._jumps[-1][0] if self._jumps else None

    def graded(self, w: int) -> QuotientMap:
        """Quotient map W_w -> W_w / W_{w-1} with its canonical pivot basis."""
        if w not in self._graded:
            self._graded[w] = QuotientMap(self.at(w), self.at(w - 1))
        return self._graded[w]

    def graded_dims(self) -> Dict[int, int]:
        out = {}
        prev = 0
        for w, s in self._jumps:
            out[w] = s.dim - prev
            prev = s.dim
        return out

    def restrict(self, u: Subspace) -> "IncFiltration":
        """Filtration W_w ∩ U written in the coordinates of U's basis."""
        steps = {}
        for w, s in self._jumps:
            inter = s.intersect(u)
            steps[w] = Subspace.span(
                u.dim, [u.coords_of(r) for r in inter.rows])
        if not self._jumps:
            return IncFiltration(u.dim, ())
        return IncFiltration.from_steps(u.dim, steps)

    def map_by(self, m: Mat) -> "IncFiltration":
        """Image filtration under an isomorphism."""
        steps = {w: s.image_under(m) for w, s in self._jumps}
        return IncFiltration.from_steps(m.rows, steps)

    def shift(self, k: int) -> "IncFiltration":
        return IncFiltration(self.ambient,
                             tuple((w + k, s) for w, s in self._jumps))

    def is_real(self) -> bool:
        return all(s.is_real() for _, s in self._jumps)

    def __eq__(self, other):
        if not isinstance(other, IncFiltration):
            return NotImplemented
        return (self.ambient, self._jumps) == (other.ambient, other._jumps)

    def __hash__(self):
        return hash((self.ambient, self._jumps))

    def __repr__(self):
        body = ", ".join(f"{w}:{s.dim}" for w, s in self._jumps)
        return f"IncFiltration({self.ambient}; {body})"


class Grading:
    """Direct-sum decomposition of Q(i)^n indexed by integer weights.

    Equivalently an action of the multiplicative group: a acts by a^w on
    the weight-w part.
    """

    __slots__ = ("ambient", "_parts", "_projectors")

    def __init__(self, ambient: int, parts: Tuple[Tuple[int, Subspace], ...]):
        self.ambient = ambient
        self._parts = parts
        self._projectors: Dict[int, Mat] = {}

    @staticmethod
    def from_parts(ambient: int, parts: Dict[int, Subspace]) -> "Grading":
        items = tuple(sorted((w, s) for w, s in parts.items() if s.dim > 0))
        total = 0
        running = Subspace.zero(ambient)
        for w, s in items:
            if s.ambient != ambient:
                raise DimensionMismatch("grading part in wrong space")
            total += s.dim
            running = running + s
        if total != ambient or running.dim != ambient:
            raise FiltrationError("grading parts do not decompose the space")
        return Grading(ambient, items)

    @staticmethod
    def trivial(ambient: int, w: int = 0) -> "Grading":
        if ambient == 0:
            return Grading(0, ())
        return Grading(ambient, ((w, Subspace.full(ambient)),))

    def weights(self) -> Tuple[int, ...]:
        return tuple(w for w, _ in self._parts)

    def part(self, w: int) -> Subspace:
        for pw, s in self._parts:
            if pw == w:
                return s
        return Subspace.zero(self.ambient)

    def parts(self) -> Tuple[Tuple[int, Subspace], ...]:
        return self._parts

    def _basis_change(self) -> Tuple[Mat, Mat]:
        cols = []
        for _, s in self._parts:
            cols.extend(s.rows)
        c = Mat.from_cols(cols)
        return c, c.inverse()

    def projector(self, w: int) -> Mat:
        if w not in self._projectors:
            if not self._parts:
                self._projectors[w] = Mat.zero(self.ambient, self.ambient)
            else:
                c, cinv = self._basis_change()
                sel_rows = []
                pos = 0
                for pw, s in self._parts:
                    for _ in range(s.dim):
                        sel_rows.append(pw == w)
                        pos += 1
                sel = Mat([[ONE if (i == j and sel_rows[i]) else ZERO
                            for j in range(self.ambient)]
                           for i in range(self.ambient)])
                self._projectors[w] = c @ sel @ cinv
        return self._projectors[w]

    def evaluate(self, a) -> Mat:
        """The action of a (nonzero rational) on the graded space."""
        a = grat(a)
        if a.is_zero():
            raise FiltrationError("grading evaluated at 0")
        out = Mat.zero(self.ambient, self.ambient)
        for w, _ in self._parts:
            out = out + self.projector(w).scale(a ** w)
        return out

    def component(self, m: Mat, k: int) -> Mat:
        """Weight-k component of an operator: maps part w into part w+k."""
        out = Mat.zero(self.ambient, self.ambient)
        for w, _ in self._parts:
            out = out + self.projector(w + k) @ m @ self.projector(w)
        return out

    def has_pure_weight(self, m: Mat, k: int) -> bool:
        return self.component(m, k) == m

    def weight_filtration(self) -> IncFiltration:
        steps = {}
        acc = Subspace.zero(self.ambient)
        for w, s in self._parts:
            acc = acc + s
            steps[w] = acc
        if not self._parts:
            return IncFiltration(self.ambient, ())
        return IncFiltration.from_steps(self.ambient, steps)

    def splits(self, w_filt: IncFiltration) -> bool:
        return self.weight_filtration() == w_filt

    def stabilizes(self, s: Subspace) -> bool:
        acc = Subspace.zero(self.ambient)
        for _, part in self._parts:
            acc = acc + s.intersect(part)
        return acc == s

    def commutes_with(self, other: "Grading") -> bool:
        for w, _ in self._parts:
            p = self.projector(w)
            for v, _ in other.parts():
                q = other.projector(v)
                if p @ q != q @ p:
                    return False
        return True

    def restrict(self, u: Subspace) -> "Grading":
        parts = {}
        for w, s in self._parts:
            inter = s.intersect(u)
            if inter.dim:
                parts[w] = Subspace.span(
                    u.dim, [u.coords_of(r) for r in inter.rows])
        return Grading.from_parts(u.dim, parts)

    def map_by(self, m: Mat) -> "Grading":
        return Grading.from_parts(
            m.rows, {w: s.image_under(m) for w, s in self._parts})

    def shift_weights(self, k: int) -> "Grading":
        return Grading(self.ambient, tuple((w + k, s) for w, s in self._parts))

    def splitting_map(self, w_filt: IncFiltration) -> Mat:
        """Matrix gr^W -> V sending the canonical graded basis of W into the
        weight spaces; requires that the grading splits w_filt."""
        if not self.splits(w_filt):
            raise FiltrationError("grading does not split the filtration")
        cols: List = []
        for w in w_filt.jumps():
            q = w_filt.graded(w)
            part = self.part(w)
            for r in q.reps:
                # unique vector of the weight space with the same class
                target = q.project(r)
                sol = solve_linear(
                    Mat([q.project(b) for b in part.rows], part.dim, q.dim).T
                    if part.dim else Mat.zero(q.dim, 0),
                    target)
                if sol is None:
                    raise FiltrationError("splitting_map: inconsistent data")
                v = vzero(self.ambient)
                for c, b in zip(sol, part.rows):
                    v = vadd(v, vscale(c, b))
                cols.append(v)
        return Mat.from_cols(cols)

    def __eq__(self, other):
        if not isinstance(other, Grading):
            return NotImplemented
        return (self.ambient, self._parts) == (other.ambient, other._parts)

    def __hash__(self):
        return hash((self.ambient, self._parts))

    def __repr__(self):
        body = ", ".join(f"{w}:{s.dim}" for w, s in self._parts)
        return f"Grading({self.ambient}; {body})"


def weight_filtration_of(grading: Grading) -> IncFiltration:
    return grading.weight_filtration()


def respects(n: Mat, w: IncFiltration) -> bool:
    return all(s.contains(s.image_under(n)) for _, s in w._jumps)


def monodromy_filtration(n: Mat, center: int = 0) -> IncFiltration:
    """Weight filtration of a nilpotent operator, centered at `center`.

    M_k = sum over i - j = k (i, j >= 0) of ker N^{i+1} ∩ im N^j.
    """
    d = n.rows
    if d == 0:
        return IncFiltration(0, ())
    if not n.is_nilpotent():
        raise FiltrationError("operator is not nilpotent")
    powers = [Mat.identity(d)]
    while not powers[-1].is_zero():
        powers.append(powers[-1] @ n)
    depth = len(powers) - 1  # N^depth = 0
    kers = [nullspace(p) for p in powers]          # ker N^j
    ims = [Subspace.full(d).image_under(p) for p in powers]  # im N^j
    steps = {}
    lo, hi = -depth + 1, depth - 1
    for k in range(lo, hi + 1):
        acc = Subspace.zero(d)
        for j in range(0, depth + 1):
            i = j + k
            if i < 0 or i + 1 > depth:
                continue
            acc = acc + kers[i + 1].intersect(ims[j])
        steps[center + k] = acc
    steps[center + max(hi, 0)] = Subspace.full(d)
    return IncFiltration.from_steps(d, steps)


def induced_on_graded(f: IncFiltration, w_filt: IncFiltration,
                      w: int) -> IncFiltration:
    """Filtration (F_k ∩ W_w + W_{w-1}) / W_{w-1} on gr^W_w, in the canonical
    basis recorded by w_filt.graded(w)."""
    q = w_filt.graded(w)
    if q.dim == 0:
        return IncFiltration(0, ())
    ww = w_filt.at(w)
    steps = {}
    for k in f.jumps():
        steps[k] = q.project_subspace(f.at(k).intersect(ww))
    top = max(f.jumps())
    steps[top] = Subspace.full(q.dim)
    return IncFiltration.from_steps(q.dim, steps)


@dataclass
class RmfReport:
    ok: bool
    failures: List[str]

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "rmf: ok"
        return "rmf: FAIL [" + "; ".join(self.failures) + "]"


def _bigraded_data(w_filt: IncFiltration, wp: IncFiltration, n: Mat, w: int):
    """Per-weight data for condition (ii): the graded quotient at w, the
    induced wp-filtration on it, and the induced nilpotent."""
    q = w_filt.graded(w)
    ind = induced_on_graded(wp, w_filt, w)
    n_gr = q.induced(n)
    return q, ind, n_gr


def _piece(ind: IncFiltration, level: int) -> QuotientMap:
    return QuotientMap(ind.at(level), ind.at(level - 1))


def _induced_power_map(ind: IncFiltration, n_gr: Mat, src: int, dst: int,
                       m: int) -> Optional[Mat]:
    """Matrix of N^m from the level-src piece to the level-dst piece of the
    induced filtration, or None if N^m does not map into the dst step."""
    p_src = _piece(ind, src)
    p_dst = _piece(ind, dst)
    nm = n_gr.pow(m) if m else Mat.identity(n_gr.rows)
    cols = []
    for r in p_src.reps:
        img = nm.apply(r)
        if not ind.at(dst).contains_vector(img):
            return None
        cols.append(p_dst.project(img))
    return Mat.from_cols(cols, nrows=p_dst.dim)


def verify_rmf(w_filt: IncFiltration, n: Mat, wp: IncFiltration) -> RmfReport:
    """Check conditions (i) and (ii); the report names the first violations."""
    if not respects(n, w_filt):
        raise FiltrationError("operator does not respect the base filtration")
    failures = []
    for w in wp.jumps():
        img = wp.at(w).image_under(n)
        if not wp.at(w - 2).contains(img):
            failures.append(f"(i) at w={w}")
            break
    if wp.ambient != w_filt.ambient:
        raise DimensionMismatch("verify_rmf")
    wps = wp.jumps()
    for w in w_filt.jumps():
        q, ind, n_gr = _bigraded_data(w_filt, wp, n, w)
        if q.dim == 0:
            continue
        # every m with a nonzero piece on either side of the center
        m_max = max(wps[-1] - w, w - wps[0], 0) if wps else 0
        for m in range(0, m_max + 1):
            up = _piece(ind, w + m)
            down = _piece(ind, w - m)
            if up.dim == 0 and down.dim == 0:
                continue
            mat = _induced_power_map(ind, n_gr, w + m, w - m, m)
            if mat is None or up.dim != down.dim or mat.rank() != up.dim:
                failures.append(f"(ii) at w={w}, m={m}")
                break
    return RmfReport(not failures, failures)


def _restrict_operator(n: Mat, u: Subspace) -> Mat:
    cols = []
    for r in u.rows:
        img = n.apply(r)
        c = u.coords_of(img)
        if c is None:
            raise FiltrationError("operator does not preserve the subspace")
        cols.append(c)
    return Mat.from_cols(cols) if cols else Mat.zero(0, 0)


def compute_rmf(w_filt: IncFiltration, n: Mat) -> Optional[IncFiltration]:
    """Relative monodromy filtration of n with respect to w_filt, or None
    when the recursive construction finds no candidate.

    The result, when not None, has passed verify_rmf.
    """
    d = w_filt.ambient
    if n.rows != d or n.cols != d:
        raise DimensionMismatch("compute_rmf")
    if not n.is_nilpotent():
        raise FiltrationError("operator is not nilpotent")
    if not respects(n, w_filt):
        raise FiltrationError("operator does not respect the filtration")
    cand = _compute_rmf_rec(w_filt, n)
    if cand is None:
        return None
    rep = verify_rmf(w_filt, n, cand)
    if not rep.ok:
        raise FiltrationError(
            f"internal error: constructed candidate fails verification ({rep})")
    return cand


def _compute_rmf_rec(w_filt: IncFiltration, n: Mat) -> Optional[IncFiltration]:
    d = w_filt.ambient
    if d == 0:
        return IncFiltration(0, ())
    jumps = w_filt.jumps()
    if len(jumps) == 1:
        return monodromy_filtration(n, center=jumps[0])
    wtop = jumps[-1]
    u = w_filt.at(jumps[-2])
    # recurse on U = W_{wtop - 1}
    n_u = _restrict_operator(n, u)
    wpp = _compute_rmf_rec(w_filt.restrict(u), n_u)
    if wpp is None:
        return None
    # monodromy filtration on the top graded quotient
    q = QuotientMap(Subspace.full(d), u)
    nbar = q.induced(n)
    m_filt = monodromy_filtration(nbar, center=wtop)
    # adapted basis of V/U by m-levels
    adapted = []  # (level, vector in quotient coords)
    prev = Subspace.zero(q.dim)
    for lvl in m_filt.jumps():
        cur = m_filt.at(lvl)
        for r in pivot_complement(prev, cur):
            adapted.append((lvl, r))
        prev = cur
    # solve for the correction h : V/U -> U
    udim = u.dim
    qdim = q.dim
    nunk = udim * qdim
    rows: List[List[GRat]] = []
    rhs: List[GRat] = []
    for lvl, v in adapted:
        sigma_v = q.lift(v)
        c_v = u.coords_of(
            vadd(n.apply(sigma_v), vscale(GRat(-1), q.lift(nbar.apply(v)))))
        if c_v is None:
            raise FiltrationError("compute_rmf: section defect left U")
        nbar_v = nbar.apply(v)
        k_mat = _constraints_in_coords(wpp.at(lvl - 2), udim)
        for krow in k_mat.data:
            row = [ZERO] * nunk
            val = ZERO
            for iu in range(udim):
                if krow[iu].is_zero():
                    continue
                val = val + krow[iu] * c_v[iu]
                # + K . N_U h v  and  - K . h nbar(v)
                for jv in range(qdim):
                    if not v[jv].is_zero():
                        for tu in range(udim):
                            coef = krow[iu] * n_u.data[iu][tu] * v[jv]
                            if not coef.is_zero():
                                row[tu * qdim + jv] = row[tu * qdim + jv] + coef
                for jv in range(qdim):
                    if not nbar_v[jv].is_zero():
                        row[iu * qdim + jv] = row[iu * qdim + jv] \
                            - krow[iu] * nbar_v[jv]
            rows.append(row)
            rhs.append(-val)
    if rows:
        sol = solve_linear(Mat(rows, len(rows), nunk), tuple(rhs))
        if sol is None:
            return None
        h = Mat([[sol[iu * qdim + jv] for jv in range(qdim)]
                 for iu in range(udim)], udim, qdim)
    else:
        h = Mat.zero(udim, qdim)

    def lift_corrected(v):
        base = q.lift(v)
        corr = h.apply(v)
        out = base
        for c, br in zip(corr, u.rows):
            out = vadd(out, vscale(c, br))
        return out

    levels = sorted(set(wpp.jumps()) | set(m_filt.jumps()))
    steps = {}
    for lvl in levels:
        vecs = []
        for r in wpp.at(lvl).rows:
            amb = vzero(d)
            for c, br in zip(r, u.rows):
                amb = vadd(amb, vscale(c, br))
            vecs.append(amb)
        for r in m_filt.at(lvl).rows:
            vecs.append(lift_corrected(r))
        steps[lvl] = Subspace.span(d, vecs)
    return IncFiltration.from_steps(d, steps)


def _constraints_in_coords(target: Subspace, dim: int) -> Mat:
    """Constraint matrix K with target = ker K inside Q(i)^dim."""
    if target.ambient != dim:
        raise DimensionMismatch("_constraints_in_coords")
    return target.annihilator()


# ---------------------------------------------------------------------------
# Hom(V, V) machinery (row-major flattening)

def mat_to_vec(m: Mat):
    return tuple(x for row in m.data for x in row)


def vec_to_mat(v, d: int) -> Mat:
    return Mat([[v[i * d + j] for j in range(d)] for i in range(d)], d, d)


def ad_matrix(n: Mat) -> Mat:
    """Matrix of f -> [n, f] on row-major flattened Hom(V, V)."""
    d = n.rows
    return n.kron(Mat.identity(d)) - Mat.identity(d).kron(n.T)


def hom_induced(w_filt: IncFiltration) -> IncFiltration:
    """Filtration on Hom(V, V): level k maps W_w into W_{w+k} for all w."""
    d = w_filt.ambient
    hd = d * d
    if d == 0:
        return IncFiltration(0, ())
    jumps = w_filt.jumps()
    lo = jumps[0] - jumps[-1]
    hi = jumps[-1] - jumps[0]
    steps = {}
    for k in range(lo, hi + 1):
        rows = []
        for w in jumps:
            kk = w_filt.at(w + k).annihilator()
            for u in w_filt.at(w).rows:
                for krow in kk.data:
                    row = [ZERO] * hd
                    for i in range(d):
                        if krow[i].is_zero():
                            continue
                        for j in range(d):
                            if not u[j].is_zero():
                                row[i * d + j] = row[i * d + j] + krow[i] * u[j]
                    rows.append(row)
        steps[k] = nullspace(Mat(rows, len(rows), hd)) if rows \
            else Subspace.full(hd)
    steps[hi] = Subspace.full(hd)
    return IncFiltration.from_steps(hd, steps)


def hom_grading(g: Grading) -> Grading:
    """Grading on flattened Hom(V, V) induced by a grading on V."""
    d = g.ambient
    parts = {}
    ws = g.weights()
    for w1 in ws:
        for w2 in ws:
            k = w1 - w2
            pi = g.projector(w1).kron(g.projector(w2).T)
            img = Subspace.full(d * d).image_under(pi)
            if img.dim:
                parts[k] = parts.get(k, Subspace.zero(d * d)) + img
    return Grading.from_parts(d * d, parts)


# ---------------------------------------------------------------------------
# primitive components

@dataclass
class PrimitivePiece:
    """Decomposition A ⊕ B of the bigraded piece gr^{W'}_{w+m} gr^W_w.

    A is the kernel of N^{m+1} into level w-m-2 (the primitive component);
    B is the image of N from level w+m+2.  Coordinates are those of the
    piece's canonical quotient basis.
    """
    dim: int
    primitive: Subspace
    image_part: Subspace

    def is_direct_sum(self) -> bool:
        return (self.primitive.intersect(self.image_part).dim == 0
                and (self.primitive + self.image_part).dim == self.dim)


def primitive_component(w_filt: IncFiltration, n: Mat, wp: IncFiltration,
                        w: int, m: int) -> PrimitivePiece:
    if m < 0:
        raise FiltrationError("primitive_component needs m >= 0")
    rep = verify_rmf(w_filt, n, wp)
    if not rep.ok:
        raise FiltrationError(f"wp is not the relative monodromy filtration: {rep}")
    q, ind, n_gr = _bigraded_data(w_filt, wp, n, w)
    piece = _piece(ind, w + m)
    if piece.dim == 0:
        z = Subspace.zero(0)
        return PrimitivePiece(0, z, z)
    down = _induced_power_map(ind, n_gr, w + m, w - m - 2, m + 1)
    if down is None:
        raise FiltrationError("condition (i) fails; cannot form N^{m+1}")
    a = nullspace(down)
    up = _induced_power_map(ind, n_gr, w + m + 2, w + m, 1)
    if up is None:
        raise FiltrationError("condition (i) fails; cannot form N")
    b = Subspace.full(_piece(ind, w + m + 2).dim).image_under(up) \
        if up.cols else Subspace.zero(piece.dim)
    return PrimitivePiece(piece.dim, a, b)


def bigraded_class(w_filt: IncFiltration, wp: IncFiltration, w: int,
                   level: int, v) -> Optional[tuple]:
    """Class of an ambient vector v in gr^{Wp}_level gr^W_w, or None if v is
    not in W_w + nothing (i.e. outside the step)."""
    q = w_filt.graded(w)
    if not w_filt.at(w).contains_vector(v):
        return None
    ind = induced_on_graded(wp, w_filt, w)
    cls = q.project(v)
    if not ind.at(level).contains_vector(cls):
        return None
    return _piece(ind, level).project(cls)
