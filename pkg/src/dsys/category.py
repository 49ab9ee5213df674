"""Morphisms of Deligne and Deligne-Hodge systems, kernels and cokernels
with their induced structures, and the tensor-family constructors.

Kernels take the induced (restricted) filtration, operators and grading;
cokernels take the images.  That the results satisfy all the axioms again
is a theorem, so a validation failure here is raised as an alarm rather
than reported.  Tensor, symmetric and exterior powers, duals and twists
follow the usual conventions (weights add; the dual negates weights and
pairs F^p against F^{1-p}; a twist by r shifts W by -2r and F by -r).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict

from .exactfield import (
    ExactError, GRat, Mat, ONE, QuotientMap, Subspace, ZERO, nullspace,
)
from .filtration import Grading, IncFiltration
from .hodge import DecFiltration
from .deligne import DeligneSystem
from .dh import DHSystem


class CategoryError(ExactError):
    pass


class TheoremViolation(CategoryError):
    """An induced object failed validation; must never fire on valid input."""


def _is_dh(system) -> bool:
    return isinstance(system, DHSystem)


def _kind(system) -> str:
    return "dh" if _is_dh(system) else "deligne"


@dataclass
class Morphism:
    source: object
    target: object
    matrix: Mat

    def check(self) -> None:
        a, b = self.source, self.target
        if _kind(a) != _kind(b) or a.n != b.n:
            raise CategoryError("morphism needs systems of the same kind")
        if getattr(a, "field", "rat") != getattr(b, "field", "rat"):
            raise CategoryError("morphism across different scalar fields")
        t = self.matrix
        if t.rows != b.dim or t.cols != a.dim:
            raise CategoryError("morphism matrix has the wrong shape")
        if _kind(a) == "dh" and not t.is_real():
            raise CategoryError("morphisms of Hodge-side systems are real")
        for w in a.W.jumps():
            img = a.W.at(w).image_under(t)
            if not b.W.at(w).contains(img):
                raise CategoryError(f"morphism does not respect W at {w}")
        for na, nb in zip(a.N, b.N):
            if t @ na != nb @ t:
                raise CategoryError("morphism does not intertwine N")
        if _is_dh(a):
            for p in a.F.jumps():
                if not b.F.at(p).contains(a.F.at(p).image_under(t)):
                    raise CategoryError("morphism does not respect F")
        else:
            for x in (Fraction(2), Fraction(3)):
                if t @ a.alpha.evaluate(x) != b.alpha.evaluate(x) @ t:
                    raise CategoryError("morphism does not respect alpha")

    def compose(self, other: "Morphism") -> "Morphism":
        if other.target is not self.source:
            raise CategoryError("composition mismatch")
        return Morphism(other.source, self.target, self.matrix @ other.matrix)


def _restrict_system(system, sub: Subspace):
    """Subobject structure on an invariant subspace, in sub's coordinates."""
    w = system.W.restrict(sub)
    ns = []
    for nj in system.N:
        cols = [sub.coords_of(nj.apply(r)) for r in sub.rows]
        if any(c is None for c in cols):
            raise TheoremViolation("subspace is not stable under N")
        ns.append(Mat.from_cols(cols, nrows=sub.dim))
    if _is_dh(system):
        f = system.F.restrict(sub)
        return DHSystem(sub.dim, system.n, w, ns, f, system.zeta_provider)
    alpha = system.alpha.restrict(sub)
    return DeligneSystem(system.field, sub.dim, system.n, w, ns, alpha)


def _quotient_system(system, sub: Subspace):
    """Quotient structure by an invariant subspace (pivot basis)."""
    q = QuotientMap(Subspace.full(system.dim), sub)
    w_steps = {w: q.project_subspace(system.W.at(w))
               for w in system.W.jumps()}
    if system.W.jumps():
        w = IncFiltration.from_steps(q.dim, w_steps)
    else:
        w = IncFiltration(0, ())
    ns = [q.induced(nj) for nj in system.N]
    if _is_dh(system):
        steps = {p: q.project_subspace(system.F.at(p))
                 for p in system.F.jumps()}
        if steps:
            steps[max(steps) + 1] = Subspace.zero(q.dim)
        f = DecFiltration.from_steps(q.dim, steps)
        return DHSystem(q.dim, system.n, w, ns, f,
                        system.zeta_provider), q
    parts = {}
    for aw, s in system.alpha.parts():
        img = q.project_subspace(s)
        if img.dim:
            parts[aw] = img
    alpha = Grading.from_parts(q.dim, parts)
    return DeligneSystem(system.field, q.dim, system.n, w, ns, alpha), q


def _validated(system, what: str):
    rep = system.validate()
    if not rep.ok:
        raise TheoremViolation(f"{what} fails validation: {rep}")
    return system


def kernel(f: Morphism):
    """Kernel object plus its inclusion; the induced data validates."""
    f.check()
    ker = nullspace(f.matrix)
    obj = _validated(_restrict_system(f.source, ker), "kernel")
    inc = Morphism(obj, f.source, Mat.from_cols(list(ker.rows),
                                                nrows=f.source.dim))
    inc.check()
    return obj, inc


def cokernel(f: Morphism):
    """Cokernel object plus its projection; the induced data validates."""
    f.check()
    img = Subspace.full(f.source.dim).image_under(f.matrix)
    obj, q = _quotient_system(f.target, img)
    _validated(obj, "cokernel")
    cols = [q.project(Mat.identity(f.target.dim).col(j))
            for j in range(f.target.dim)]
    proj = Morphism(f.target, obj, Mat.from_cols(cols, nrows=q.dim))
    proj.check()
    return obj, proj


@dataclass
class AbelianWitness:
    kernel: object
    cokernel: object
    image: object
    coimage: object
    iso: Mat

    @property
    def ok(self) -> bool:
        return True


def abelian_witness(f: Morphism) -> AbelianWitness:
    """Kernel, cokernel, image, coimage, and the canonical isomorphism
    coimage -> image (with exact dimension bookkeeping)."""
    f.check()
    ker_obj, inc = kernel(f)
    cok_obj, proj = cokernel(f)
    img_obj, img_inc = kernel(proj)
    coim_obj, coim_proj = cokernel(inc)
    if ker_obj.dim + img_obj.dim != f.source.dim:
        raise TheoremViolation("rank-nullity bookkeeping failed")
    if img_obj.dim + cok_obj.dim != f.target.dim:
        raise TheoremViolation("image/cokernel bookkeeping failed")
    # canonical map: lift a coimage basis vector, push through f, read off
    # image coordinates
    img_space = Subspace.full(f.source.dim).image_under(f.matrix)
    img_basis = Subspace.span(
        f.target.dim,
        [img_inc.matrix.col(j) for j in range(img_obj.dim)])
    cols = []
    qmap = QuotientMap(Subspace.full(f.source.dim), nullspace(f.matrix))
    for j in range(coim_obj.dim):
        lifted = qmap.lift(tuple(ONE if i == j else ZERO
                                 for i in range(coim_obj.dim)))
        pushed = f.matrix.apply(lifted)
        coords = img_basis.coords_of(pushed)
        if coords is None:
            raise TheoremViolation("image does not contain f(lift)")
        cols.append(coords)
    iso = Mat.from_cols(cols, nrows=img_obj.dim)
    try:
        iso.inverse()
    except ExactError:
        raise TheoremViolation("coimage -> image map is not invertible")
    canonical = Morphism(coim_obj, img_obj, iso)
    canonical.check()
    return AbelianWitness(ker_obj, cok_obj, img_obj, coim_obj, iso)


# ---------------------------------------------------------------------------
# tensor-family constructors


def _tensor_subspace(a: Subspace, b: Subspace, da: int, db: int) -> Subspace:
    rows = []
    for r in a.rows:
        for s in b.rows:
            rows.append(tuple(x * y for x in r for y in s))
    return Subspace.span(da * db, rows)


def tensor(a, b):
    if _kind(a) != _kind(b) or a.n != b.n:
        raise CategoryError("tensor needs systems of the same kind")
    da, db = a.dim, b.dim
    d = da * db
    ia, ib = Mat.identity(da), Mat.identity(db)
    ns = tuple(na.kron(ib) + ia.kron(nb) for na, nb in zip(a.N, b.N))
    w_steps: Dict[int, Subspace] = {}
    aj, bj = a.W.jumps(), b.W.jumps()
    for wa in aj:
        qa = a.W.graded(wa)
        for wb in bj:
            w = wa + wb
            piece = _tensor_subspace(a.W.at(wa), b.W.at(wb), da, db)
            w_steps[w] = w_steps.get(w, Subspace.zero(d)) + piece
    lo = min(w_steps)
    hi = max(w_steps)
    acc = Subspace.zero(d)
    steps = {}
    for w in range(lo, hi + 1):
        if w in w_steps:
            acc = acc + w_steps[w]
        steps[w] = acc
    w_filt = IncFiltration.from_steps(d, steps)
    if _is_dh(a):
        pieces: Dict[int, Subspace] = {}
        pa, pb = a.F.jumps(), b.F.jumps()
        for x in range(pa[0] - 1, pa[-1] + 1):
            for y in range(pb[0] - 1, pb[-1] + 1):
                p = x + y
                piece = _tensor_subspace(a.F.at(x), b.F.at(y), da, db)
                pieces[p] = pieces.get(p, Subspace.zero(d)) + piece
        plo, phi = min(pieces), max(pieces)
        steps_f = {phi + 1: Subspace.zero(d)}
        accf = Subspace.zero(d)
        for p in range(phi, plo - 1, -1):
            if p in pieces:
                accf = accf + pieces[p]
            steps_f[p] = accf
        f = DecFiltration.from_steps(d, steps_f)
        return _validated(DHSystem(d, a.n, w_filt, ns, f, a.zeta_provider),
                          "tensor product")
    parts: Dict[int, Subspace] = {}
    for wa, sa in a.alpha.parts():
        for wb, sb in b.alpha.parts():
            w = wa + wb
            piece = _tensor_subspace(sa, sb, da, db)
            parts[w] = parts.get(w, Subspace.zero(d)) + piece
    alpha = Grading.from_parts(d, parts)
    return _validated(
        DeligneSystem(a.field, d, a.n, w_filt, ns, alpha), "tensor product")


def _tensor_power(a, m: int):
    out = a
    for _ in range(m - 1):
        out = tensor(out, a)
    return out


def _symmetrizer(d: int, m: int, sign: bool) -> Mat:
    """Projection of the m-th tensor power onto Sym^m (or the alternating
    part when sign is set)."""
    dim = d ** m
    rows = [[ZERO] * dim for _ in range(dim)]
    fact = Fraction(1)
    for k in range(2, m + 1):
        fact *= k
    for idx in itertools.product(range(d), repeat=m):
        src = 0
        for i in idx:
            src = src * d + i
        for perm in itertools.permutations(range(m)):
            dst_idx = tuple(idx[perm[i]] for i in range(m))
            dst = 0
            for i in dst_idx:
                dst = dst * d + i
            sgn = Fraction(1)
            if sign:
                sgn = Fraction(_perm_sign(perm))
            rows[dst][src] = rows[dst][src] + GRat(sgn / fact)
    return Mat(rows, dim, dim)


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _power_subobject(a, m: int, sign: bool, what: str):
    if m < 1:
        raise CategoryError("power needs m >= 1")
    if m == 1:
        return a
    big = _tensor_power(a, m)
    proj = _symmetrizer(a.dim, m, sign)
    sub = Subspace.full(big.dim).image_under(proj)
    return _validated(_restrict_system(big, sub), what)


def sym(a, m: int):
    return _power_subobject(a, m, False, "symmetric power")


def wedge(a, m: int):
    return _power_subobject(a, m, True, "exterior power")


def dual(a):
    d = a.dim
    ns = tuple((-nj).T for nj in a.N)
    w_steps = {}
    jumps = a.W.jumps()
    for w in range(-jumps[-1], -jumps[0] + 1) if jumps else ():
        ann = a.W.at(-w - 1).annihilator()
        w_steps[w] = Subspace.span(d, list(ann.data))
    w_filt = IncFiltration.from_steps(d, w_steps) if jumps \
        else IncFiltration(0, ())
    if _is_dh(a):
        f_steps = {}
        fj = a.F.jumps()
        for p in range(1 - fj[-1], 1 - fj[0] + 2):
            ann = a.F.at(1 - p).annihilator()
            f_steps[p] = Subspace.span(d, list(ann.data))
        f = DecFiltration.from_steps(d, f_steps)
        return _validated(DHSystem(d, a.n, w_filt, ns, f, a.zeta_provider),
                          "dual")
    parts = {}
    for w, s in a.alpha.parts():
        proj = a.alpha.projector(w)
        parts[-w] = Subspace.full(d).image_under(proj.T)
    alpha = Grading.from_parts(d, parts)
    return _validated(DeligneSystem(a.field, d, a.n, w_filt, ns, alpha),
                      "dual")


def tate(a, r: int):
    """Twist by r: W shifts by -2r, F by -r, grading weights by -2r."""
    w_filt = a.W.shift(-2 * r)
    if _is_dh(a):
        return _validated(
            DHSystem(a.dim, a.n, w_filt, a.N, a.F.shift(-r),
                     a.zeta_provider), "twist")
    alpha = a.alpha.shift_weights(-2 * r)
    return _validated(
        DeligneSystem(a.field, a.dim, a.n, w_filt, a.N, alpha), "twist")


def direct_sum(a, b):
    if _kind(a) != _kind(b) or a.n != b.n:
        raise CategoryError("direct sum needs systems of the same kind")
    da, db = a.dim, b.dim
    d = da + db

    def emb(s: Subspace, first: bool) -> Subspace:
        rows = []
        for r in s.rows:
            if first:
                rows.append(tuple(r) + tuple([ZERO] * db))
            else:
                rows.append(tuple([ZERO] * da) + tuple(r))
        return Subspace.span(d, rows)

    ns = tuple(na.direct_sum(nb) for na, nb in zip(a.N, b.N))
    ws = sorted(set(a.W.jumps()) | set(b.W.jumps()))
    w_filt = IncFiltration.from_steps(
        d, {w: emb(a.W.at(w), True) + emb(b.W.at(w), False) for w in ws})
    if _is_dh(a):
        ps = sorted(set(a.F.jumps()) | set(b.F.jumps()))
        f = DecFiltration.from_steps(
            d, {p: emb(a.F.at(p), True) + emb(b.F.at(p), False) for p in ps})
        return DHSystem(d, a.n, w_filt, ns, f, a.zeta_provider)
    parts: Dict[int, Subspace] = {}
    for w, s in a.alpha.parts():
        parts[w] = parts.get(w, Subspace.zero(d)) + emb(s, True)
    for w, s in b.alpha.parts():
        parts[w] = parts.get(w, Subspace.zero(d)) + emb(s, False)
    return DeligneSystem(a.field, d, a.n, w_filt, ns,
                         Grading.from_parts(d, parts))


from .deligne import restrict_scalars, scalar_change  # noqa: E402  (re-export)
