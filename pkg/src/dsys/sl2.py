"""SL(2)-orbits: the orbit predicate, the classification as representations
of the product of a torus with n copies of SL(2), and orbit polarizations.

An n-variable system is an SL(2)-orbit when every N_j is fixed by the
conjugation action of tau_k for k < j (and, in the Hodge case, every tau_k
fixes F).  Orbits are equivalent to families (H_{m,k}) of multiplicity
spaces: `decompose` extracts the family as joint kernels and weight
spaces, `reconstruct` rebuilds a system from explicit symmetric-power
matrices, and the round trip returns an explicit isomorphism.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactfield import (
    ExactError, GRat, I, Mat, ONE, Subspace, ZERO, nullspace, vzero,
)
from .filtration import Grading, verify_rmf
from .hodge import (
    DecFiltration, GradedForm, construct_polarization,
    induced_dec_on_graded, is_pure_hs, verify_polarization,
)
from .deligne import DeligneSystem


class OrbitError(ExactError):
    pass


CHECK_POINTS = (Fraction(2), Fraction(3))


def _is_dh(system) -> bool:
    return hasattr(system, "F")


def is_orbit(system) -> bool:
    """Exact fixed-point checks at a = 2 and a = 3 (equivalent to the
    for-all-a statements for weight data)."""
    system.require_valid()
    taus = system.tau().gradings
    n = system.n
    for k in range(n + 1):
        for a in CHECK_POINTS:
            tk = taus[k].evaluate(a)
            tk_inv = taus[k].evaluate(1 / a)
            for j in range(k + 1, n + 1):
                if tk @ system.N[j - 1] @ tk_inv != system.N[j - 1]:
                    return False
    if _is_dh(system):
        for k in range(n + 1):
            for a in CHECK_POINTS:
                if system.F.map_by(taus[k].evaluate(a)) != system.F:
                    return False
    return True


# ---------------------------------------------------------------------------
# lowering partners


def ratio_grading(tau_lo: Grading, tau_hi: Grading) -> Grading:
    """Grading by the weight of tau_hi relative to tau_lo (their joint
    decomposition summed along the difference of weights)."""
    d = tau_lo.ambient
    parts: Dict[int, Subspace] = {}
    for w1, s1 in tau_lo.parts():
        for w2, s2 in tau_hi.parts():
            inter = s1.intersect(s2)
            if inter.dim:
                r = w2 - w1
                parts[r] = parts.get(r, Subspace.zero(d)) + inter
    return Grading.from_parts(d, parts)


def lowering_partner(e: Mat, ratio: Grading) -> Mat:
    """The unique f with [e, f] = h and [h, f] = -2f, where h is minus the
    ratio grading; exists exactly when (e, h) integrates to an SL(2)-action.

    Built chain by chain: bottoms of h-weight -r are the ratio-weight r
    vectors killed by e^{r+1}; on the chain v_i = e^i x the partner acts by
    f v_i = i (r - i + 1) v_{i-1}.
    """
    d = e.rows
    if d == 0:
        return Mat.zero(0, 0)
    chain_vecs: List = []
    chain_f: List = []  # image assignments, aligned with chain_vecs
    rs = [r for r in ratio.weights() if r >= 0]
    powers = [Mat.identity(d)]
    for _ in range(2 * d + 2):
        powers.append(powers[-1] @ e)
    for r in sorted(rs, reverse=True):
        part = ratio.part(r)
        bottoms = part.intersect(nullspace(powers[r + 1]))
        for x in bottoms.rows:
            chain = [x]
            for i in range(1, r + 1):
                chain.append(powers[1].apply(chain[-1]))
            for i, v in enumerate(chain):
                chain_vecs.append(v)
                if i == 0:
                    chain_f.append(vzero(d))
                else:
                    coeff = GRat(Fraction(i * (r - i + 1)))
                    chain_f.append(tuple(coeff * t for t in chain[i - 1]))
    if len(chain_vecs) != d:
        raise OrbitError(
            "chain exhaustion failed: not a semisimple SL(2) pair")
    c = Mat.from_cols(chain_vecs, nrows=d)
    try:
        cinv = c.inverse()
    except ExactError as exc:
        raise OrbitError(f"chain basis is degenerate: {exc}")
    f = Mat.from_cols(chain_f, nrows=d) @ cinv
    # exact defining identities
    h = Mat.zero(d, d)
    for r in ratio.weights():
        h = h + ratio.projector(r).scale(Fraction(-r))
    if e @ f - f @ e != h or h @ f - f @ h != f.scale(Fraction(-2)):
        raise OrbitError("lowering partner fails the bracket identities")
    return f


class RepAction:
    """Evaluation of the group action attached to an orbit.

    The torus factor acts by tau_0; the j-th diagonal torus diag(1/a, a)
    acts by tau_j(a)/tau_{j-1}(a); the upper unipotent generator acts by
    exp(t N_j) and the lower one by exp(t f_j) with f_j the lowering
    partner.  A general determinant-1 matrix is evaluated through its
    triangular factorization (using the Weyl flip when the corner
    vanishes), so rho(a, g) is defined for every rational a != 0 and every
    n-tuple of rational 2x2 matrices of determinant 1.
    """

    def __init__(self, system):
        if not is_orbit(system):
            raise OrbitError("RepAction needs an SL(2)-orbit")
        self.system = system
        self.taus = system.tau().gradings
        self.n = system.n
        self.fs = [lowering_partner(system.N[j],
                                    ratio_grading(self.taus[j],
                                                  self.taus[j + 1]))
                   for j in range(system.n)]

    def _torus(self, j: int, a) -> Mat:
        return self.taus[j + 1].evaluate(a) \
            @ self.taus[j].evaluate(Fraction(1) / Fraction(a))

    def _upper(self, j: int, t) -> Mat:
        return self.system.N[j].scale(Fraction(t)).exp_nilpotent()

    def _lower(self, j: int, t) -> Mat:
        return self.fs[j].scale(Fraction(t)).exp_nilpotent()

    def _factor_evaluate(self, j: int, g) -> Mat:
        (a, b), (c, d) = g
        a, b, c, d = (Fraction(x) for x in (a, b, c, d))
        if a * d - b * c != 1:
            raise OrbitError("matrix is not of determinant 1")
        if a != 0:
            # [[1,0],[c/a,1]] [[a,0],[0,1/a]] [[1,b/a],[0,1]]
            return self._lower(j, c / a) @ self._torus(j, 1 / a) \
                @ self._upper(j, b / a)
        # weyl = [[0,1],[-1,0]] = exp(e) exp(-f) exp(e);  g = (g w^-1) w
        weyl = self._upper(j, 1) @ self._lower(j, -1) @ self._upper(j, 1)
        gw_inv = ((b, -a), (d, -c))
        return self._factor_evaluate(j, gw_inv) @ weyl

    def evaluate(self, a, gs) -> Mat:
        """rho(a, (g_1, ..., g_n)) as a matrix on V."""
        if len(gs) != self.n:
            raise OrbitError("need one SL(2)-element per factor")
        out = self.taus[0].evaluate(Fraction(a))
        for j, g in enumerate(gs):
            out = out @ self._factor_evaluate(j, g)
        return out


# ---------------------------------------------------------------------------
# decomposition into multiplicity spaces


@dataclass
class OrbitComponent:
    m: Tuple[int, ...]
    k: int
    mult_dim: int
    space: Subspace                  # H_{m,k} inside V
    hs: Optional[DecFiltration]      # pure HS of weight k (Hodge case)
    embedding: Mat                   # component coordinates -> V

    @property
    def block_dim(self) -> int:
        out = self.mult_dim
        for mj in self.m:
            out *= (mj + 1)
        return out


@dataclass
class OrbitDecomposition:
    kind: str                        # "deligne" | "dh"
    n: int
    field: str
    components: List[OrbitComponent]

    def family(self) -> Dict[Tuple[Tuple[int, ...], int], OrbitComponent]:
        return {(c.m, c.k): c for c in self.components}

    def total_dim(self) -> int:
        return sum(c.block_dim for c in self.components)

    def isomorphism(self) -> Mat:
        """Columns: embeddings concatenated in component order; this is the
        matrix of the natural map reconstruct(family) -> original system."""
        cols = []
        for c in self.components:
            for j in range(c.embedding.cols):
                cols.append(c.embedding.col(j))
        d = self.components[0].embedding.rows if self.components else 0
        return Mat.from_cols(cols, nrows=d)


def _joint_weight_spaces(taus: Sequence[Grading], space: Subspace):
    """Split a subspace into joint weight pieces of commuting gradings."""
    pieces = [((), space)]
    for g in taus:
        nxt = []
        for ws, s in pieces:
            covered = 0
            for w in g.weights():
                inter = s.intersect(g.part(w))
                if inter.dim:
                    nxt.append((ws + (w,), inter))
                    covered += inter.dim
            if covered != s.dim:
                raise OrbitError("kernel is not graded (not an orbit?)")
        pieces = nxt
    return pieces


def decompose(system) -> OrbitDecomposition:
    """Multiplicity family of an orbit: H_{m,k} is the space of vectors
    killed by every N_j on which tau_j / tau_{j-1} acts with weight -m(j);
    the torus character k is read off tau_0 (plain case) or alpha (Hodge
    case)."""
    if not is_orbit(system):
        raise OrbitError("decompose needs an SL(2)-orbit")
    dh = _is_dh(system)
    taus = system.tau().gradings
    n, d = system.n, system.dim
    kern = Subspace.full(d)
    for nj in system.N:
        kern = kern.intersect(nullspace(nj))
    pieces = _joint_weight_spaces(taus, kern)
    fs = [lowering_partner(system.N[j],
                           ratio_grading(taus[j], taus[j + 1]))
          for j in range(n)]
    comps: List[OrbitComponent] = []
    for cw, space in sorted(pieces, key=lambda t: t[0]):
        m = tuple(cw[j - 1] - cw[j] for j in range(1, n + 1))
        if any(mj < 0 for mj in m):
            raise OrbitError("negative multiplicity index (not an orbit?)")
        k = cw[n] if dh else cw[0]
        hs = None
        if dh:
            hs = system.F.restrict(space)
            if not is_pure_hs(space.dim, k, hs):
                raise OrbitError(
                    "multiplicity space is not pure of the expected weight")
        cols = []
        for a_vec in itertools.product(*(range(mj + 1) for mj in m)):
            word = Mat.identity(d)
            for j, aj in enumerate(a_vec):
                for _ in range(aj):
                    word = fs[j] @ word
            for h in space.rows:
                cols.append(word.apply(h))
        emb = Mat.from_cols(cols, nrows=d)
        comps.append(OrbitComponent(m, k, space.dim, space, hs, emb))
    dec = OrbitDecomposition("dh" if dh else "deligne", n,
                             getattr(system, "field", "rat"), comps)
    if dec.total_dim() != d:
        raise OrbitError("components do not exhaust the space")
    iso = dec.isomorphism()
    try:
        iso.inverse()
    except ExactError:
        raise OrbitError("component embeddings are not independent")
    return dec


# ---------------------------------------------------------------------------
# reconstruction


def _component_matrices(m: Tuple[int, ...], mult_dim: int):
    """e_j matrices on the product basis of Sym^{m(1)} x ... x Sym^{m(n)}
    tensored with the multiplicity space (basis order: a-vector lex outer,
    multiplicity index inner)."""
    sizes = [mj + 1 for mj in m] + [mult_dim]
    total = 1
    for s in sizes:
        total *= s
    idx = {}
    for pos, key in enumerate(itertools.product(*(range(s) for s in sizes))):
        idx[key] = pos
    es = []
    for j in range(len(m)):
        rows = [[ZERO] * total for _ in range(total)]
        for key, pos in idx.items():
            aj = key[j]
            if aj == 0:
                continue
            src = key
            dst = key[:j] + (aj - 1,) + key[j + 1:]
            coeff = GRat(Fraction(aj * (m[j] - aj + 1)))
            rows[idx[dst]][pos] = coeff
        es.append(Mat(rows, total, total))
    return idx, es, total


def reconstruct(kind: str, n: int, family, field: str = "rat"):
    """Build the orbit corresponding to a multiplicity family.

    family: iterable of (m, k, mult) where mult is a dimension (plain case)
    or a DecFiltration describing a pure Hodge structure of weight k.
    """
    if kind not in ("deligne", "dh"):
        raise OrbitError("kind must be 'deligne' or 'dh'")
    entries = []
    for (m, k, mult) in family:
        m = tuple(m)
        if len(m) != n:
            raise OrbitError("multi-index of the wrong length")
        if kind == "dh":
            if not isinstance(mult, DecFiltration):
                raise OrbitError("Hodge family entries carry a filtration")
            if not is_pure_hs(mult.ambient, k, mult):
                raise OrbitError(f"family entry at ({m}, {k}) is not pure")
            entries.append((m, k, mult.ambient, mult))
        else:
            entries.append((m, k, int(mult), None))
    dim = 0
    offsets = []
    blocks = []
    for (m, k, md, hs) in entries:
        idx, es, total = _component_matrices(m, md)
        offsets.append(dim)
        blocks.append((m, k, md, hs, idx, es, total))
        dim += total
    ns = []
    for j in range(n):
        big = Mat.zero(dim, dim)
        rows = [[ZERO] * dim for _ in range(dim)]
        for off, (m, k, md, hs, idx, es, total) in zip(offsets, blocks):
            ej = es[j]
            for a in range(total):
                for b in range(total):
                    if not ej.data[a][b].is_zero():
                        rows[off + a][off + b] = ej.data[a][b]
        ns.append(Mat(rows, dim, dim))
    # tau weights are diagonal on the product basis
    tau_parts: List[Dict[int, List]] = [dict() for _ in range(n + 1)]
    for off, (m, k, md, hs, idx, es, total) in zip(offsets, blocks):
        msum = sum(m)
        for key, pos in idx.items():
            a_vec = key[:-1]
            unit = [ZERO] * dim
            unit[off + pos] = ONE
            unit = tuple(unit)
            for ell in range(n + 1):
                if kind == "dh":
                    c = k + msum + sum(2 * a_vec[j] - m[j]
                                       for j in range(ell))
                else:
                    c = k + sum(2 * a_vec[j] - m[j] for j in range(ell))
                tau_parts[ell].setdefault(c, []).append(unit)
    taus = []
    for ell in range(n + 1):
        parts = {w: Subspace.span(dim, vs)
                 for w, vs in tau_parts[ell].items()}
        taus.append(Grading.from_parts(dim, parts))
    w_filt = taus[0].weight_filtration()
    if kind == "deligne":
        return DeligneSystem(field, dim, n, w_filt, ns, taus[n])
    # Hodge filtration: w_a tensor F_H^q sits in level sum(a) + q
    levels = set()
    for (m, k, md, hs, idx, es, total) in blocks:
        for p in hs.jumps():
            levels.add(p)
            levels.add(p + sum(m))
    if not levels:
        levels = {0}
    lo, hi = min(levels), max(levels) + 1
    f_steps: Dict[int, List] = {p: [] for p in range(lo, hi + 1)}
    for off, (m, k, md, hs, idx, es, total) in zip(offsets, blocks):
        for p in range(lo, hi + 1):
            vecs = f_steps[p]
            for a_vec in itertools.product(*(range(mj + 1) for mj in m)):
                q = p - sum(a_vec)
                for hrow in hs.at(q).rows:
                    v = [ZERO] * dim
                    for i, x in enumerate(hrow):
                        pos = idx[a_vec + (i,)]
                        v[off + pos] = x
                    vecs.append(tuple(v))
    from .dh import DHSystem
    steps = {p: Subspace.span(dim, vs) for p, vs in f_steps.items()}
    steps[hi + 1] = Subspace.zero(dim)
    f = DecFiltration.from_steps(dim, steps)
    return DHSystem(dim, n, w_filt, ns, f)


def roundtrip_isomorphism(system) -> Mat:
    """The isomorphism reconstruct(decompose(X)) -> X, verified to
    intertwine all structure."""
    dec = decompose(system)
    if dec.kind == "dh":
        fam = [(c.m, c.k, c.hs) for c in dec.components]
    else:
        fam = [(c.m, c.k, c.mult_dim) for c in dec.components]
    rebuilt = reconstruct(dec.kind, dec.n, fam, field=dec.field)
    phi = dec.isomorphism()
    _check_isomorphism(rebuilt, system, phi)
    return phi


def _check_isomorphism(src, dst, phi: Mat) -> None:
    phi.inverse()
    for a, b in zip(src.N, dst.N):
        if phi @ a != b @ phi:
            raise OrbitError("isomorphism fails to intertwine the operators")
    if src.W.map_by(phi) != dst.W:
        raise OrbitError("isomorphism does not carry W to W")
    if _is_dh(dst):
        if src.F.map_by(phi) != dst.F:
            raise OrbitError("isomorphism does not carry F to F")
    else:
        if src.alpha.map_by(phi) != dst.alpha:
            raise OrbitError("isomorphism does not carry alpha to alpha")


# ---------------------------------------------------------------------------
# the one-variable collapse statement for orbits


def sl2nm_check(system, ell: int, j: int, k: int,
                ys: Sequence[Fraction]) -> bool:
    """W^(k) is the relative monodromy filtration of sum y_t N_t over
    W^(j), for any nonzero y's (0 <= ell <= j < k <= n)."""
    if not (0 <= ell <= j < k <= system.n):
        raise OrbitError("index bounds: need 0 <= ell <= j < k <= n")
    if len(ys) != k - ell:
        raise OrbitError("need one coefficient per t in (ell, k]")
    if any(Fraction(y) == 0 for y in ys):
        raise OrbitError("coefficients must be nonzero")
    tower = system.tower()
    d = system.dim
    total = Mat.zero(d, d)
    for y, t in zip(ys, range(ell + 1, k + 1)):
        total = total + system.N[t - 1].scale(Fraction(y))
    return verify_rmf(tower[j], total, tower[k]).ok


# ---------------------------------------------------------------------------
# orbit polarization


_SYM_FORM_CACHE: Dict[int, Mat] = {}


def _sym_form(m: int) -> Mat:
    """Invariant form on the m-th symmetric power of the standard
    symplectic plane, oriented so the model orbit is polarized."""
    if m in _SYM_FORM_CACHE:
        return _SYM_FORM_CACHE[m]
    for sign in (Fraction(-1), Fraction(1)):
        gram = Mat([[(GRat(sign * (-1) ** a) if a + b == m else ZERO)
                     for b in range(m + 1)] for a in range(m + 1)],
                   m + 1, m + 1)
        if _sym_model_polarized(m, gram):
            _SYM_FORM_CACHE[m] = gram
            return gram
    raise OrbitError(f"no orientation polarizes Sym^{m}")


def _sym_model_polarized(m: int, gram: Mat) -> bool:
    size = m + 1
    rows = [[ZERO] * size for _ in range(size)]
    for a in range(1, size):
        rows[a - 1][a] = GRat(Fraction(a * (m - a + 1)))
    e = Mat(rows, size, size)
    steps = {}
    for p in range(0, m + 1):
        vecs = []
        for a in range(p, m + 1):
            v = [ZERO] * size
            v[a] = ONE
            vecs.append(tuple(v))
        steps[p] = Subspace.span(size, vecs)
    steps[m + 1] = Subspace.zero(size)
    f = DecFiltration.from_steps(size, steps)
    fy = f.map_by(e.scale(I).exp_nilpotent())
    try:
        return verify_polarization(m, GradedForm(m, gram), fy)
    except ExactError:
        return False


def orbit_polarization(system, samples: Optional[Sequence[Sequence[Fraction]]]
                       = None) -> Dict[int, GradedForm]:
    """Per-weight forms on gr^W: scaled by a^{2w} under every tau_j,
    infinitesimally killed by every N_j, and polarizing
    exp(sum i y_j N_j) F on each graded piece at the sampled y."""
    if not _is_dh(system):
        raise OrbitError("orbit_polarization needs a Hodge-side orbit")
    dec = decompose(system)
    n, d = system.n, system.dim
    if samples is None:
        base = [Fraction(1), Fraction(2), Fraction(1, 2)]
        samples = [[y] * n for y in base] if n else [[]]
    grams: Dict[Tuple[Tuple[int, ...], int], Mat] = {}
    weight_of: Dict[int, List[OrbitComponent]] = {}
    for c in dec.components:
        gram = Mat([[ONE]], 1, 1)
        first = True
        for mj in c.m:
            gram = _sym_form(mj) if first else gram.kron(_sym_form(mj))
            first = False
        hform = construct_polarization(c.k, c.hs)
        gram = hform.gram if first else gram.kron(hform.gram)
        grams[(c.m, c.k)] = gram
        w = c.k + sum(c.m)
        weight_of.setdefault(w, []).append(c)
    taus = system.tau().gradings
    out: Dict[int, GradedForm] = {}
    for w in system.W.jumps():
        q = system.W.graded(w)
        comps = weight_of.get(w, [])
        cols = []
        blocks = []
        for c in comps:
            for jcol in range(c.embedding.cols):
                cols.append(q.project(c.embedding.col(jcol)))
            blocks.append(grams[(c.m, c.k)])
        mmat = Mat.from_cols(cols, nrows=q.dim)
        minv = mmat.inverse()
        big = blocks[0]
        for b in blocks[1:]:
            big = big.direct_sum(b)
        gram = minv.T @ big @ minv
        form = GradedForm(w, gram)
        # exact invariance identities
        for j in range(n + 1):
            for a in CHECK_POINTS:
                tj = q.induced(taus[j].evaluate(a))
                if tj.T @ gram @ tj != gram.scale(GRat(a) ** (2 * w)):
                    raise OrbitError("form fails torus equivariance")
        for nj in system.N:
            ng = q.induced(nj)
            if not (ng.T @ gram + gram @ ng).is_zero():
                raise OrbitError("form fails infinitesimal invariance")
        for y in samples:
            expo = Mat.zero(d, d)
            for yj, nj in zip(y, system.N):
                expo = expo + nj.scale(Fraction(yj))
            fy = system.F.map_by(expo.scale(I).exp_nilpotent())
            fgr = induced_dec_on_graded(fy, system.W, w)
            if not verify_polarization(w, form, fgr):
                raise OrbitError(
                    f"graded piece at w={w} not polarized at y={y}")
        out[w] = form
    return out
