"""Deligne systems of n variables.

A Deligne system is (V, W, N_1..N_n, alpha): commuting nilpotents
respecting W, a tower W = W^(0), W^(1), ..., W^(n) in which each W^(j) is
the relative monodromy filtration of N_j over W^(j-1) (stable under
restriction to every step of every earlier filtration), and a grading
alpha splitting W^(n) for which every N_j has weight -2.

The module also computes the unique commuting tuple tau_0..tau_n of
gradings attached to such a system (tau_n = alpha; each tau_{j-1} is the
grading produced by the one-variable splitting theorem applied to
(V, W^(j-1), N_j, tau_j)), the weight-0 parts Nhat_j of the N_j, and the
associated SL(2)-orbit (V, W, Nhat_1..Nhat_n, alpha).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactfield import (
    ExactError, Mat, Subspace, ZERO, nullspace, pivot_complement,
    realify_matrix, realify_subspace, solve_linear,
)
from .filtration import (
    FiltrationError, Grading, IncFiltration, compute_rmf,
    respects, verify_rmf, weight_filtration_of,
)


class DeligneError(ExactError):
    pass


class InvalidSystem(DeligneError):
    def __init__(self, report):
        super().__init__(str(report))
        self.report = report


class TauConstructionError(DeligneError):
    """The splitting iteration could not be completed (invalid input)."""


@dataclass
class CheckEntry:
    axiom: str
    ok: bool
    detail: str = ""


@dataclass
class ValidationReport:
    entries: List[CheckEntry]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def failures(self) -> List[CheckEntry]:
        return [e for e in self.entries if not e.ok]

    def __str__(self):
        lines = []
        for e in self.entries:
            status = "pass" if e.ok else "FAIL"
            detail = f" [{e.detail}]" if e.detail and not e.ok else ""
            lines.append(f"axiom {e.axiom}: {status}{detail}")
        return "\n".join(lines)


def validate_core(w_filt: IncFiltration, ns: Sequence[Mat]):
    """Conditions (a)-(d) shared by Deligne and DH systems.

    Returns (entries, tower); tower is None when (b) fails.
    """
    entries: List[CheckEntry] = []
    d = w_filt.ambient
    n = len(ns)
    ok_a = True
    for j, nj in enumerate(ns, 1):
        if nj.rows != d or nj.cols != d:
            raise DeligneError(f"N_{j} has the wrong shape")
        if not nj.is_nilpotent():
            entries.append(CheckEntry("(a)", False, f"N_{j} is not nilpotent"))
            ok_a = False
        if not respects(nj, w_filt):
            entries.append(CheckEntry("(a)", False,
                                      f"N_{j} does not respect W"))
            ok_a = False
    for i in range(n):
        for j in range(i + 1, n):
            if ns[i] @ ns[j] != ns[j] @ ns[i]:
                entries.append(CheckEntry(
                    "(a)", False, f"N_{i+1} and N_{j+1} do not commute"))
                ok_a = False
    if ok_a:
        entries.append(CheckEntry("(a)", True))
    else:
        return entries, None
    # (b): the tower of relative monodromy filtrations
    tower = [w_filt]
    for j, nj in enumerate(ns, 1):
        nxt = compute_rmf(tower[-1], nj)
        if nxt is None:
            entries.append(CheckEntry(
                "(b)", False,
                f"relative monodromy filtration of N_{j} over W^({j-1}) "
                "does not exist"))
            return entries, None
        tower.append(nxt)
    entries.append(CheckEntry("(b)", True))
    # (c): restriction stability for k < j - 1
    ok_c = True
    for j in range(1, n + 1):
        for k in range(0, j - 1):
            for w in tower[k].jumps():
                u = tower[k].at(w)
                if u.dim == 0 or u.dim == d:
                    continue
                try:
                    rep = verify_rmf(tower[j - 1].restrict(u),
                                     _restrict_operator(ns[j - 1], u),
                                     tower[j].restrict(u))
                except FiltrationError as exc:
                    ok_c = False
                    entries.append(CheckEntry(
                        "(c)", False, f"j={j}, k={k}, w={w}: {exc}"))
                    continue
                if not rep.ok:
                    ok_c = False
                    entries.append(CheckEntry(
                        "(c)", False, f"j={j}, k={k}, w={w}: {rep.failures}"))
    if ok_c:
        entries.append(CheckEntry("(c)", True))
    # (d)
    ok_d = True
    for j, nj in enumerate(ns, 1):
        for k in range(0, n + 1):
            for w in tower[k].jumps():
                img = tower[k].at(w).image_under(nj)
                if not tower[k].at(w).contains(img):
                    ok_d = False
                    entries.append(CheckEntry(
                        "(d)", False, f"N_{j} does not preserve W^({k})_{w}"))
                elif k >= j and not tower[k].at(w - 2).contains(img):
                    ok_d = False
                    entries.append(CheckEntry(
                        "(d)", False,
                        f"N_{j} W^({k})_{w} not inside W^({k})_{w-2}"))
    if ok_d:
        entries.append(CheckEntry("(d)", True))
    return entries, tower


def _restrict_operator(m: Mat, u: Subspace) -> Mat:
    cols = []
    for r in u.rows:
        c = u.coords_of(m.apply(r))
        if c is None:
            raise FiltrationError("operator does not preserve the subspace")
        cols.append(c)
    return Mat.from_cols(cols, nrows=u.dim)


class DeligneSystem:
    """(V, W, N_1..N_n, alpha) over the rational model of R or C."""

    def __init__(self, field: str, dim: int, n: int, w_filt: IncFiltration,
                 ns: Sequence[Mat], alpha: Grading):
        if field not in ("rat", "gauss"):
            raise DeligneError(f"unknown field tag {field!r}")
        if field == "rat":
            if not w_filt.is_real() or not alpha_is_real(alpha) \
                    or any(not m.is_real() for m in ns):
                raise DeligneError("field 'rat' requires real data")
        self.field = field
        self.dim = dim
        self.n = n
        self.W = w_filt
        self.N = tuple(ns)
        self.alpha = alpha
        if w_filt.ambient != dim or alpha.ambient != dim or len(ns) != n:
            raise DeligneError("inconsistent shapes")
        self._cache: Dict[str, object] = {}

    # -- validation -------------------------------------------------------

    def validate(self) -> ValidationReport:
        if "report" in self._cache:
            return self._cache["report"]
        entries, tower = validate_core(self.W, self.N)
        if tower is not None:
            ok_e = True
            if not self.alpha.splits(tower[self.n]):
                ok_e = False
                entries.append(CheckEntry(
                    "(e)", False, "alpha does not split W^(n)"))
            for j in range(0, self.n):
                for w in tower[j].jumps():
                    if not self.alpha.stabilizes(tower[j].at(w)):
                        ok_e = False
                        entries.append(CheckEntry(
                            "(e)", False,
                            f"W^({j})_{w} is not alpha-stable"))
            for j, nj in enumerate(self.N, 1):
                if not self.alpha.has_pure_weight(nj, -2):
                    ok_e = False
                    entries.append(CheckEntry(
                        "(e)", False, f"N_{j} is not of alpha-weight -2"))
            if ok_e:
                entries.append(CheckEntry("(e)", True))
            self._cache["tower"] = tower
        report = ValidationReport(entries)
        self._cache["report"] = report
        return report

    def require_valid(self) -> None:
        rep = self.validate()
        if not rep.ok:
            raise InvalidSystem(rep)

    def tower(self) -> List[IncFiltration]:
        self.require_valid()
        return self._cache["tower"]

    # -- the tau tuple ------------------------------------------------------

    def tau(self) -> "TauTuple":
        if "tau" in self._cache:
            return self._cache["tau"]
        self.require_valid()
        tower = self.tower()
        gradings: List[Optional[Grading]] = [None] * (self.n + 1)
        gradings[self.n] = self.alpha
        for j in range(self.n, 0, -1):
            gradings[j - 1] = _tau_pair_core(
                tower[j - 1], self.N[j - 1], gradings[j], tower[j])
        tt = TauTuple(tuple(gradings))
        tt.verify(self)
        self._cache["tau"] = tt
        return tt

    def nhat(self) -> Tuple[Mat, ...]:
        if "nhat" in self._cache:
            return self._cache["nhat"]
        tt = self.tau()
        out = []
        for j, nj in enumerate(self.N, 1):
            nh = tt.gradings[j - 1].component(nj, 0)
            for k in range(0, j):
                if not tt.gradings[k].has_pure_weight(nh, 0):
                    raise TauConstructionError(
                        f"Nhat_{j} is not of weight 0 for tau_{k}")
            out.append(nh)
        self._cache["nhat"] = tuple(out)
        return self._cache["nhat"]

    def associated_sl2(self) -> "DeligneSystem":
        """(V, W, Nhat_1..Nhat_n, alpha): the associated SL(2)-orbit."""
        if "assoc" in self._cache:
            return self._cache["assoc"]
        out = DeligneSystem(self.field, self.dim, self.n, self.W,
                            self.nhat(), self.alpha)
        rep = out.validate()
        if not rep.ok:
            raise DeligneError(
                f"associated orbit fails validation (theorem alarm): {rep}")
        if out.tau().gradings != self.tau().gradings:
            raise DeligneError(
                "associated orbit changed the tau tuple (theorem alarm)")
        from .sl2 import is_orbit
        if not is_orbit(out):
            raise DeligneError(
                "associated system is not an SL(2)-orbit (theorem alarm)")
        self._cache["assoc"] = out
        return out

    def __eq__(self, other):
        if not isinstance(other, DeligneSystem):
            return NotImplemented
        return (self.field, self.dim, self.n, self.W, self.N,
                self.alpha.parts()) == \
               (other.field, other.dim, other.n, other.W, other.N,
                other.alpha.parts())

    def __repr__(self):
        return (f"DeligneSystem(field={self.field}, dim={self.dim}, "
                f"n={self.n})")


def alpha_is_real(g: Grading) -> bool:
    return all(s.is_real() for _, s in g.parts())


@dataclass
class TauTuple:
    gradings: Tuple[Grading, ...]

    def verify(self, system: DeligneSystem) -> None:
        """Re-check every stated property of the tuple; raise on failure."""
        tower = system.tower()
        n = system.n
        if self.gradings[n] != system.alpha:
            raise TauConstructionError("tau_n != alpha")
        for j, g in enumerate(self.gradings):
            if not g.splits(tower[j]):
                raise TauConstructionError(f"tau_{j} does not split W^({j})")
        for a in range(n + 1):
            for b in range(a + 1, n + 1):
                if not self.gradings[a].commutes_with(self.gradings[b]):
                    raise TauConstructionError(
                        f"tau_{a} and tau_{b} do not commute")
        for j, nj in enumerate(system.N, 1):
            for k in range(j, n + 1):
                if not self.gradings[k].has_pure_weight(nj, -2):
                    raise TauConstructionError(
                        f"N_{j} is not of weight -2 for tau_{k}")
        for j, nj in enumerate(system.N, 1):
            nh = self.gradings[j - 1].component(nj, 0)
            for k in range(0, j):
                if not self.gradings[k].has_pure_weight(nh, 0):
                    raise TauConstructionError(
                        f"Nhat_{j} is not of weight 0 for tau_{k}")
        # one-variable conditions for each consecutive pair
        for j, nj in enumerate(system.N, 1):
            _verify_pair_conditions(tower[j - 1], nj, self.gradings[j - 1])


def _verify_pair_conditions(w_filt: IncFiltration, n_op: Mat,
                            tau0: Grading) -> None:
    """Conditions on tau_0 from the one-variable splitting theorem:
    N_{-1} = 0 and, for k >= 2, ad(Nhat)^{k-1} kills the weight -k part."""
    if not tau0.splits(w_filt):
        raise TauConstructionError("tau_0 does not split W")
    comps = _weight_components(tau0, n_op)
    if any(k > 0 for k in comps):
        raise TauConstructionError("N has positive tau_0-weights")
    if -1 in comps:
        raise TauConstructionError("N has a nonzero tau_0-weight -1 part")
    nhat = comps.get(0, Mat.zero(n_op.rows, n_op.rows))
    for k, part in comps.items():
        if k >= -1:
            continue
        m = -k
        cur = part
        for _ in range(m - 1):
            cur = nhat @ cur - cur @ nhat
        if not cur.is_zero():
            raise TauConstructionError(
                f"weight {k} part of N is not primitive")


def _weight_components(g: Grading, m: Mat) -> Dict[int, Mat]:
    out = {}
    ws = g.weights()
    span = range(min(ws) - max(ws), max(ws) - min(ws) + 1) if ws else ()
    for k in span:
        c = g.component(m, k)
        if not c.is_zero():
            out[k] = c
    return out


def _initial_grading(w_filt: IncFiltration, alpha: Grading) -> Grading:
    """A grading splitting W built from alpha-stable complements; it
    commutes with alpha by construction."""
    d = w_filt.ambient
    parts: Dict[int, Subspace] = {}
    for w in w_filt.jumps():
        cur, prev = w_filt.at(w), w_filt.at(w - 1)
        piece = Subspace.zero(d)
        for aw, avs in alpha.parts():
            inner = prev.intersect(avs)
            outer = cur.intersect(avs)
            piece = piece + Subspace.span(d, pivot_complement(inner, outer))
        parts[w] = piece
    return Grading.from_parts(d, parts)


def _bihom_basis(tau0: Grading, alpha: Grading, tau_weight: int,
                 alpha_weight: int):
    """Basis matrices of the space of maps that are homogeneous of the
    given weights for tau0 (via its grading) and alpha simultaneously."""
    d = tau0.ambient
    joint: List[Tuple[int, int, Subspace]] = []
    for tw, ts in tau0.parts():
        for aw, asp in alpha.parts():
            inter = ts.intersect(asp)
            if inter.dim:
                joint.append((tw, aw, inter))
    cols = []
    for (_, _, s) in joint:
        cols.extend(s.rows)
    cmat = Mat.from_cols(cols, nrows=d)
    cinv = cmat.inverse()
    duals = cinv.data  # row i is the dual functional of basis column i
    basis = []
    idx = 0
    positions = []
    for (tw, aw, s) in joint:
        positions.append((tw, aw, idx, s.dim))
        idx += s.dim
    for (tw2, aw2, start2, dim2) in positions:       # target
        for (tw1, aw1, start1, dim1) in positions:   # source
            if tw2 - tw1 != tau_weight or aw2 - aw1 != alpha_weight:
                continue
            for i2 in range(start2, start2 + dim2):
                for i1 in range(start1, start1 + dim1):
                    col = cmat.col(i2)
                    dual = duals[i1]
                    basis.append(Mat([[col[a] * dual[b] for b in range(d)]
                                      for a in range(d)], d, d))
    return basis, cmat, duals


def _coords_in_bihom(m: Mat, basis: List[Mat]) -> Optional[list]:
    """Coordinates of m in the given bihomogeneous basis (None if outside)."""
    d = m.rows
    cols = [tuple(x for row in b.data for x in row) for b in basis]
    a = Mat.from_cols(cols, nrows=d * d)
    target = tuple(x for row in m.data for x in row)
    sol = solve_linear(a, target)
    if sol is None:
        return None
    return list(sol)


def _tau_pair_core(w_filt: IncFiltration, n_op: Mat, alpha: Grading,
                   wp: IncFiltration) -> Grading:
    """tau_0 for the one-variable system (V, W, N, alpha) with W' = wp.

    Iteratively corrects an alpha-commuting initial splitting of W by
    exp(u_k), u_k of tau-weight -k and alpha-weight 0, killing the weight
    -1 part of N and the non-primitive portion of each weight -k part.
    """
    d = w_filt.ambient
    if d == 0:
        return Grading(0, ())
    # one-variable validity of the inputs
    for w in w_filt.jumps():
        if not alpha.stabilizes(w_filt.at(w)):
            raise TauConstructionError("W is not alpha-stable")
    if not alpha.has_pure_weight(n_op, -2):
        raise TauConstructionError("N is not of alpha-weight -2")
    if not alpha.splits(wp):
        raise TauConstructionError(
            "alpha does not split the relative monodromy filtration")
    tau_init = _initial_grading(w_filt, alpha)
    if not tau_init.commutes_with(alpha):
        raise TauConstructionError("initial grading fails to commute")
    ws = tau_init.weights()
    depth = (max(ws) - min(ws)) if ws else 0
    m_cur = n_op
    transform = Mat.identity(d)
    m0 = tau_init.component(n_op, 0)
    for k in range(1, depth + 1):
        m_k = tau_init.component(m_cur, -k)
        if m_k.is_zero():
            continue
        basis_k2, cmat, duals = _bihom_basis(tau_init, alpha, -k, -2)
        basis_k0, _, _ = _bihom_basis(tau_init, alpha, -k, 0)
        if k == 1:
            target = -m_k
        else:
            # split the class into primitive + image parts; kill the image
            coords = _coords_in_bihom(m_k, basis_k2)
            if coords is None:
                raise TauConstructionError(
                    "weight component escapes its bihomogeneous slot")
            a_sub, b_sub = _primitive_split(basis_k2, basis_k0, m0, k)
            proj = _image_part(m_k, a_sub, b_sub, basis_k2)
            if proj is None:
                raise TauConstructionError(
                    "bigraded piece is not primitive ⊕ image (invalid input)")
            target = -proj
        u_k = _solve_ad(m0, basis_k0, target)
        if u_k is None:
            raise TauConstructionError(
                f"correction equation unsolvable at weight -{k}")
        g = u_k.exp_nilpotent()
        ginv = (-u_k).exp_nilpotent()
        m_cur = ginv @ m_cur @ g
        transform = transform @ g
    tau0 = tau_init.map_by(transform)
    # exact post-verification
    if not tau0.splits(w_filt):
        raise TauConstructionError("result does not split W")
    if not tau0.commutes_with(alpha):
        raise TauConstructionError("result does not commute with alpha")
    _verify_pair_conditions(w_filt, n_op, tau0)
    return tau0


def _primitive_split(basis_k2: List[Mat], basis_k0: List[Mat], m0: Mat,
                     k: int):
    """Subspaces (in basis_k2 coordinates) of the primitive part
    ker ad(m0)^{k-1} and the image part ad(m0)(bihom weight-0 slot)."""
    nb = len(basis_k2)
    d = m0.rows
    flat = lambda m: tuple(x for row in m.data for x in row)
    cols2 = [flat(b) for b in basis_k2]
    amat = Mat.from_cols(cols2, nrows=d * d)
    # kernel of ad^{k-1} restricted to the slot
    rows = []
    for b in basis_k2:
        cur = b
        for _ in range(k - 1):
            cur = m0 @ cur - cur @ m0
        rows.append(flat(cur))
    ker = nullspace(Mat.from_cols(rows, nrows=d * d))
    # image of ad from the weight-0 slot, in slot coordinates
    img_vecs = []
    for b in basis_k0:
        img = m0 @ b - b @ m0
        c = solve_linear(amat, flat(img))
        if c is None:
            raise TauConstructionError("ad image leaves the slot")
        img_vecs.append(c)
    img = Subspace.span(nb, img_vecs)
    return ker, img


def _image_part(m_k: Mat, a_sub: Subspace, b_sub: Subspace,
                basis_k2: List[Mat]) -> Optional[Mat]:
    """Write m_k = a + b with a primitive and b in the image part; return b
    as a matrix, or None when the direct sum fails."""
    nb = len(basis_k2)
    d = m_k.rows
    if a_sub.intersect(b_sub).dim != 0 or (a_sub + b_sub).dim != nb:
        return None
    flat = lambda m: tuple(x for row in m.data for x in row)
    amat = Mat.from_cols([flat(b) for b in basis_k2], nrows=d * d)
    coords = solve_linear(amat, flat(m_k))
    if coords is None:
        return None
    cols = [list(r) for r in a_sub.rows] + [list(r) for r in b_sub.rows]
    cm = Mat.from_cols([tuple(c) for c in cols], nrows=nb)
    split = solve_linear(cm, coords)
    if split is None:
        return None
    b_coords = [ZERO] * nb
    for i, r in enumerate(b_sub.rows):
        c = split[a_sub.dim + i]
        for t in range(nb):
            b_coords[t] = b_coords[t] + c * r[t]
    out = Mat.zero(d, d)
    for c, b in zip(b_coords, basis_k2):
        if not c.is_zero():
            out = out + b.scale(c)
    return out


def _solve_ad(m0: Mat, basis_k0: List[Mat], target: Mat) -> Optional[Mat]:
    """Solve [m0, u] = target with u in the span of basis_k0."""
    d = m0.rows
    flat = lambda m: tuple(x for row in m.data for x in row)
    cols = [flat(m0 @ b - b @ m0) for b in basis_k0]
    a = Mat.from_cols(cols, nrows=d * d)
    sol = solve_linear(a, flat(target))
    if sol is None:
        return None
    u = Mat.zero(d, d)
    for c, b in zip(sol, basis_k0):
        if not c.is_zero():
            u = u + b.scale(c)
    return u


def tau_pair(system: DeligneSystem) -> Tuple[Grading, Grading]:
    """(tau_0, tau_1) for a one-variable system."""
    if system.n != 1:
        raise DeligneError("tau_pair needs a one-variable system")
    tt = system.tau()
    return tt.gradings[0], tt.gradings[1]


@dataclass
class CollapseDiagnostic:
    ok: bool
    detail: str

    def __bool__(self):
        return self.ok


def one_variable_collapse(system: DeligneSystem, ys: Sequence[Fraction]):
    """(V, W, sum y_j N_j, alpha) when the weight filtration of alpha is the
    relative monodromy filtration of the sum; a diagnostic otherwise."""
    system.require_valid()
    if len(ys) != system.n:
        raise DeligneError("wrong number of coefficients")
    if any(y <= 0 for y in ys):
        raise DeligneError("coefficients must be positive")
    d = system.dim
    total = Mat.zero(d, d)
    for y, nj in zip(ys, system.N):
        total = total + nj.scale(Fraction(y))
    wprime = weight_filtration_of(system.alpha)
    rep = verify_rmf(system.W, total, wprime)
    if not rep.ok:
        return CollapseDiagnostic(
            False, "ratios too small: " + "; ".join(rep.failures))
    out = DeligneSystem(system.field, d, 1, system.W, (total,), system.alpha)
    out.require_valid()
    return out


def restrict_scalars(system: DeligneSystem) -> DeligneSystem:
    """View a system over the model of C as a real system; dim doubles."""
    if system.field != "gauss":
        raise DeligneError("restrict_scalars needs a 'gauss' system")
    d2 = 2 * system.dim
    w_steps = {w: realify_subspace(system.W.at(w)) for w in system.W.jumps()}
    w2 = IncFiltration.from_steps(d2, w_steps)
    ns = tuple(realify_matrix(nj) for nj in system.N)
    parts = {w: realify_subspace(s) for w, s in system.alpha.parts()}
    alpha = Grading.from_parts(d2, parts)
    return DeligneSystem("rat", d2, system.n, w2, ns, alpha)


def scalar_change(system: DeligneSystem) -> DeligneSystem:
    """Extend scalars from the model of R to the model of C (same data)."""
    if system.field != "rat":
        raise DeligneError("scalar_change needs a 'rat' system")
    return DeligneSystem("gauss", system.dim, system.n, system.W, system.N,
                         system.alpha)
