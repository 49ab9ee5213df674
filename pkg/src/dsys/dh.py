"""Deligne-Hodge systems: (V, W, N_1..N_n, F) with a Hodge filtration in
place of the grading.

Validation covers the shared tower conditions plus N_j F^p <= F^{p-1} and
the mixed-Hodge condition for (W^(n), F) and its restrictions to the steps
of the intermediate filtrations.  The functor to Deligne systems takes
alpha to be the canonical splitting of (W^(n), F); the functor back doubles
the space and equips it with an explicit filtration built from the weight
spaces of alpha.  The module also computes Fhat, the associated orbit, the
infinitesimal-mixed-Hodge-module certificate (polarized graded pieces plus
existing relative monodromy filtrations), a threshold search for the
recombinations that turn a DH system into such a module, and the
exponential twist N'_j = sum_k (a^k / k!) N_{j-k}.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactfield import ExactError, GRat, I, Mat, Subspace, ZERO
from .filtration import Grading, IncFiltration, compute_rmf
from .hodge import (
    DEFAULT_ZETA, DecFiltration, GradedForm, canonical_splitting_map,
    induced_dec_on_graded, is_mhs, verify_polarization,
)
from .deligne import (
    CheckEntry, DeligneError, DeligneSystem, InvalidSystem, TauTuple,
    ValidationReport, validate_core,
)


class DHError(DeligneError):
    pass


class DHSystem:
    """(V, W, N_1..N_n, F) on a real V; F lives on the complexification."""

    def __init__(self, dim: int, n: int, w_filt: IncFiltration,
                 ns: Sequence[Mat], f: DecFiltration,
                 zeta_provider=DEFAULT_ZETA):
        if not w_filt.is_real():
            raise DHError("W must be real")
        if any(not m.is_real() for m in ns):
            raise DHError("the nilpotent operators must be real")
        if w_filt.ambient != dim or f.ambient != dim or len(ns) != n:
            raise DHError("inconsistent shapes")
        self.field = "rat"
        self.dim = dim
        self.n = n
        self.W = w_filt
        self.N = tuple(ns)
        self.F = f
        self.zeta_provider = zeta_provider
        self._cache: Dict[str, object] = {}

    # -- validation ---------------------------------------------------------

    def validate(self) -> ValidationReport:
        if "report" in self._cache:
            return self._cache["report"]
        entries, tower = validate_core(self.W, self.N)
        if tower is not None:
            self._cache["tower"] = tower
            ok_f1 = True
            jumps = self.F.jumps()
            levels = range(jumps[0], jumps[-1] + 1) if jumps else ()
            for j, nj in enumerate(self.N, 1):
                for p in levels:
                    img = self.F.at(p).image_under(nj)
                    if not self.F.at(p - 1).contains(img):
                        ok_f1 = False
                        entries.append(CheckEntry(
                            "(f1)", False, f"N_{j} F^{p} not inside F^{p-1}"))
            if ok_f1:
                entries.append(CheckEntry("(f1)", True))
            ok_f2 = True
            rep = is_mhs(tower[self.n], self.F)
            if not rep.ok:
                ok_f2 = False
                entries.append(CheckEntry(
                    "(f2)", False, f"(W^(n), F): {'; '.join(rep.failures)}"))
            for k in range(1, self.n):
                for w in tower[k].jumps():
                    u = tower[k].at(w)
                    if u.dim in (0, self.dim):
                        continue
                    sub = is_mhs(tower[self.n].restrict(u), self.F.restrict(u))
                    if not sub.ok:
                        ok_f2 = False
                        entries.append(CheckEntry(
                            "(f2)", False,
                            f"restriction to W^({k})_{w}: "
                            f"{'; '.join(sub.failures)}"))
            if ok_f2:
                entries.append(CheckEntry("(f2)", True))
        report = ValidationReport(entries)
        self._cache["report"] = report
        return report

    validate_dh = validate

    def require_valid(self) -> None:
        rep = self.validate()
        if not rep.ok:
            raise InvalidSystem(rep)

    def tower(self) -> List[IncFiltration]:
        self.require_valid()
        return self._cache["tower"]

    # -- the functor to Deligne systems --------------------------------------

    def splitting(self) -> Tuple[Mat, object]:
        """Canonical splitting map of (W^(n), F) and its delta data."""
        if "splitting" not in self._cache:
            tower = self.tower()
            s, ds = canonical_splitting_map(tower[self.n], self.F,
                                            self.zeta_provider)
            if not s.is_real():
                raise DHError("internal: canonical splitting is not real")
            self._cache["splitting"] = (s, ds)
        return self._cache["splitting"]

    def to_deligne(self) -> DeligneSystem:
        """(V, W, N_1..N_n, alpha) with alpha the canonical splitting of
        the mixed Hodge structure (W^(n), F)."""
        if "deligne" in self._cache:
            return self._cache["deligne"]
        s, ds = self.splitting()
        parts = {}
        for (w, start, size) in ds.blocks:
            parts[w] = Subspace.span(
                self.dim, [s.col(j) for j in range(start, start + size)])
        alpha = Grading.from_parts(self.dim, parts)
        out = DeligneSystem("rat", self.dim, self.n, self.W, self.N, alpha)
        rep = out.validate()
        if not rep.ok:
            raise DHError(
                f"canonical splitting fails the grading axioms (alarm): {rep}")
        self._cache["deligne"] = out
        return out

    def tau(self) -> TauTuple:
        return self.to_deligne().tau()

    def nhat(self) -> Tuple[Mat, ...]:
        return self.to_deligne().nhat()

    def fhat(self) -> DecFiltration:
        """Fhat = s(F(gr^{W^(n)})): push the induced graded Hodge filtration
        back through the canonical splitting.  Every tau_j fixes it; checked
        exactly at a = 2, 3."""
        if "fhat" in self._cache:
            return self._cache["fhat"]
        tower = self.tower()
        s, ds = self.splitting()
        wtop = tower[self.n]
        levels = set(self.F.jumps())
        steps: Dict[int, List] = {p: [] for p in levels}
        for (w, start, size) in ds.blocks:
            ind = induced_dec_on_graded(self.F, wtop, w)
            for p in levels:
                for r in ind.at(p).rows:
                    amb = [ZERO] * self.dim
                    for loc, x in enumerate(r):
                        col = s.col(start + loc)
                        for t in range(self.dim):
                            amb[t] = amb[t] + x * col[t]
                    steps[p].append(tuple(amb))
        built = {p: Subspace.span(self.dim, vs) for p, vs in steps.items()}
        built[max(levels) + 1] = Subspace.zero(self.dim)
        fh = DecFiltration.from_steps(self.dim, built)
        taus = self.tau().gradings
        for g in taus:
            for a in (Fraction(2), Fraction(3)):
                if fh.map_by(g.evaluate(a)) != fh:
                    raise DHError("tau does not fix Fhat (theorem alarm)")
        self._cache["fhat"] = fh
        return fh

    def associated_sl2(self) -> "DHSystem":
        """(V, W, Nhat_1..Nhat_n, Fhat); an orbit, with the same tau tuple."""
        if "assoc" in self._cache:
            return self._cache["assoc"]
        out = DHSystem(self.dim, self.n, self.W, self.nhat(), self.fhat(),
                       self.zeta_provider)
        rep = out.validate()
        if not rep.ok:
            raise DHError(f"associated orbit fails validation (alarm): {rep}")
        from .sl2 import is_orbit
        if not is_orbit(out):
            raise DHError("associated system is not an orbit (alarm)")
        if out.tau().gradings != self.tau().gradings:
            raise DHError("associated orbit changed tau (alarm)")
        self._cache["assoc"] = out
        return out

    def __eq__(self, other):
        if not isinstance(other, DHSystem):
            return NotImplemented
        return (self.dim, self.n, self.W, self.N, self.F) == \
               (other.dim, other.n, other.W, other.N, other.F)

    def __repr__(self):
        return f"DHSystem(dim={self.dim}, n={self.n})"


# ---------------------------------------------------------------------------
# the functor from Deligne systems (doubling)


def from_deligne(system: DeligneSystem, zeta_provider=DEFAULT_ZETA) -> DHSystem:
    """(V, W, N, alpha) -> (V^2, W^2, N^2, F) with F built from the weight
    spaces of alpha: even weight 2r contributes all of its double at level
    r; odd weight 2r+1 contributes level r fully, and at level r+1 the span
    of the vectors (i x, x)."""
    system.require_valid()
    if system.field == "gauss":
        from .deligne import restrict_scalars
        system = restrict_scalars(system)
        system.require_valid()
    d = system.dim
    d2 = 2 * d

    def dbl(v, where: str):
        if where == "first":
            return tuple(v) + tuple([ZERO] * d)
        return tuple([ZERO] * d) + tuple(v)

    w_steps = {}
    for w in system.W.jumps():
        s = system.W.at(w)
        w_steps[w] = Subspace.span(
            d2, [dbl(r, "first") for r in s.rows]
            + [dbl(r, "second") for r in s.rows])
    w2 = IncFiltration.from_steps(d2, w_steps)
    ns = tuple(nj.direct_sum(nj) for nj in system.N)
    contributions: List[Tuple[int, List]] = []
    for w, s in system.alpha.parts():
        both = [dbl(r, "first") for r in s.rows] \
            + [dbl(r, "second") for r in s.rows]
        if w % 2 == 0:
            r = w // 2
            contributions.append((r, both))
        else:
            r = (w - 1) // 2
            contributions.append((r, both))
            mixed = [tuple(GRat(0, 1) * x for x in row) + tuple(row)
                     for row in s.rows]
            contributions.append((r + 1, mixed))
    levels = sorted({r for r, _ in contributions})
    steps = {}
    for p in range(levels[0], levels[-1] + 1):
        vecs = []
        for r, vs in contributions:
            if r >= p:
                vecs.extend(vs)
        steps[p] = Subspace.span(d2, vecs)
    steps[levels[-1] + 1] = Subspace.zero(d2)
    f = DecFiltration.from_steps(d2, steps)
    out = DHSystem(d2, system.n, w2, ns, f, zeta_provider)
    rep = out.validate()
    if not rep.ok:
        raise DHError(f"doubled system fails validation (alarm): {rep}")
    return out


def doubled_deligne(system: DeligneSystem) -> DeligneSystem:
    """The expected value of to_deligne(from_deligne(system)):
    (V^2, W^2, N^2, alpha^2) on the nose."""
    if system.field == "gauss":
        from .deligne import restrict_scalars
        system = restrict_scalars(system)
    d = system.dim
    d2 = 2 * d

    def dbl_sub(s: Subspace) -> Subspace:
        rows = [tuple(r) + tuple([ZERO] * d) for r in s.rows] \
            + [tuple([ZERO] * d) + tuple(r) for r in s.rows]
        return Subspace.span(d2, rows)

    w2 = IncFiltration.from_steps(
        d2, {w: dbl_sub(system.W.at(w)) for w in system.W.jumps()})
    ns = tuple(nj.direct_sum(nj) for nj in system.N)
    alpha2 = Grading.from_parts(
        d2, {w: dbl_sub(s) for w, s in system.alpha.parts()})
    return DeligneSystem("rat", d2, system.n, w2, ns, alpha2)


# ---------------------------------------------------------------------------
# infinitesimal-mixed-Hodge-module certificate


@dataclass
class IMHMCertificate:
    samples: Tuple[Tuple[Fraction, ...], ...]
    forms: Dict[int, GradedForm]
    results: Dict[str, Tuple[bool, str]]

    @property
    def ok(self) -> bool:
        return all(okay for okay, _ in self.results.values())

    def __str__(self):
        lines = []
        for cond in sorted(self.results):
            okay, detail = self.results[cond]
            status = "pass" if okay else "FAIL"
            extra = f" [{detail}]" if detail else ""
            lines.append(f"condition {cond}: {status}{extra}")
        lines.append(f"samples: {[list(map(str, y)) for y in self.samples]}")
        return "\n".join(lines)


def default_y_samples(n: int, tgrid=(2, 4, 8, 16, 32)):
    """Rays y_j = t^{2(n+1-j)}: all consecutive ratios are the square t^2."""
    out = []
    for t in tgrid:
        t = Fraction(t)
        out.append(tuple(t ** (2 * (n + 1 - j)) for j in range(1, n + 1)))
    return tuple(out)


def imhm_check(system: DHSystem,
               y_samples: Optional[Sequence[Sequence[Fraction]]] = None
               ) -> IMHMCertificate:
    """Certificate for the module conditions: (a) and (f1) re-checked, (h)
    existence of the relative monodromy filtration of each N_j over W, and
    (g) graded polarizations: forms transported from the associated orbit,
    checked antisymmetric for the original operators and positive at the
    sampled y (positivity is certified at the samples only)."""
    system.require_valid()
    n = system.n
    if y_samples is None:
        y_samples = default_y_samples(n)
    y_samples = tuple(tuple(Fraction(y) for y in ys) for ys in y_samples)
    results: Dict[str, Tuple[bool, str]] = {}
    rep = system.validate()
    results["(a)"] = (not [e for e in rep.entries
                           if e.axiom == "(a)" and not e.ok], "")
    results["(f1)"] = (not [e for e in rep.entries
                            if e.axiom == "(f1)" and not e.ok], "")
    # (h)
    missing = []
    for j, nj in enumerate(system.N, 1):
        if compute_rmf(system.W, nj) is None:
            missing.append(f"N_{j}")
    results["(h)"] = (not missing,
                      f"no relative filtration for {', '.join(missing)}"
                      if missing else "")
    # (g)
    forms: Dict[int, GradedForm] = {}
    try:
        from .sl2 import orbit_polarization
        orbit = system.associated_sl2()
        forms = orbit_polarization(orbit)
        g_ok, g_detail = True, ""
        for w, form in forms.items():
            q = system.W.graded(w)
            for j, nj in enumerate(system.N, 1):
                ng = q.induced(nj)
                if not (ng.T @ form.gram + form.gram @ ng).is_zero():
                    g_ok = False
                    g_detail = f"N_{j} not an infinitesimal isometry at w={w}"
        if g_ok:
            for ys in y_samples:
                expo = Mat.zero(system.dim, system.dim)
                for yj, nj in zip(ys, system.N):
                    expo = expo + nj.scale(Fraction(yj))
                fy = system.F.map_by(expo.scale(I).exp_nilpotent())
                mh = is_mhs(system.W, fy)
                if not mh.ok:
                    g_ok = False
                    g_detail = f"not mixed at y={tuple(map(str, ys))}"
                    break
                for w, form in forms.items():
                    fgr = induced_dec_on_graded(fy, system.W, w)
                    if not verify_polarization(w, form, fgr):
                        g_ok = False
                        g_detail = (f"positivity fails at w={w}, "
                                    f"y={tuple(map(str, ys))}")
                        break
                if not g_ok:
                    break
        results["(g)"] = (g_ok, g_detail)
    except (ExactError, InvalidSystem) as exc:
        results["(g)"] = (False, f"form construction failed: {exc}")
    return IMHMCertificate(tuple(y_samples), forms, results)


@dataclass
class ThresholdResult:
    grid: Tuple[Fraction, ...]
    found_level: Optional[Fraction]
    coefficients: Optional[Tuple[Tuple[Fraction, ...], ...]]
    persistent: bool
    per_level: Dict[Fraction, bool]

    @property
    def ok(self) -> bool:
        return self.found_level is not None and self.persistent


def recombine(system: DHSystem, a: Sequence[Sequence[Fraction]]) -> DHSystem:
    """N'_j = sum_{k<=j} a[j][k] N_k (lower triangular, nonzero diagonal)."""
    n = system.n
    ns = []
    for j in range(1, n + 1):
        acc = Mat.zero(system.dim, system.dim)
        for k in range(1, j + 1):
            acc = acc + system.N[k - 1].scale(Fraction(a[j - 1][k - 1]))
        ns.append(acc)
    return DHSystem(system.dim, system.n, system.W, ns, system.F,
                    system.zeta_provider)


def threshold_search(system: DHSystem,
                     grid: Sequence[Fraction] = (1, 4, 16, 64, 256),
                     y_samples=None) -> ThresholdResult:
    """Search the grid for t with a_{j,k} = t^{j-k} making the recombined
    system pass imhm_check; reports the minimal passing level and whether
    every larger tested level also passes."""
    system.require_valid()
    grid = tuple(Fraction(g) for g in grid)
    per_level: Dict[Fraction, bool] = {}
    found = None
    coeffs = None
    for t in grid:
        a = tuple(tuple(t ** (j - k) for k in range(1, j + 1))
                  for j in range(1, system.n + 1))
        cand = recombine(system, a)
        rep = cand.validate()
        if not rep.ok:
            raise DHError(
                f"recombined system fails validation (alarm): {rep}")
        cert = imhm_check(cand, y_samples)
        per_level[t] = cert.ok
        if cert.ok and found is None:
            found = t
            coeffs = a
    persistent = True
    if found is not None:
        for t in grid:
            if t > found and not per_level[t]:
                persistent = False
    return ThresholdResult(grid, found, coeffs, persistent, per_level)


def theta_twist(system: DHSystem, a: Fraction) -> DHSystem:
    """N'_j = sum_{k=0}^{j-1} (a^k / k!) N_{j-k}; theta^a theta^b equals
    theta^{a+b} on the nose."""
    a = Fraction(a)
    n = system.n
    ns = []
    for j in range(1, n + 1):
        acc = Mat.zero(system.dim, system.dim)
        fact = Fraction(1)
        for k in range(0, j):
            if k:
                fact *= k
            acc = acc + system.N[j - k - 1].scale(a ** k / fact)
        ns.append(acc)
    return DHSystem(system.dim, system.n, system.W, ns, system.F,
                    system.zeta_provider)
