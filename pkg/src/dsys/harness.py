"""Seeded instance generation and theorem-verification campaigns.

Instances are built from the classification side: draw a random
multiplicity family, reconstruct the orbit, optionally conjugate the whole
system by a unipotent exp(u) with u lowering the weight filtration (an
isomorphism, so every derived object transports), and optionally add
structure-preserving junk that destroys the orbit property while keeping
the tower: a lower-triangular recombination of the operators (n >= 2) or a
primitive lower-weight summand on the single operator (n = 1).

Convergence statements are certified at sample points of the ray
y_j(t) = t^(2(n+1-j)): all consecutive ratios are the perfect square t^2,
so the rescaling beta(y) = prod tau_j(t) stays rational.  A trace is a
list of exact squared distances; campaigns require each trace to be
identically zero (orbits) or strictly decreasing and below C/t^2 with C
fitted at the first two points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import random
from typing import Dict, List, Optional, Sequence, Tuple

from .exactfield import ExactError, GRat, I, Mat, ONE, Subspace, ZERO
from .filtration import Grading, verify_rmf
from .hodge import (
    DecFiltration, ZetaDomainError, canonical_splitting, is_mhs,
    is_pure_hs,
)
from .deligne import (
    CollapseDiagnostic, DeligneSystem, InvalidSystem, one_variable_collapse,
)
from .dh import (
    DHSystem, doubled_deligne, from_deligne, recombine, threshold_search,
)
from .sl2 import (
    is_orbit, orbit_polarization, reconstruct, roundtrip_isomorphism,
    sl2nm_check,
)
from . import category


class HarnessError(ExactError):
    pass


DEFAULT_TGRID = (2, 4, 8, 16, 32)
DEFAULT_AGRID = (1, 4, 16, 64, 256)


# ---------------------------------------------------------------------------
# random instances


def _rand_rat(rng: random.Random, lo=-3, hi=3, dens=(1, 1, 2)) -> Fraction:
    num = rng.randint(lo, hi)
    return Fraction(num, rng.choice(dens))


def _random_pure_hs(rng: random.Random, k: int, d: int) -> DecFiltration:
    """A random pure Hodge structure of weight k on dimension d (d even
    when k is odd: conjugate pairs are forced)."""
    if k % 2 and d % 2:
        raise HarnessError("odd weight needs even dimension")
    blocks = []  # list of (p, q) with multiplicity, conj-symmetric
    rem = d
    while rem > 0:
        if k % 2 == 0 and (rem == 1 or rng.random() < 0.5):
            blocks.append((k // 2, k // 2))
            rem -= 1
        else:
            r = rng.choice((1, 3)) if k % 2 else 2
            p = (k + r) // 2
            blocks.append((p, k - p))
            blocks.append((k - p, p))
            rem -= 2
    # standard split model on coordinates, then a random real change of basis
    cols = 0
    steps: Dict[int, List] = {}
    used = 0
    vecs_by_p: Dict[int, List] = {}
    i = 0
    while i < len(blocks):
        p, q = blocks[i]
        if p == q:
            v = [ZERO] * d
            v[used] = ONE
            vecs_by_p.setdefault(p, []).append(tuple(v))
            used += 1
            i += 1
        else:
            v = [ZERO] * d
            v[used] = ONE
            v[used + 1] = GRat(0, 1)
            vecs_by_p.setdefault(p, []).append(tuple(v))
            w = [ZERO] * d
            w[used] = ONE
            w[used + 1] = GRat(0, -1)
            vecs_by_p.setdefault(q, []).append(tuple(w))
            used += 2
            i += 2
    while True:
        g = Mat([[GRat(_rand_rat(rng, -2, 2)) for _ in range(d)]
                 for _ in range(d)], d, d)
        try:
            g.inverse()
            break
        except ExactError:
            continue
    levels = sorted(vecs_by_p)
    built: Dict[int, Subspace] = {}
    for p in range(levels[0], levels[-1] + 2):
        vecs = [v for lp, vs in vecs_by_p.items() if lp >= p for v in vs]
        built[p] = Subspace.span(d, [g.apply(v) for v in vecs])
    f = DecFiltration.from_steps(d, built)
    if not is_pure_hs(d, k, f):
        raise HarnessError("internal: random Hodge structure is not pure")
    return f


def _random_family(rng: random.Random, kind: str, n: int, dims: int,
                   pure_weight: Optional[int] = None):
    family = []
    budget = max(2, dims)
    while budget > 0:
        m = tuple(rng.choice((0, 0, 1, 1, 2)) for _ in range(n))
        size = 1
        for mj in m:
            size *= mj + 1
        if size > budget:
            if family:
                break
            m = tuple(0 for _ in range(n))
            size = 1
        mult = 1 if size * 2 > budget else rng.choice((1, 1, 2))
        k = rng.randint(-2, 2) if pure_weight is None \
            else pure_weight - sum(m)
        if kind == "dh":
            if k % 2 and mult % 2:
                mult += 1
            if size * mult > budget:
                mult = max(1, mult - 1)
                if k % 2 and mult % 2:
                    if pure_weight is None:
                        k += rng.choice((-1, 1))
                    else:
                        mult += 1
            family.append((m, k, _random_pure_hs(rng, k, mult)))
        else:
            family.append((m, k, mult))
        budget -= size * mult
        if rng.random() < 0.35 and family:
            break
    return family


def _weight_table(system) -> List[Tuple[int, ...]]:
    """Joint tau-weights of the standard basis vectors (requires the basis
    to be tau-homogeneous, which reconstruct guarantees)."""
    taus = system.tau().gradings
    out = []
    for i in range(system.dim):
        e = tuple(ONE if j == i else ZERO for j in range(system.dim))
        ws = []
        for g in taus:
            w = None
            for gw, s in g.parts():
                if s.contains_vector(e):
                    w = gw
                    break
            if w is None:
                raise HarnessError("basis vector is not tau-homogeneous")
            ws.append(w)
        out.append(tuple(ws))
    return out


def _random_lowering(rng: random.Random, system,
                     density=0.5) -> Optional[Mat]:
    """Random real u whose entries strictly lower every tau-weight."""
    d = system.dim
    table = _weight_table(system)
    rows = [[ZERO] * d for _ in range(d)]
    found = False
    for i in range(d):
        for j in range(d):
            if all(wi < wj for wi, wj in zip(table[i], table[j])):
                if rng.random() < density:
                    val = _rand_rat(rng, -2, 2)
                    if val:
                        rows[i][j] = GRat(val)
                        found = True
    if not found:
        return None
    return Mat(rows, d, d)


def _conjugate_system(system, g: Mat):
    ginv = g.inverse()
    ns = tuple(g @ nj @ ginv for nj in system.N)
    w = system.W.map_by(g)
    if isinstance(system, DHSystem):
        return DHSystem(system.dim, system.n, w, ns, system.F.map_by(g),
                        system.zeta_provider)
    return DeligneSystem(system.field, system.dim, system.n, w, ns,
                         system.alpha.map_by(g))


def _stage_junk(rng: random.Random, seed_orbit) -> Optional[Mat]:
    """Random real x added to the last operator, keeping the system valid
    with the same tau tuple: x drops alpha-weight by exactly 2 and the
    (n-1)-th tau-weight by at least 2, never raises any tau-weight,
    commutes with the earlier operators, stays primitive against the last
    one, and (Hodge case) lowers the F-level."""
    n = seed_orbit.n
    if n == 0:
        return None
    d = seed_orbit.dim
    table = _weight_table(seed_orbit)
    dh = isinstance(seed_orbit, DHSystem)
    slots = []
    for i in range(d):
        for j in range(d):
            dw = [table[i][k] - table[j][k] for k in range(n + 1)]
            if dw[n] != -2:
                continue
            if any(x > 0 for x in dw[:n]):
                continue
            if dw[n - 1] > -2 or dw[0] > -1:
                # the tau_0-weight must drop so the junk dies on gr^W and
                # the orbit form keeps its infinitesimal isometries
                continue
            slots.append((i, j, -dw[n - 1]))
    if not slots:
        return None
    nunk = len(slots)
    rows: List[List[Fraction]] = []

    def add_constraint_matrixmap(images: List[Mat]):
        # images[s] = the constraint value contributed by slot s; append
        # real and imaginary rows for every matrix entry
        for a in range(d):
            for b in range(d):
                vals = [img.data[a][b] for img in images]
                if all(v.is_zero() for v in vals):
                    continue
                rows.append([v.re for v in vals])
                rows.append([v.im for v in vals])

    basis_mats = []
    for (i, j, _k) in slots:
        m = [[ZERO] * d for _ in range(d)]
        m[i][j] = ONE
        basis_mats.append(Mat(m, d, d))
    # commute with the earlier operators
    for t in range(n - 1):
        nt = seed_orbit.N[t]
        add_constraint_matrixmap([nt @ b - b @ nt for b in basis_mats])
    # primitivity against the last operator, per weight drop
    nn = seed_orbit.N[n - 1]
    by_k: Dict[int, List[int]] = {}
    for s, (_i, _j, k) in enumerate(slots):
        by_k.setdefault(k, []).append(s)
    for k, members in by_k.items():
        images = []
        for s in range(nunk):
            if s in members:
                cur = basis_mats[s]
                for _ in range(k - 1):
                    cur = nn @ cur - cur @ nn
                images.append(cur)
            else:
                images.append(Mat.zero(d, d))
        add_constraint_matrixmap(images)
    if dh:
        fj = seed_orbit.F.jumps()
        for p in range(fj[0], fj[-1] + 1):
            ann = seed_orbit.F.at(p - 1).annihilator()
            for v in seed_orbit.F.at(p).rows:
                for arow in ann.data:
                    vals = []
                    for b in basis_mats:
                        img = b.apply(v)
                        acc = ZERO
                        for x, y in zip(arow, img):
                            acc = acc + x * y
                        vals.append(acc)
                    if all(x.is_zero() for x in vals):
                        continue
                    rows.append([x.re for x in vals])
                    rows.append([x.im for x in vals])
    if rows:
        a = Mat([[GRat(x) for x in row] for row in rows], len(rows), nunk)
        from .exactfield import nullspace as _ns
        sol_space = _ns(a)
    else:
        sol_space = Subspace.full(nunk)
    if sol_space.dim == 0:
        return None
    coeffs = [ZERO] * nunk
    found = False
    for r in sol_space.rows:
        c = _rand_rat(rng, -2, 2)
        if c:
            found = True
            for s in range(nunk):
                coeffs[s] = coeffs[s] + GRat(c) * r[s]
    if not found:
        c0 = sol_space.rows[0]
        coeffs = list(c0)
    x = Mat.zero(d, d)
    for cf, b in zip(coeffs, basis_mats):
        if not cf.is_zero():
            x = x + b.scale(cf)
    if x.is_zero() or not x.is_real():
        return None
    return x


@dataclass
class GeneratedInstance:
    system: object
    kind: str
    n: int
    seed: int
    mode: str
    orbit: bool
    delta_zero: bool
    recovers_seed: bool
    seed_orbit: object


def generate(kind: str, n: int, dims: int, seed: int,
             mode: str = "none",
             pure_weight: Optional[int] = None) -> GeneratedInstance:
    """Deterministic seeded instance.  Modes: 'none' (pure orbit),
    'transport' (conjugated plus tower-preserving junk; delta stays 0),
    'hodge' (Hodge filtration moved by a complex unipotent; delta may be
    nonzero and the instance is only kept when it revalidates).

    pure_weight pins the weight filtration to a single jump (needed by the
    power-series residual, whose statement assumes a pure W)."""
    if kind not in ("deligne", "dh"):
        raise HarnessError("kind must be 'deligne' or 'dh'")
    rng = random.Random(seed)
    for attempt in range(60):
        family = _random_family(rng, kind, n, dims, pure_weight)
        seed_orbit = reconstruct(kind, n, family)
        if seed_orbit.dim == 0:
            continue
        if not seed_orbit.validate().ok:
            continue
        if mode == "none":
            return GeneratedInstance(seed_orbit, kind, n, seed, mode,
                                     True, True, True, seed_orbit)
        if mode == "transport":
            got = _transport_instance(rng, kind, seed_orbit)
        elif mode == "hodge":
            if kind != "dh":
                raise HarnessError("hodge mode needs kind 'dh'")
            got = _hodge_instance(rng, seed_orbit)
        else:
            raise HarnessError(f"unknown mode {mode!r}")
        if got is not None:
            got.seed = seed
            return got
    raise HarnessError(f"generation failed for seed {seed} (mode {mode})")


def _transport_instance(rng, kind, seed_orbit) -> Optional[GeneratedInstance]:
    n = seed_orbit.n
    d = seed_orbit.dim
    # structure-preserving junk first (in orbit coordinates): a triangular
    # recombination for n >= 2, plus a primitive summand on the last
    # operator when the weight structure has room for one
    ns = list(seed_orbit.N)
    if n >= 2:
        coeffs = [[_rand_rat(rng, -3, 3) for _ in range(j)] + [Fraction(1)]
                  for j in range(n)]
        if all(all(c == 0 for c in row[:-1]) for row in coeffs):
            coeffs[-1][0] = Fraction(1)
        ns = []
        for j in range(1, n + 1):
            acc = Mat.zero(d, d)
            for k in range(1, j + 1):
                acc = acc + seed_orbit.N[k - 1].scale(coeffs[j - 1][k - 1])
            ns.append(acc)
    if n >= 1:
        x = _stage_junk(rng, seed_orbit)
        if x is not None:
            ns[n - 1] = ns[n - 1] + x
    if kind == "dh":
        junked = DHSystem(d, n, seed_orbit.W, ns, seed_orbit.F,
                          seed_orbit.zeta_provider)
    else:
        junked = DeligneSystem(seed_orbit.field, d, n, seed_orbit.W, ns,
                               seed_orbit.alpha)
    if not junked.validate().ok:
        return None
    try:
        # the junk is built to preserve the tau tuple and the weight-0
        # parts; everything below transports along the conjugation
        if junked.tau().gradings != seed_orbit.tau().gradings:
            return None
        orbit_flag = is_orbit(junked)
        recovers = junked.nhat() == seed_orbit.N
        delta_zero = True
        if isinstance(junked, DHSystem):
            recovers = recovers and junked.fhat() == seed_orbit.F
            delta_zero = junked.splitting()[1].delta.is_zero()
    except ExactError:
        return None
    u = _random_lowering(rng, seed_orbit)
    out = junked
    moved_seed = seed_orbit
    if u is not None:
        g = u.exp_nilpotent()
        out = _conjugate_system(junked, g)
        moved_seed = _conjugate_system(seed_orbit, g)
    return GeneratedInstance(out, kind, n, 0, "transport", orbit_flag,
                             delta_zero, recovers, moved_seed)


def _hodge_instance(rng, seed_orbit) -> Optional[GeneratedInstance]:
    u = _random_lowering(rng, seed_orbit, density=0.7)
    if u is None:
        return None
    z = GRat(_rand_rat(rng, -1, 1), _rand_rat(rng, -2, 2, dens=(2, 3)))
    if z.is_zero():
        z = GRat(0, Fraction(1, 2))
    g = u.scale(z).exp_nilpotent()
    cand = DHSystem(seed_orbit.dim, seed_orbit.n, seed_orbit.W,
                    seed_orbit.N, seed_orbit.F.map_by(g),
                    seed_orbit.zeta_provider)
    if not cand.validate().ok:
        return None
    from .hodge import delta_splitting
    ds = delta_splitting(cand.tower()[seed_orbit.n], cand.F)
    return GeneratedInstance(cand, "dh", seed_orbit.n, 0, "hodge",
                             False, ds.delta.is_zero(), False, seed_orbit)


def random_morphism(kind: str, n: int, dims: int, seed: int):
    """A random morphism between conjugated direct sums of orbits with a
    shared middle summand (so kernels and cokernels are nontrivial)."""
    rng = random.Random(seed)
    for _ in range(40):
        fam_common = _random_family(rng, kind, n, max(2, dims // 2))
        fam_a = _random_family(rng, kind, n, max(1, dims // 3))
        fam_b = _random_family(rng, kind, n, max(1, dims // 3))
        try:
            common = reconstruct(kind, n, fam_common)
            extra_a = reconstruct(kind, n, fam_a)
            extra_b = reconstruct(kind, n, fam_b)
        except ExactError:
            continue
        if common.dim == 0 or extra_a.dim == 0 or extra_b.dim == 0:
            continue
        a = category.direct_sum(extra_a, common)
        b = category.direct_sum(common, extra_b)
        if not (a.validate().ok and b.validate().ok):
            continue
        c = GRat(_rand_rat(rng, -3, 3))
        if c.is_zero():
            c = ONE
        rows = [[ZERO] * a.dim for _ in range(b.dim)]
        for i in range(common.dim):
            rows[i][extra_a.dim + i] = c
        f = category.Morphism(a, b, Mat(rows, b.dim, a.dim))
        ua = _random_lowering(rng, a)
        ub = _random_lowering(rng, b)
        if ua is not None or ub is not None:
            ga = ua.exp_nilpotent() if ua is not None else Mat.identity(a.dim)
            gb = ub.exp_nilpotent() if ub is not None else Mat.identity(b.dim)
            a2 = _conjugate_system(a, ga)
            b2 = _conjugate_system(b, gb)
            f = category.Morphism(a2, b2, gb @ f.matrix @ ga.inverse())
        try:
            f.check()
        except ExactError:
            continue
        return f
    raise HarnessError(f"morphism generation failed for seed {seed}")


# ---------------------------------------------------------------------------
# rays and traces


@dataclass(frozen=True)
class RaySampler:
    tgrid: Tuple[Fraction, ...] = tuple(Fraction(t) for t in DEFAULT_TGRID)

    def y(self, n: int, t: Fraction) -> Tuple[Fraction, ...]:
        t = Fraction(t)
        return tuple(t ** (2 * (n + 1 - j)) for j in range(1, n + 1))


@dataclass
class DistanceTrace:
    quantity: str
    entries: List[Tuple[Fraction, Fraction]]  # (t, squared distance)
    notes: Dict[str, str] = field(default_factory=dict)

    def all_zero(self) -> bool:
        return all(d == 0 for _, d in self.entries)

    def strictly_decreasing(self) -> bool:
        ds = [d for _, d in self.entries]
        return all(a > b for a, b in zip(ds, ds[1:]))

    def bounded_by_fitted(self) -> bool:
        """d(t) <= C / t^2 with C fitted at the first two points."""
        if len(self.entries) < 3:
            return True
        c = max(d * t * t for t, d in self.entries[:2])
        return all(d * t * t <= c for t, d in self.entries)

    def certified(self) -> bool:
        return self.all_zero() or (self.strictly_decreasing()
                                   and self.bounded_by_fitted())


def _beta(system, t: Fraction) -> Mat:
    taus = system.tau().gradings
    out = Mat.identity(system.dim)
    for g in taus:
        out = out @ g.evaluate(t)
    return out


def _filtration_distance(f1: DecFiltration, f2: DecFiltration) -> Fraction:
    worst = Fraction(0)
    for p in sorted(set(f1.jumps()) | set(f2.jumps())):
        diff = f1.at(p).hermitian_projector() - f2.at(p).hermitian_projector()
        worst = max(worst, diff.max_sqmod())
    return worst


def _frame(f: DecFiltration, levels) -> Mat:
    # include a level below every jump so the identity enters the sum and
    # the frame is invertible
    out = Mat.zero(f.ambient, f.ambient)
    for p in list(levels) + [min(levels) - 1]:
        out = out + f.at(p).hermitian_projector()
    return out


def _sum_scaled(ns, ys) -> Mat:
    d = ns[0].rows if ns else 0
    out = Mat.zero(d, d)
    for y, nj in zip(ys, ns):
        out = out + nj.scale(Fraction(y))
    return out


def _splitting_map_of_collapse(system, ys):
    """tau_0-splitting of the one-variable system (V, W, sum y N_j, alpha)."""
    if isinstance(system, DHSystem):
        system = system.to_deligne()
    out = one_variable_collapse(system, list(ys))
    if isinstance(out, CollapseDiagnostic):
        return None
    tau0 = out.tau().gradings[0]
    return tau0.splitting_map(system.W)


def convergence_trace(system, quantity: str,
                      sampler: RaySampler = RaySampler()) -> DistanceTrace:
    """Exact squared distances of the named quantity along the ray."""
    n = system.n
    dh = isinstance(system, DHSystem)
    if quantity in ("fhat", "limit", "series") and not dh:
        raise HarnessError(f"quantity {quantity!r} needs a Hodge-side system")
    entries = []
    notes: Dict[str, str] = {}
    nhat = system.nhat()
    taus = system.tau().gradings
    if dh:
        fhat = system.fhat()
        nhat_sum = _sum_scaled(nhat, [Fraction(1)] * n)
        ihat = fhat.map_by(nhat_sum.scale(I).exp_nilpotent())
    shat = None
    if quantity == "splitting":
        base = system.to_deligne() if dh else system
        hat_sys = DeligneSystem(base.field, base.dim, 1, base.W,
                                (_sum_scaled(nhat, [Fraction(1)] * n),),
                                base.alpha) if n else None
        if hat_sys is None:
            raise HarnessError("splitting trace needs n >= 1")
        shat = hat_sys.tau().gradings[0].splitting_map(base.W)
    for t in sampler.tgrid:
        ys = sampler.y(n, t)
        if quantity == "nhat":
            b = _beta(system, t)
            binv = b.inverse()
            worst = Fraction(0)
            for y, nj, nh in zip(ys, system.N, nhat):
                diff = b @ nj.scale(Fraction(y)) @ binv - nh
                worst = max(worst, diff.max_sqmod())
            entries.append((t, worst))
        elif quantity == "fhat":
            b = _beta(system, t)
            entries.append((t, _filtration_distance(system.F.map_by(b),
                                                    fhat)))
        elif quantity == "limit":
            b = _beta(system, t)
            expo = _sum_scaled(system.N, ys).scale(I).exp_nilpotent()
            moved = system.F.map_by(b @ expo)
            entries.append((t, _filtration_distance(moved, ihat)))
        elif quantity == "series":
            if len(system.W.jumps()) > 1:
                raise HarnessError(
                    "series residual needs a pure weight filtration")
            expo = _sum_scaled(system.N, ys).scale(I).exp_nilpotent()
            a_filt = system.F.map_by(expo)
            scale = Mat.identity(system.dim)
            for j in range(1, n + 1):
                scale = scale @ taus[j].evaluate(1 / t)
            b_filt = ihat.map_by(scale)
            levels = sorted(set(a_filt.jumps()) | set(b_filt.jumps()))
            fa = _frame(a_filt, levels)
            fb = _frame(b_filt, levels)
            resid = fa @ fb.inverse() - Mat.identity(system.dim)
            entries.append((t, resid.max_sqmod()))
        elif quantity == "splitting":
            smap = _splitting_map_of_collapse(system, ys)
            if smap is None:
                notes[str(t)] = "collapse invalid (ratios too small)"
                entries.append((t, Fraction(-1)))
                continue
            resid = smap @ shat.inverse() - Mat.identity(system.dim)
            base_w = system.to_deligne().W if dh else system.W
            lowering = all(
                base_w.at(w - 1).contains(
                    base_w.at(w).image_under(resid))
                for w in base_w.jumps())
            if not lowering:
                notes[str(t)] = "residual is not W-lowering"
            entries.append((t, resid.max_sqmod()))
        else:
            raise HarnessError(f"unknown quantity {quantity!r}")
    return DistanceTrace(quantity, entries, notes)


TRACE_QUANTITIES_DH = ("nhat", "fhat", "limit", "splitting", "series")
TRACE_QUANTITIES_DELIGNE = ("nhat", "splitting")


# ---------------------------------------------------------------------------
# campaigns


@dataclass
class InstanceResult:
    seed: int
    ok: bool
    detail: str
    traces: List[DistanceTrace] = field(default_factory=list)


@dataclass
class CampaignReport:
    theorem: str
    config: Dict[str, str]
    results: List[InstanceResult]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def render_text(self) -> str:
        lines = [f"campaign: {self.theorem}"]
        for key in sorted(self.config):
            lines.append(f"  {key} = {self.config[key]}")
        for r in sorted(self.results, key=lambda r: r.seed):
            status = "PASS" if r.ok else "FAIL"
            detail = f" [{r.detail}]" if r.detail else ""
            lines.append(f"seed {r.seed}: {status}{detail}")
        lines.append(f"result: {'PASS' if self.ok else 'FAIL'} "
                     f"({sum(r.ok for r in self.results)}/"
                     f"{len(self.results)})")
        return "\n".join(lines) + "\n"

    def render_csv(self) -> str:
        rows = ["seed,quantity,t,sqdist"]
        for r in sorted(self.results, key=lambda r: r.seed):
            for tr in r.traces:
                for t, d in tr.entries:
                    rows.append(f"{r.seed},{tr.quantity},{t},{d}")
        return "\n".join(rows) + "\n"


THEOREMS = (
    "imhm-threshold", "deligne-doubling", "limit-mhs", "collapse-rmf",
    "tower-rmf", "splitting-series", "convergence", "abelian",
    "tau-postconditions", "classification", "orbit-polarization",
    "graded-fix",
)


def _check_instance(theorem: str, kind: str, n: int, dims: int, seed: int,
                    sampler: RaySampler, agrid) -> InstanceResult:
    try:
        return _check_instance_inner(theorem, kind, n, dims, seed, sampler,
                                     agrid)
    except ExactError as exc:
        return InstanceResult(seed, False, f"error: {exc}")


def _check_instance_inner(theorem, kind, n, dims, seed, sampler, agrid):
    if theorem == "imhm-threshold":
        inst = generate("dh", n, dims, seed, "transport")
        res = threshold_search(inst.system, grid=agrid)
        ok = res.ok
        detail = f"level={res.found_level}" if ok else "no passing level"
        if ok:
            cand = recombine(inst.system, res.coefficients)
            ok = cand.validate().ok
            detail += ", revalidated" if ok else ", revalidation FAILED"
        return InstanceResult(seed, ok, detail)
    if theorem == "deligne-doubling":
        inst = generate("deligne", n, dims, seed, "transport")
        dbl = from_deligne(inst.system)
        ok = dbl.to_deligne() == doubled_deligne(inst.system)
        detail = "roundtrip exact" if ok else "roundtrip mismatch"
        if ok:
            res = threshold_search(dbl, grid=agrid)
            ok = res.ok
            detail += f", level={res.found_level}" if ok \
                else ", no passing level"
        return InstanceResult(seed, ok, detail)
    if theorem == "limit-mhs":
        inst = generate("dh", n, dims, seed, "transport")
        sysm = inst.system
        for t in sampler.tgrid:
            ys = sampler.y(n, t)
            fy = sysm.F.map_by(_sum_scaled(sysm.N, ys).scale(I)
                               .exp_nilpotent())
            if not is_mhs(sysm.W, fy).ok:
                return InstanceResult(seed, False, f"not mixed at t={t}")
        tr = convergence_trace(sysm, "splitting", sampler)
        ok = tr.certified() and not tr.notes
        return InstanceResult(seed, ok, "" if ok else "trace fails", [tr])
    if theorem == "collapse-rmf":
        inst = generate("deligne", n, dims, seed, "transport")
        sysm = inst.system
        for t in sampler.tgrid:
            out = one_variable_collapse(sysm, list(sampler.y(n, t)))
            if isinstance(out, CollapseDiagnostic):
                return InstanceResult(seed, False,
                                      f"collapse fails at t={t}")
        tr = convergence_trace(sysm, "splitting", sampler)
        ok = tr.certified() and not tr.notes
        return InstanceResult(seed, ok, "" if ok else "trace fails", [tr])
    if theorem == "tower-rmf":
        inst = generate("deligne", n, dims, seed,
                        "none" if seed % 2 else "transport")
        sysm = inst.system
        tower = sysm.tower()
        rng = random.Random(seed ^ 0x5F5F)
        for ell in range(1, n + 1):
            for j in range(ell, n + 1):
                for k in range(j + 1, n + 1):
                    for t in sampler.tgrid:
                        ys = [Fraction(t) ** (2 * (k + 1 - tt))
                              for tt in range(ell + 1, k + 1)]
                        total = _sum_scaled(sysm.N[ell:k], ys)
                        if not verify_rmf(tower[j], total, tower[k]).ok:
                            return InstanceResult(
                                seed, False,
                                f"fails at ell={ell}, j={j}, k={k}, t={t}")
        if inst.orbit and n >= 1:
            # orbits satisfy the collapse for arbitrary nonzero y
            for trial in range(3):
                ell = rng.randint(0, n - 1)
                j = rng.randint(ell, n - 1)
                k = rng.randint(j + 1, n)
                ys = []
                for _ in range(k - ell):
                    y = Fraction(0)
                    while y == 0:
                        y = _rand_rat(rng, -4, 4)
                    ys.append(y)
                if not sl2nm_check(sysm, ell, j, k, ys):
                    return InstanceResult(
                        seed, False, f"orbit collapse fails at y={ys}")
        return InstanceResult(seed, True, "")
    if theorem == "splitting-series":
        inst = generate("dh", n, dims, seed, "transport")
        pure = generate("dh", n, dims, seed, "transport", pure_weight=0)
        traces = [convergence_trace(inst.system, "splitting", sampler),
                  convergence_trace(pure.system, "series", sampler)]
        ok = all(tr.certified() and not tr.notes for tr in traces)
        return InstanceResult(seed, ok, "" if ok else "trace fails", traces)
    if theorem == "convergence":
        inst = generate("dh", n, dims, seed,
                        "none" if seed % 3 == 0 else "transport")
        traces = [convergence_trace(inst.system, q, sampler)
                  for q in ("nhat", "fhat", "limit")]
        if inst.orbit:
            ok = all(tr.all_zero() for tr in traces)
            detail = "" if ok else "orbit trace is not zero"
        else:
            ok = all(tr.certified() for tr in traces)
            detail = "" if ok else "trace fails"
        return InstanceResult(seed, ok, detail, traces)
    if theorem == "abelian":
        f = random_morphism(kind, n, dims, seed)
        wit = category.abelian_witness(f)
        ok = wit.kernel.dim + wit.image.dim == f.source.dim
        return InstanceResult(seed, ok,
                              f"ker={wit.kernel.dim}, im={wit.image.dim}, "
                              f"coker={wit.cokernel.dim}")
    if theorem == "tau-postconditions":
        inst = generate("deligne", n, dims, seed,
                        "none" if seed % 2 else "transport")
        inst.system.tau()   # verifies every condition exactly, raises on fail
        inst.system.nhat()
        return InstanceResult(seed, True, "")
    if theorem == "classification":
        inst = generate(kind, n, dims, seed, "none")
        phi = roundtrip_isomorphism(inst.system)
        return InstanceResult(seed, True, f"dim={phi.rows}")
    if theorem == "orbit-polarization":
        inst = generate("dh", n, dims, seed, "none")
        samples = [[Fraction(1)] * n, [Fraction(2)] * n,
                   [Fraction(1, 2)] * n] if n else [[]]
        orbit_polarization(inst.system, samples)
        rng = random.Random(seed ^ 0xA5A5)
        if n >= 1:
            dl = inst.system.to_deligne()
            for trial in range(2):
                ell = rng.randint(0, n - 1)
                j = rng.randint(ell, n - 1)
                k = rng.randint(j + 1, n)
                ys = []
                for _ in range(k - ell):
                    y = Fraction(0)
                    while y == 0:
                        y = _rand_rat(rng, -4, 4)
                    ys.append(y)
                if not sl2nm_check(dl, ell, j, k, ys):
                    return InstanceResult(seed, False, "collapse fails")
        return InstanceResult(seed, True, "")
    if theorem == "graded-fix":
        inst = generate("dh", n, dims, seed, "transport")
        sysm = inst.system
        fh = sysm.fhat()   # internally asserts tau_j(a) Fhat = Fhat
        for g in sysm.tau().gradings:
            for a in (Fraction(2), Fraction(3)):
                if fh.map_by(g.evaluate(a)) != fh:
                    return InstanceResult(seed, False, "Fhat moves")
        # doubling splitting: canonical splitting of the doubled system at
        # y = 1 equals the double of tau_0 (one-variable inputs); gated on
        # the zeta provider domain (delta of the doubled structure must
        # vanish; otherwise the exact splitting is not derivable here)
        base = sysm.to_deligne()
        if n == 1:
            dbl = from_deligne(base)
            fy = dbl.F.map_by(dbl.N[0].scale(I).exp_nilpotent())
            if not is_mhs(dbl.W, fy).ok:
                return InstanceResult(seed, False, "doubled not mixed")
            try:
                g = canonical_splitting(dbl.W, fy)
            except ZetaDomainError:
                return InstanceResult(seed, True,
                                      "doubling splitting gated "
                                      "(delta != 0)")
            tau0 = base.tau().gradings[0]
            expected = {}
            d = base.dim
            for w, s in tau0.parts():
                rows = [tuple(r) + tuple([ZERO] * d) for r in s.rows] \
                    + [tuple([ZERO] * d) + tuple(r) for r in s.rows]
                expected[w] = Subspace.span(2 * d, rows)
            if g != Grading.from_parts(2 * d, expected):
                return InstanceResult(seed, False,
                                      "doubled splitting mismatch")
            return InstanceResult(seed, True, "doubling splitting exact")
        return InstanceResult(seed, True, "")
    raise HarnessError(f"unknown theorem id {theorem!r}")


def verify_system(obj, theorem: str, sampler: RaySampler = RaySampler(),
                  agrid=DEFAULT_AGRID) -> InstanceResult:
    """Run one theorem check on a parsed system or morphism."""
    from .category import Morphism, abelian_witness
    try:
        if theorem == "abelian":
            if not isinstance(obj, Morphism):
                raise HarnessError("'abelian' verifies a morphism file")
            wit = abelian_witness(obj)
            return InstanceResult(
                0, True, f"ker={wit.kernel.dim}, im={wit.image.dim}, "
                f"coker={wit.cokernel.dim}")
        if isinstance(obj, Morphism):
            raise HarnessError(f"theorem {theorem!r} verifies a system file")
        dh = isinstance(obj, DHSystem)
        n = obj.n
        if theorem == "tau-postconditions":
            base = obj.to_deligne() if dh else obj
            base.tau()
            base.nhat()
            return InstanceResult(0, True, "tau conditions verified")
        if theorem == "tower-rmf":
            tower = obj.tower()
            for ell in range(1, n + 1):
                for j in range(ell, n + 1):
                    for k in range(j + 1, n + 1):
                        for t in sampler.tgrid:
                            ys = [Fraction(t) ** (2 * (k + 1 - tt))
                                  for tt in range(ell + 1, k + 1)]
                            total = _sum_scaled(obj.N[ell:k], ys)
                            if not verify_rmf(tower[j], total, tower[k]).ok:
                                return InstanceResult(
                                    0, False,
                                    f"fails at ell={ell}, j={j}, k={k}, "
                                    f"t={t}")
            return InstanceResult(0, True, "")
        if theorem == "collapse-rmf":
            base = obj.to_deligne() if dh else obj
            for t in sampler.tgrid:
                out = one_variable_collapse(base, list(sampler.y(n, t)))
                if isinstance(out, CollapseDiagnostic):
                    return InstanceResult(0, False,
                                          f"collapse fails at t={t}")
            tr = convergence_trace(base, "splitting", sampler)
            ok = tr.certified() and not tr.notes
            return InstanceResult(0, ok, "" if ok else "trace fails", [tr])
        if theorem == "limit-mhs":
            if not dh:
                raise HarnessError("'limit-mhs' needs a dh system")
            for t in sampler.tgrid:
                ys = sampler.y(n, t)
                fy = obj.F.map_by(_sum_scaled(obj.N, ys).scale(I)
                                  .exp_nilpotent())
                if not is_mhs(obj.W, fy).ok:
                    return InstanceResult(0, False, f"not mixed at t={t}")
            return InstanceResult(0, True, "")
        if theorem == "imhm-threshold":
            if not dh:
                raise HarnessError("'imhm-threshold' needs a dh system")
            res = threshold_search(obj, grid=agrid)
            detail = f"level={res.found_level}" if res.ok \
                else "no passing level"
            return InstanceResult(0, res.ok, detail)
        if theorem == "deligne-doubling":
            if dh:
                raise HarnessError("'deligne-doubling' needs a deligne "
                                   "system")
            dbl = from_deligne(obj)
            ok = dbl.to_deligne() == doubled_deligne(obj)
            return InstanceResult(0, ok, "roundtrip exact" if ok
                                  else "roundtrip mismatch")
        if theorem == "convergence":
            qs = TRACE_QUANTITIES_DH[:3] if dh else ("nhat",)
            traces = [convergence_trace(obj, q, sampler) for q in qs]
            ok = all(tr.certified() for tr in traces)
            return InstanceResult(0, ok, "" if ok else "trace fails", traces)
        if theorem == "splitting-series":
            if not dh:
                raise HarnessError("'splitting-series' needs a dh system")
            traces = [convergence_trace(obj, "splitting", sampler)]
            if len(obj.W.jumps()) == 1:
                traces.append(convergence_trace(obj, "series", sampler))
            ok = all(tr.certified() and not tr.notes for tr in traces)
            return InstanceResult(0, ok, "" if ok else "trace fails", traces)
        if theorem == "classification":
            phi = roundtrip_isomorphism(obj)
            return InstanceResult(0, True, f"dim={phi.rows}")
        if theorem == "orbit-polarization":
            if not dh:
                raise HarnessError("'orbit-polarization' needs a dh system")
            orbit_polarization(obj)
            return InstanceResult(0, True, "")
        if theorem == "graded-fix":
            if not dh:
                raise HarnessError("'graded-fix' needs a dh system")
            fh = obj.fhat()
            for g in obj.tau().gradings:
                for a in (Fraction(2), Fraction(3)):
                    if fh.map_by(g.evaluate(a)) != fh:
                        return InstanceResult(0, False, "Fhat moves")
            return InstanceResult(0, True, "")
        raise HarnessError(f"unknown theorem id {theorem!r}")
    except (ExactError, InvalidSystem) as exc:
        return InstanceResult(0, False, f"error: {exc}")


def run_theorem_campaign(theorem: str, count: int, n: int, dims: int,
                         seed: int = 0,
                         sampler: RaySampler = RaySampler(),
                         agrid=DEFAULT_AGRID, kind: str = "deligne",
                         jobs: int = 1) -> CampaignReport:
    if theorem not in THEOREMS:
        raise HarnessError(f"unknown theorem id {theorem!r}; "
                           f"known: {', '.join(THEOREMS)}")
    config = {
        "count": str(count), "n": str(n), "dims": str(dims),
        "seed": str(seed), "kind": kind,
        "tgrid": ",".join(str(t) for t in sampler.tgrid),
        "agrid": ",".join(str(a) for a in agrid),
    }
    args = [(theorem, kind, n, dims, seed + i, sampler, tuple(agrid))
            for i in range(count)]
    if jobs > 1:
        import multiprocessing
        with multiprocessing.Pool(jobs) as pool:
            results = pool.starmap(_check_instance, args)
    else:
        results = [_check_instance(*a) for a in args]
    results.sort(key=lambda r: r.seed)
    return CampaignReport(theorem, config, results)
