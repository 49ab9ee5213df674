from fractions import Fraction

import pytest

from dsys.exactfield import GRat, I, Mat, Subspace, grat, vec
from dsys.filtration import Grading, IncFiltration
from dsys.hodge import DecFiltration, verify_polarization
from dsys.deligne import DeligneSystem
from dsys.dh import DHSystem
from dsys.sl2 import (
    OrbitError, decompose, is_orbit, lowering_partner, orbit_polarization,
    ratio_grading, reconstruct, roundtrip_isomorphism, sl2nm_check,
)


def mat(rows):
    return Mat([[grat(x) for x in r] for r in rows])


def span(ambient, *vectors):
    return Subspace.span(ambient, [vec(v) for v in vectors])


def p1_deligne():
    w = IncFiltration.from_steps(2, {0: Subspace.zero(2),
                                     1: Subspace.full(2)})
    alpha = Grading.from_parts(2, {0: span(2, (1, 0)), 2: span(2, (0, 1))})
    return DeligneSystem("rat", 2, 1, w, (mat([[0, 1], [0, 0]]),), alpha)


def p1_dh():
    w = IncFiltration.from_steps(2, {0: Subspace.zero(2),
                                     1: Subspace.full(2)})
    f = DecFiltration.from_steps(2, {0: Subspace.full(2),
                                     1: span(2, (0, 1)),
                                     2: Subspace.zero(2)})
    return DHSystem(2, 1, w, (mat([[0, 1], [0, 0]]),), f)


class TestOrbitPredicate:
    def test_p1(self):
        assert is_orbit(p1_deligne())
        assert is_orbit(p1_dh())

    def test_n0_deligne_always(self):
        sys = DeligneSystem("rat", 1, 0, IncFiltration.pure(1, 0), (),
                            Grading.trivial(1, 0))
        assert is_orbit(sys)

    def test_f_perturbation_gated_on_provider(self):
        # a Hodge-side perturbation with delta != 0 breaks the orbit
        # conditions; computing tau there needs a zeta table (delta = 0
        # systems always satisfy tau_k(a) F = F, so the zero provider's
        # domain contains no F-side counterexamples)
        from dsys.hodge import TableZetaProvider, ZetaDomainError
        w = IncFiltration.from_steps(2, {0: span(2, (1, 0)),
                                         2: Subspace.full(2)})
        f = DecFiltration.from_steps(2, {
            0: Subspace.full(2),
            1: span(2, (GRat(0, 1), 1)),  # e2 + i e1: delta != 0
            2: Subspace.zero(2)})
        pert = DHSystem(2, 0, w, (), f)
        assert pert.validate().ok
        with pytest.raises(ZetaDomainError):
            is_orbit(pert)
        gated = DHSystem(2, 0, w, (), f,
                         zeta_provider=TableZetaProvider([]))
        assert not is_orbit(gated)

    def test_recombination_breaks_orbit_and_recovers(self):
        # lower-triangular recombination: still valid with the same tower,
        # no longer an orbit, associated orbit recovers the seed exactly
        f_line = DecFiltration.from_steps(1, {0: Subspace.full(1),
                                              1: Subspace.zero(1)})
        seed = reconstruct("dh", 2, [((1, 1), 0, f_line)])
        assert is_orbit(seed)
        rec = DHSystem(seed.dim, 2, seed.W,
                       (seed.N[0], seed.N[0] + seed.N[1]), seed.F)
        assert rec.validate().ok
        assert not is_orbit(rec)
        assert rec.associated_sl2() == seed

    def test_deligne_recombination_recovers(self):
        seed = reconstruct("deligne", 2, [((1, 1), 0, 1)])
        assert is_orbit(seed)
        rec = DeligneSystem("rat", seed.dim, 2, seed.W,
                            (seed.N[0], seed.N[0] + seed.N[1]), seed.alpha)
        assert rec.validate().ok
        assert not is_orbit(rec)
        assert rec.associated_sl2() == seed


class TestLoweringPartner:
    def test_p1(self):
        sys = p1_deligne()
        taus = sys.tau().gradings
        f = lowering_partner(sys.N[0], ratio_grading(taus[0], taus[1]))
        assert f == mat([[0, 0], [1, 0]])

    def test_bracket_identities_j3(self):
        w = IncFiltration.pure(3, 0)
        n = mat([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
        alpha = Grading.from_parts(3, {-2: span(3, (1, 0, 0)),
                                       0: span(3, (0, 1, 0)),
                                       2: span(3, (0, 0, 1))})
        sys = DeligneSystem("rat", 3, 1, w, (n,), alpha)
        taus = sys.tau().gradings
        f = lowering_partner(n, ratio_grading(taus[0], taus[1]))
        h = n @ f - f @ n
        assert h @ n - n @ h == n.scale(2)


class TestClassification:
    def test_p1_component(self):
        dec = decompose(p1_dh())
        assert [(c.m, c.k, c.mult_dim) for c in dec.components] == \
            [((1,), 0, 1)]

    def test_s_k_component(self):
        # a pure character: alpha = a^k on a line, N = 0
        alpha = Grading.from_parts(1, {3: Subspace.full(1)})
        sys = DeligneSystem("rat", 1, 1,
                            IncFiltration.pure(1, 3), (Mat.zero(1, 1),),
                            alpha)
        dec = decompose(sys)
        assert [(c.m, c.k) for c in dec.components] == [((0,), 3)]

    def test_tensor_square_clebsch_gordan(self):
        # P1 tensor P1 (n = 1): components at m = (2) and m = (0)
        p = p1_dh()
        d = 4
        n4 = p.N[0].kron(Mat.identity(2)) + Mat.identity(2).kron(p.N[0])
        w4 = IncFiltration.from_steps(4, {1: Subspace.zero(4),
                                          2: Subspace.full(4)})
        # F convolution of the two factors
        f1 = p.F
        steps = {}
        for a in (0, 1):
            for b in (0, 1):
                lvl = a + b
                rows = []
                for r in f1.at(a).rows:
                    for s in f1.at(b).rows:
                        rows.append(tuple(x * y for x in r for y in s))
                cur = steps.get(lvl, Subspace.zero(4))
                steps[lvl] = cur + Subspace.span(4, rows)
        steps[3] = Subspace.zero(4)
        # descending: level p gets everything from products with sum >= p
        acc = {p_: Subspace.zero(4) for p_ in (0, 1, 2)}
        for lvl, s in steps.items():
            for p_ in (0, 1, 2):
                if lvl >= p_:
                    acc[p_] = acc[p_] + s
        acc[3] = Subspace.zero(4)
        f4 = DecFiltration.from_steps(4, acc)
        sys = DHSystem(4, 1, w4, (n4,), f4)
        assert sys.validate().ok
        dec = decompose(sys)
        got = sorted((c.m, c.k, c.mult_dim) for c in dec.components)
        assert got == [((0,), 2, 1), ((2,), 0, 1)]
        # brute-force oracle: joint kernel of N is 2-dimensional
        from dsys.exactfield import nullspace
        assert nullspace(n4).dim == 2

    def test_reconstruct_p1(self):
        f_line = DecFiltration.from_steps(1, {0: Subspace.full(1),
                                              1: Subspace.zero(1)})
        sys = reconstruct("dh", 1, [((1,), 0, f_line)])
        assert sys.dim == 2
        assert sys.validate().ok
        assert is_orbit(sys)
        dec = decompose(sys)
        assert [(c.m, c.k) for c in dec.components] == [((1,), 0)]

    def test_reconstruct_empty(self):
        sys = reconstruct("deligne", 1, [])
        assert sys.dim == 0

    def test_reconstruct_pure_hs(self):
        f = DecFiltration.from_steps(2, {1: span(2, (1, I)),
                                         2: Subspace.zero(2)})
        sys = reconstruct("dh", 2, [((0, 0), 1, f)])
        assert sys.dim == 2
        assert sys.N[0].is_zero() and sys.N[1].is_zero()
        assert sys.W.jumps() == (1,)
        assert is_orbit(sys)

    def test_roundtrip_p1_dh(self):
        phi = roundtrip_isomorphism(p1_dh())
        assert phi == Mat.identity(2)

    def test_roundtrip_sym2(self):
        f_line = DecFiltration.from_steps(1, {0: Subspace.full(1),
                                              1: Subspace.zero(1)})
        sys = reconstruct("dh", 1, [((2,), 0, f_line)])
        phi = roundtrip_isomorphism(sys)
        assert phi.rows == 3


class TestSl2nm:
    def test_p1(self):
        assert sl2nm_check(p1_deligne(), 0, 0, 1, [Fraction(1)])
        assert sl2nm_check(p1_deligne(), 0, 0, 1, [Fraction(-5, 3)])

    def test_sym2_any_nonzero(self):
        f_line = DecFiltration.from_steps(1, {0: Subspace.full(1),
                                              1: Subspace.zero(1)})
        sys = reconstruct("dh", 1, [((2,), 0, f_line)])
        assert sl2nm_check(sys, 0, 0, 1, [Fraction(-1)])

    def test_bounds(self):
        with pytest.raises(OrbitError):
            sl2nm_check(p1_deligne(), 0, 1, 1, [Fraction(1)])


class TestOrbitPolarization:
    def test_p1_anchor(self):
        forms = orbit_polarization(p1_dh())
        gram = forms[1].gram
        # <e2, e1> = 1
        assert gram.data[1][0] == GRat(1) and gram.data[0][1] == GRat(-1)

    def test_weight0_trivial(self):
        f_line = DecFiltration.from_steps(1, {0: Subspace.full(1),
                                              1: Subspace.zero(1)})
        sys = reconstruct("dh", 1, [((0,), 0, f_line)])
        forms = orbit_polarization(sys)
        assert forms[0].gram == Mat.identity(1)

    def test_sym2(self):
        f_line = DecFiltration.from_steps(1, {0: Subspace.full(1),
                                              1: Subspace.zero(1)})
        sys = reconstruct("dh", 1, [((2,), 0, f_line)])
        forms = orbit_polarization(sys)
        assert forms[2].gram.rank() == 3


class TestRepAction:
    def test_anchor_is_scalar_times_matrix(self):
        from dsys.sl2 import RepAction
        rho = RepAction(p1_dh())
        a = Fraction(5, 3)
        g = ((2, 1), (1, 1))
        got = rho.evaluate(a, [g])
        assert got == mat([[2, 1], [1, 1]]).scale(a)

    def test_weyl_branch(self):
        from dsys.sl2 import RepAction
        rho = RepAction(p1_dh())
        g = ((0, 1), (-1, 0))
        assert rho.evaluate(1, [g]) == mat([[0, 1], [-1, 0]])

    def test_homomorphism(self):
        from dsys.sl2 import RepAction
        rho = RepAction(p1_deligne())
        g1 = ((1, 2), (0, 1))
        g2 = ((1, 0), (3, 1))
        prod = ((7, 2), (3, 1))
        assert rho.evaluate(2, [g1]) @ rho.evaluate(3, [g2]) == \
            rho.evaluate(6, [prod])

    def test_torus_is_tau_ratio(self):
        from dsys.sl2 import RepAction
        sys = p1_deligne()
        rho = RepAction(sys)
        taus = sys.tau().gradings
        a = Fraction(2)
        got = rho.evaluate(1, [((Fraction(1, 2), 0), (0, 2))])
        exp = taus[1].evaluate(a) @ taus[0].evaluate(Fraction(1, 2))
        assert got == exp
