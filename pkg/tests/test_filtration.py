from fractions import Fraction

import pytest

from dsys.exactfield import GRat, Mat, Subspace, grat, vec
from dsys.filtration import (
    FiltrationError, Grading, IncFiltration, ad_matrix, compute_rmf,
    hom_grading, hom_induced, induced_on_graded, monodromy_filtration,
    primitive_component, respects, verify_rmf, weight_filtration_of,
)


def mat(rows):
    return Mat([[grat(x) for x in r] for r in rows])


def span(ambient, *vectors):
    return Subspace.span(ambient, [vec(v) for v in vectors])


J3 = mat([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
W0_3 = IncFiltration.pure(3, 0)

# P1: 2-dim, W0 = 0 < W1 = V, N e2 = e1
NP1 = mat([[0, 1], [0, 0]])
WP1 = IncFiltration.from_steps(2, {0: Subspace.zero(2), 1: Subspace.full(2)})


class TestIncFiltration:
    def test_at(self):
        assert WP1.at(0).dim == 0
        assert WP1.at(5).dim == 2
        assert WP1.at(-3).dim == 0

    def test_from_steps_rejects_non_nested(self):
        with pytest.raises(FiltrationError):
            IncFiltration.from_steps(
                2, {0: span(2, (0, 1)), 1: span(2, (1, 0))})

    def test_restrict(self):
        u = span(3, (1, 0, 0), (0, 1, 0))
        w = IncFiltration.from_steps(
            3, {-1: span(3, (1, 0, 0)), 1: Subspace.full(3)})
        r = w.restrict(u)
        assert r.at(-1).dim == 1 and r.at(1).dim == 2


class TestGrading:
    def test_projectors(self):
        g = Grading.from_parts(2, {0: span(2, (1, 0)), 2: span(2, (1, 1))})
        p0, p2 = g.projector(0), g.projector(2)
        assert p0 + p2 == Mat.identity(2)
        assert p0 @ p0 == p0 and p0 @ p2 == Mat.zero(2, 2)

    def test_evaluate(self):
        g = Grading.from_parts(2, {0: span(2, (1, 0)), 2: span(2, (0, 1))})
        a = g.evaluate(Fraction(2))
        assert a == mat([[1, 0], [0, 4]])

    def test_weight_filtration_trivial(self):
        g = Grading.trivial(3, 0)
        wf = weight_filtration_of(g)
        assert wf.jumps() == (0,)

    def test_weight_filtration_p1(self):
        # alpha of the 2-dim anchor: weights 0 and 2
        g = Grading.from_parts(2, {0: span(2, (1, 0)), 2: span(2, (0, 1))})
        wf = weight_filtration_of(g)
        assert wf.at(0) == span(2, (1, 0))
        assert wf.at(1) == span(2, (1, 0))
        assert wf.at(2).dim == 2

    def test_component(self):
        g = Grading.from_parts(2, {0: span(2, (1, 0)), 2: span(2, (0, 1))})
        assert g.component(NP1, -2) == NP1
        assert g.component(NP1, 0).is_zero()
        assert g.has_pure_weight(NP1, -2)

    def test_grading_checked_at_two_points(self):
        # invariance at a = 2 and a = 3 forces pure weight 0 (all components
        # except 0 vanish): the two-evaluation check equals the for-all-a one
        g = Grading.from_parts(3, {-1: span(3, (1, 0, 0)),
                                   0: span(3, (0, 1, 0)),
                                   2: span(3, (0, 0, 1))})
        m = mat([[1, 2, 0], [0, 3, 0], [1, 0, 5]])
        inv2 = g.evaluate(2) @ m @ g.evaluate(Fraction(1, 2)) == m
        inv3 = g.evaluate(3) @ m @ g.evaluate(Fraction(1, 3)) == m
        assert not (inv2 and inv3)
        m0 = g.component(m, 0)
        assert g.evaluate(2) @ m0 @ g.evaluate(Fraction(1, 2)) == m0
        assert g.evaluate(3) @ m0 @ g.evaluate(Fraction(1, 3)) == m0

    def test_splitting_map(self):
        g = Grading.from_parts(2, {0: span(2, (1, 1)), 2: span(2, (0, 1))})
        w = g.weight_filtration()
        s = g.splitting_map(w)
        # columns: weight-0 rep maps to (1,1); weight-2 rep to (0,1)
        assert s.col(0) == vec((1, 1))


class TestMonodromy:
    def test_zero_operator(self):
        m = monodromy_filtration(Mat.zero(2, 2), center=0)
        assert m.jumps() == (0,)

    def test_j2(self):
        n = mat([[0, 1], [0, 0]])
        m = monodromy_filtration(n, center=0)
        assert m.at(-1) == span(2, (1, 0))
        assert m.at(0) == span(2, (1, 0))
        assert m.at(1).dim == 2
        assert m.at(-2).dim == 0

    def test_j3(self):
        m = monodromy_filtration(J3, center=0)
        assert m.at(-2) == span(3, (1, 0, 0))
        assert m.at(-1) == span(3, (1, 0, 0))
        assert m.at(0) == span(3, (1, 0, 0), (0, 1, 0))
        assert m.at(1) == m.at(0)
        assert m.at(2).dim == 3


class TestVerifyRmf:
    def test_zero_n(self):
        assert verify_rmf(W0_3, Mat.zero(3, 3), W0_3).ok

    def test_j3_by_hand(self):
        wp = IncFiltration.from_steps(3, {
            -2: span(3, (1, 0, 0)),
            0: span(3, (1, 0, 0), (0, 1, 0)),
            2: Subspace.full(3)})
        assert verify_rmf(W0_3, J3, wp).ok

    def test_p1_wrong_candidate(self):
        rep = verify_rmf(WP1, NP1, WP1)
        assert not rep.ok
        assert any("w=1" in f for f in rep.failures)

    def test_requires_respect(self):
        w = IncFiltration.from_steps(2, {0: span(2, (0, 1)),
                                         1: Subspace.full(2)})
        with pytest.raises(FiltrationError):
            verify_rmf(w, NP1, w)


class TestComputeRmf:
    def test_n_zero_returns_w(self):
        w = IncFiltration.from_steps(
            3, {-1: span(3, (1, 0, 0)), 1: Subspace.full(3)})
        assert compute_rmf(w, Mat.zero(3, 3)) == w

    def test_j3(self):
        wp = compute_rmf(W0_3, J3)
        assert wp.at(-2) == span(3, (1, 0, 0))
        assert wp.at(-1) == span(3, (1, 0, 0))
        assert wp.at(0) == span(3, (1, 0, 0), (0, 1, 0))
        assert wp.at(2).dim == 3

    def test_p1(self):
        wp = compute_rmf(WP1, NP1)
        assert wp.at(0) == span(2, (1, 0))
        assert wp.at(1) == span(2, (1, 0))
        assert wp.at(2).dim == 2
        alpha = Grading.from_parts(2, {0: span(2, (1, 0)),
                                       2: span(2, (0, 1))})
        assert wp == weight_filtration_of(alpha)

    def test_uniqueness_perturbation(self):
        wp = compute_rmf(W0_3, J3)
        # move a vector from the next step down: still a filtration but no
        # longer the relative monodromy filtration
        bad = IncFiltration.from_steps(3, {
            -2: wp.at(-2) + span(3, (0, 1, 0)),
            0: wp.at(0),
            2: Subspace.full(3)})
        assert not verify_rmf(W0_3, J3, bad).ok

    def test_nonexistent(self):
        # W with two weights, N mapping the top graded iso onto the bottom:
        # N e2 = e1 with W_{-1} = <e1>, W_0 = V has no relative monodromy
        # filtration (the classic counterexample shape).
        w = IncFiltration.from_steps(
            2, {-1: span(2, (1, 0)), 0: Subspace.full(2)})
        assert compute_rmf(w, NP1) is None

    def test_mixed_exists(self):
        # W = P1 shape ⊕ trivial weight-0 line
        n = mat([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
        w = IncFiltration.from_steps(3, {
            0: span(3, (0, 0, 1)),
            1: Subspace.full(3)})
        wp = compute_rmf(w, n)
        assert wp is not None
        assert verify_rmf(w, n, wp).ok
        assert wp.at(0) == span(3, (1, 0, 0), (0, 0, 1))

    def test_restriction_stability(self):
        # restriction of the computed filtration to W_a equals the
        # filtration computed on the restriction
        n = mat([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
        w = IncFiltration.from_steps(3, {
            0: span(3, (0, 0, 1)),
            1: Subspace.full(3)})
        wp = compute_rmf(w, n)
        u = w.at(0)
        sub = compute_rmf(w.restrict(u), mat([[0]]))
        assert wp.restrict(u) == sub


class TestInduced:
    def test_f_equals_w(self):
        ind = induced_on_graded(WP1, WP1, 1)
        assert ind.at(0).dim == 0 and ind.at(1).dim == 2

    def test_j3_bigraded_dims(self):
        wp = compute_rmf(W0_3, J3)
        ind = induced_on_graded(wp, W0_3, 0)
        dims = ind.graded_dims()
        assert dims == {-2: 1, 0: 1, 2: 1}

    def test_hom_trivial(self):
        h = hom_induced(IncFiltration.pure(2, 0))
        assert h.jumps() == (0,)
        assert h.at(0).dim == 4

    def test_hom_p1_weight_of_n(self):
        wp = compute_rmf(WP1, NP1)  # this is W^(1) of the anchor
        h = hom_induced(wp)
        flat = vec((0, 1, 0, 0))  # N as a flattened matrix
        assert h.at(-2).contains_vector(flat)
        assert not h.at(-3).contains_vector(flat)

    def test_ad_rmf_compatibility(self):
        # Hom-induced of the relative monodromy filtration is the relative
        # monodromy filtration of Ad(N) on the Hom-induced base filtration
        wp = compute_rmf(W0_3, J3)
        lhs = hom_induced(wp)
        rhs = compute_rmf(hom_induced(W0_3), ad_matrix(J3))
        assert lhs == rhs

    def test_hom_grading_splits(self):
        g = Grading.from_parts(2, {0: span(2, (1, 0)), 2: span(2, (0, 1))})
        hg = hom_grading(g)
        assert sum(hg.part(w).dim for w in hg.weights()) == 4
        assert hg.splits(hom_induced(g.weight_filtration()))


class TestPrimitive:
    def test_zero_n(self):
        w = IncFiltration.pure(2, 0)
        p0 = primitive_component(w, Mat.zero(2, 2), w, 0, 0)
        assert p0.primitive.dim == 2 and p0.is_direct_sum()
        p1 = primitive_component(w, Mat.zero(2, 2), w, 0, 1)
        assert p1.dim == 0

    def test_j3_top(self):
        wp = compute_rmf(W0_3, J3)
        p = primitive_component(W0_3, J3, wp, 0, 2)
        assert p.dim == 1 and p.primitive.dim == 1 and p.image_part.dim == 0

    def test_j3_middle_not_primitive(self):
        wp = compute_rmf(W0_3, J3)
        p = primitive_component(W0_3, J3, wp, 0, 0)
        # middle piece of a single Jordan block is entirely an image
        assert p.dim == 1 and p.primitive.dim == 0 and p.image_part.dim == 1

    def test_j3_plus_j1(self):
        n = J3.direct_sum(Mat.zero(1, 1))
        w = IncFiltration.pure(4, 0)
        wp = compute_rmf(w, n)
        p = primitive_component(w, n, wp, 0, 0)
        assert p.dim == 2 and p.primitive.dim == 1 and p.image_part.dim == 1
        assert p.is_direct_sum()


class TestAdCompatRandom:
    def test_ad_rmf_on_generated_pairs(self):
        # hom-induced of the relative filtration == relative filtration of
        # ad(N) over the hom-induced base, on small generated systems
        from dsys.harness import generate
        for seed in (0, 3):
            sysm = generate("deligne", 1, 3, seed, "none").system
            w, n = sysm.W, sysm.N[0]
            wp = compute_rmf(w, n)
            assert hom_induced(wp) == compute_rmf(hom_induced(w),
                                                  ad_matrix(n))
