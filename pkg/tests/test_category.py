from fractions import Fraction

import pytest

from dsys.exactfield import GRat, Mat, Subspace, grat, vec
from dsys.filtration import Grading, IncFiltration
from dsys.hodge import DecFiltration
from dsys.deligne import DeligneSystem
from dsys.dh import DHSystem
from dsys.sl2 import decompose, is_orbit, reconstruct
from dsys.category import (
    CategoryError, Morphism, abelian_witness, cokernel, direct_sum, dual,
    kernel, sym, tate, tensor, wedge,
)


def mat(rows):
    return Mat([[grat(x) for x in r] for r in rows])


def span(ambient, *vectors):
    return Subspace.span(ambient, [vec(v) for v in vectors])


F_LINE = DecFiltration.from_steps(1, {0: Subspace.full(1),
                                      1: Subspace.zero(1)})


def p1_deligne():
    w = IncFiltration.from_steps(2, {0: Subspace.zero(2),
                                     1: Subspace.full(2)})
    alpha = Grading.from_parts(2, {0: span(2, (1, 0)), 2: span(2, (0, 1))})
    return DeligneSystem("rat", 2, 1, w, (mat([[0, 1], [0, 0]]),), alpha)


def s_line(k=0):
    # character object: alpha = a^k on a line, N = 0
    alpha = Grading.from_parts(1, {k: Subspace.full(1)})
    return DeligneSystem("rat", 1, 1, IncFiltration.pure(1, k),
                         (Mat.zero(1, 1),), alpha)


def p1_dh():
    w = IncFiltration.from_steps(2, {0: Subspace.zero(2),
                                     1: Subspace.full(2)})
    f = DecFiltration.from_steps(2, {0: Subspace.full(2),
                                     1: span(2, (0, 1)),
                                     2: Subspace.zero(2)})
    return DHSystem(2, 1, w, (mat([[0, 1], [0, 0]]),), f)


class TestMorphism:
    def test_identity_kernel_cokernel(self):
        a = p1_deligne()
        f = Morphism(a, a, Mat.identity(2))
        ker, _ = kernel(f)
        cok, _ = cokernel(f)
        assert ker.dim == 0 and cok.dim == 0

    def test_zero_morphism(self):
        a = p1_deligne()
        b = s_line()
        z = Morphism(a, b, Mat.zero(1, 2))
        ker, _ = kernel(z)
        cok, _ = cokernel(z)
        assert ker.dim == 2 and cok.dim == 1
        assert ker.validate().ok and cok.validate().ok

    def test_projection_from_sum(self):
        a = p1_deligne()
        s = s_line()
        tot = direct_sum(a, s)
        proj = Morphism(tot, a, mat([[1, 0, 0], [0, 1, 0]]))
        ker, inc = kernel(proj)
        assert ker.dim == 1
        assert ker.validate().ok
        assert ker.N[0].is_zero()

    def test_invalid_morphism_rejected(self):
        a = p1_deligne()
        bad = Morphism(a, a, mat([[0, 0], [1, 0]]))  # raises weight
        with pytest.raises(CategoryError):
            bad.check()

    def test_abelian_witness(self):
        a = p1_deligne()
        s = s_line()
        tot = direct_sum(a, s)
        proj = Morphism(tot, a, mat([[1, 0, 0], [0, 1, 0]]))
        wit = abelian_witness(proj)
        assert wit.kernel.dim == 1 and wit.image.dim == 2
        assert wit.coimage.dim == 2 and wit.cokernel.dim == 0
        assert wit.iso.rank() == 2

    def test_dh_morphism_kernel(self):
        a = p1_dh()
        tot = direct_sum(a, a)
        f = Morphism(tot, a, mat([[1, 0, 0, 0], [0, 1, 0, 0]]))
        ker, _ = kernel(f)
        assert ker.dim == 2 and ker.validate().ok
        wit = abelian_witness(f)
        assert wit.image.dim == 2


class TestConstructors:
    def test_dual_p1(self):
        d = dual(p1_deligne())
        assert d.validate().ok
        assert d.alpha.weights() == (-2, 0)
        assert d.W.jumps() == (-1,)
        assert is_orbit(d)

    def test_dual_dh(self):
        d = dual(p1_dh())
        assert d.validate().ok
        assert d.F.jumps()[-1] == 1
        assert is_orbit(d)

    def test_tate_twist(self):
        s = s_line(0)
        t = tate(s, 1)
        assert t.alpha.weights() == (-2,)
        assert t.W.jumps() == (-2,)
        assert t.validate().ok

    def test_tate_dh(self):
        t = tate(p1_dh(), 1)
        assert t.validate().ok
        assert t.F.jumps() == (0, 1)
        assert t.F.at(0) == span(2, (0, 1))

    def test_tensor_p1_p1_clebsch_gordan(self):
        t = tensor(p1_dh(), p1_dh())
        assert t.dim == 4 and t.validate().ok
        assert is_orbit(t)
        dec = decompose(t)
        got = sorted((c.m, c.k, c.mult_dim) for c in dec.components)
        assert got == [((0,), 2, 1), ((2,), 0, 1)]

    def test_tensor_deligne(self):
        t = tensor(p1_deligne(), p1_deligne())
        assert t.validate().ok
        assert is_orbit(t)
        dec = decompose(t)
        assert sorted(c.m for c in dec.components) == [(0,), (2,)]

    def test_sym2(self):
        s = sym(p1_dh(), 2)
        assert s.dim == 3
        assert s.validate().ok
        assert is_orbit(s)
        dec = decompose(s)
        assert [(c.m, c.k) for c in dec.components] == [((2,), 0)]

    def test_wedge2(self):
        w = wedge(p1_dh(), 2)
        assert w.dim == 1
        assert w.validate().ok
        # top exterior power of the standard plane: a twist of the line
        assert w.W.jumps() == (2,)

    def test_sym_matches_reconstruct(self):
        s = sym(p1_dh(), 2)
        model = reconstruct("dh", 1, [((2,), 0, F_LINE)])
        dec_s = decompose(s)
        dec_m = decompose(model)
        assert [(c.m, c.k, c.mult_dim) for c in dec_s.components] == \
            [(c.m, c.k, c.mult_dim) for c in dec_m.components]

    def test_orbit_closure_under_constructors(self):
        a = p1_dh()
        for obj in (tensor(a, a), sym(a, 2), wedge(a, 2), dual(a),
                    tate(a, 1), direct_sum(a, a)):
            assert is_orbit(obj)

    def test_morphism_intertwines_associated_data(self):
        a = p1_deligne()
        tot = direct_sum(a, a)
        f = Morphism(tot, a, mat([[1, 0, 1, 0], [0, 1, 0, 1]]))
        f.check()
        # f intertwines the tau tuples and the weight-0 parts
        for k in range(2):
            ga = tot.tau().gradings[k]
            gb = a.tau().gradings[k]
            for x in (Fraction(2), Fraction(3)):
                assert f.matrix @ ga.evaluate(x) == gb.evaluate(x) @ f.matrix
        for na, nb in zip(tot.nhat(), a.nhat()):
            assert f.matrix @ na == nb @ f.matrix


class TestTensorTauWeights:
    def test_weights_add_under_tensor(self):
        a = p1_deligne()
        t = tensor(a, a)
        taus_a = a.tau().gradings
        taus_t = t.tau().gradings
        for k in range(2):
            expected = sorted({w1 + w2 for w1 in taus_a[k].weights()
                               for w2 in taus_a[k].weights()})
            assert list(taus_t[k].weights()) == expected
