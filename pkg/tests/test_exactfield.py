from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dsys.exactfield import (
    GRat, I, Mat, ONE, QuotientMap, Rat, Subspace, ZERO, format_scalar,
    grat, hermitian_posdef, nullspace, parse_scalar, pivot_complement,
    realify_matrix, realify_subspace, solve_linear, vec,
)

rats = st.fractions(min_value=-30, max_value=30, max_denominator=12)
grats = st.builds(GRat, rats, rats)


def mat(rows):
    return Mat([[grat(x) for x in r] for r in rows])


J3 = mat([[0, 1, 0], [0, 0, 1], [0, 0, 0]])


class TestScalars:
    def test_arith(self):
        z = GRat(1, 2)
        w = GRat(Fraction(1, 3), -1)
        assert z * w == GRat(Fraction(1, 3) + 2, Fraction(2, 3) - 1)
        assert (z / w) * w == z
        assert z - z == ZERO
        assert I * I == GRat(-1)

    def test_pow(self):
        assert I ** 2 == GRat(-1)
        assert GRat(2) ** -2 == GRat(Fraction(1, 4))

    @given(grats)
    @settings(max_examples=60)
    def test_parse_roundtrip(self, z):
        assert parse_scalar(format_scalar(z)) == z

    @given(rats)
    @settings(max_examples=40)
    def test_rat_roundtrip(self, x):
        assert parse_scalar(str(x)) == GRat(x)

    def test_parse_forms(self):
        assert parse_scalar("i") == I
        assert parse_scalar("-i") == -I
        assert parse_scalar("3/2-1/4i") == GRat(Fraction(3, 2), Fraction(-1, 4))
        assert parse_scalar("2i") == GRat(0, 2)
        with pytest.raises(Exception):
            parse_scalar("1.5")

    @given(grats, grats)
    @settings(max_examples=40)
    def test_conj_mult(self, a, b):
        assert (a * b).conj() == a.conj() * b.conj()


class TestMat:
    def test_mul_identity(self):
        m = mat([[1, 2], [3, 4]])
        assert m @ Mat.identity(2) == m

    def test_inverse(self):
        m = mat([[1, 2], [3, 4]])
        assert m @ m.inverse() == Mat.identity(2)

    def test_det(self):
        assert mat([[1, 2], [3, 4]]).det() == GRat(-2)
        assert mat([[1, 1], [1, 1]]).det() == ZERO

    def test_nilpotent_exp(self):
        e = J3.exp_nilpotent()
        assert e.apply(vec([0, 0, 1])) == vec([Fraction(1, 2), 1, 1])
        assert J3.is_nilpotent()
        assert not Mat.identity(3).is_nilpotent()

    def test_kron(self):
        a = mat([[1, 1], [0, 1]])
        b = mat([[2]])
        assert a.kron(b) == mat([[2, 2], [0, 2]])


class TestSubspace:
    def test_span_dependent(self):
        s = Subspace.span(2, [vec([1, 0]), vec([2, 0])])
        assert s.dim == 1
        assert s.rows == (vec([1, 0]),)

    def test_empty_span(self):
        s = Subspace.span(3, [])
        assert s.dim == 0 and s.ambient == 3

    def test_rank_oracle(self):
        # oracle: rank of the stacked matrix, by hand gaussian elimination
        s = Subspace.span(3, [vec([1, 1, 0]), vec([0, 1, 1])])
        assert s.dim == 2

    def test_canonical_representation(self):
        a = Subspace.span(3, [vec([1, 1, 0]), vec([0, 1, 1])])
        b = Subspace.span(3, [vec([1, 2, 1]), vec([2, 3, 1])])
        assert a == b and a.rows == b.rows

    def test_intersect_trivial(self):
        a = Subspace.span(2, [vec([1, 0])])
        b = Subspace.span(2, [vec([0, 1])])
        assert a.intersect(b).dim == 0

    def test_preimage_jordan(self):
        e1 = Subspace.span(3, [vec([1, 0, 0])])
        pre = e1.preimage_under(J3)
        assert pre == Subspace.span(3, [vec([1, 0, 0]), vec([0, 1, 0])])

    @given(st.lists(st.lists(rats, min_size=3, max_size=3),
                    min_size=0, max_size=3))
    @settings(max_examples=40)
    def test_sum_idempotent(self, rows):
        a = Subspace.span(3, [vec(r) for r in rows])
        assert a + a == a

    @given(st.data())
    @settings(max_examples=30)
    def test_modular_law(self, data):
        # A <= C:  A + (B & C) == (A + B) & C
        dim = 4
        draw_vecs = lambda k: [vec(data.draw(st.lists(rats, min_size=dim,
                                                      max_size=dim)))
                               for _ in range(k)]
        a = Subspace.span(dim, draw_vecs(1))
        c = a + Subspace.span(dim, draw_vecs(1))
        b = Subspace.span(dim, draw_vecs(2))
        lhs = a + b.intersect(c)
        rhs = (a + b).intersect(c)
        assert lhs == rhs

    @given(st.data())
    @settings(max_examples=30)
    def test_dim_formula(self, data):
        dim = 4
        draw_vecs = lambda k: [vec(data.draw(st.lists(rats, min_size=dim,
                                                      max_size=dim)))
                               for _ in range(k)]
        a = Subspace.span(dim, draw_vecs(2))
        b = Subspace.span(dim, draw_vecs(2))
        assert a.dim + b.dim == (a + b).dim + a.intersect(b).dim

    def test_image_preimage_adjunction(self):
        m = J3
        a = Subspace.span(3, [vec([1, 0, 0]), vec([0, 1, 0])])
        assert a.contains(a.preimage_under(m).image_under(m))

    def test_hermitian_projector(self):
        s = Subspace.span(3, [vec([1, I, 0])])
        p = s.hermitian_projector()
        assert p @ p == p
        assert p == p.conj_T()
        assert p.apply(s.rows[0]) == s.rows[0]

    def test_annihilator(self):
        s = Subspace.span(3, [vec([1, 1, 0])])
        k = s.annihilator()
        assert k.rows == 2
        assert all(x.is_zero() for x in k.apply(s.rows[0]))


class TestSolve:
    def test_solve_particular(self):
        a = mat([[1, 2, 0], [0, 0, 1]])
        x = solve_linear(a, vec([3, 5]))
        assert x is not None and a.apply(x) == vec([3, 5])

    def test_solve_inconsistent(self):
        a = mat([[1, 1], [1, 1]])
        assert solve_linear(a, vec([0, 1])) is None

    def test_nullspace(self):
        n = nullspace(mat([[1, 1, 0]]))
        assert n.dim == 2
        assert all(x.is_zero() for r in n.rows
                   for x in mat([[1, 1, 0]]).apply(r))


class TestQuotient:
    def test_full_by_zero(self):
        q = QuotientMap(Subspace.full(3), Subspace.zero(3))
        assert q.dim == 3
        assert q.induced(J3) == J3

    def test_full_by_full(self):
        q = QuotientMap(Subspace.full(2), Subspace.full(2))
        assert q.dim == 0

    def test_gr_of_p1(self):
        # weight-1 graded piece of W0=0 < W1=V on a 2-dim space
        q = QuotientMap(Subspace.full(2), Subspace.zero(2))
        assert q.dim == 2

    def test_project_lift(self):
        total = Subspace.full(3)
        sub = Subspace.span(3, [vec([1, 0, 0])])
        q = QuotientMap(total, sub)
        v = vec([5, 2, 3])
        assert q.project(v) == q.project(q.lift(q.project(v)))

    def test_pivot_complement_nested(self):
        inner = Subspace.span(3, [vec([1, 2, 0])])
        outer = Subspace.span(3, [vec([1, 2, 0]), vec([0, 0, 1])])
        reps = pivot_complement(inner, outer)
        assert len(reps) == 1


class TestHermitian:
    def test_posdef(self):
        assert hermitian_posdef(mat([[2, 0], [0, 3]]))
        assert not hermitian_posdef(mat([[1, 0], [0, -1]]))
        h = Mat([[GRat(2), I], [-I, GRat(1)]])
        assert hermitian_posdef(h)

    def test_realify(self):
        m = Mat([[I]])
        r = realify_matrix(m)
        # i acts as a rotation on (re, im)
        assert r == mat([[0, -1], [1, 0]])
        s = realify_subspace(Subspace.span(1, [vec([1])]))
        assert s.dim == 2
