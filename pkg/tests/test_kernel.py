from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from koszul_bv.kernel import (QQ, GF, FieldError, NotSemisimpleOverField, SparseMatrix,
                              determinant, eigenspace_decomposition, field_from_descriptor,
                              homology, inverse, kernel_basis, lagrange_projection,
                              monomial_values, rank, solve)

F7 = GF(7)


def dense(rows, field=QQ):
    return SparseMatrix.from_dense(rows, field)


def matrices(max_dim=5, lo=-3, hi=3):
    return st.integers(1, max_dim).flatmap(lambda r: st.integers(1, max_dim).flatmap(
        lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c),
                           min_size=r, max_size=r)))


# -- spec examples

def test_rank_examples():
    assert rank(SparseMatrix.identity(2)) == 2
    assert rank(SparseMatrix.zero(3, 4)) == 0
    assert rank(dense([[1, 2], [2, 4]])) == 1


def test_kernel_basis_examples():
    assert kernel_basis(SparseMatrix.identity(3)) == []
    assert len(kernel_basis(SparseMatrix.zero(2, 3))) == 3
    (v,) = kernel_basis(dense([[1, 1]]))
    assert v[0] + v[1] == 0 and v


def test_solve_examples():
    v = {0: Fraction(3), 1: Fraction(-1)}
    assert solve(SparseMatrix.identity(2), v) == v
    assert solve(SparseMatrix.zero(2, 2), {0: 1}) is None
    assert solve(dense([[2]]), {0: 1}) == {0: Fraction(1, 2)}


def test_homology_examples():
    # 0 -> k -> 0
    H = homology(SparseMatrix.zero(1, 0), SparseMatrix.zero(0, 1))
    assert H.dim == 1
    # k --id--> k --0--> 0
    H = homology(SparseMatrix.identity(1), SparseMatrix.zero(0, 1))
    assert H.dim == 0


def test_eigen_examples():
    (lam, basis), = eigenspace_decomposition(SparseMatrix.identity(3))
    assert lam == 1 and len(basis) == 3
    dec = eigenspace_decomposition(SparseMatrix.diagonal([2, Fraction(1, 2)]))
    assert sorted(l for l, _ in dec) == [Fraction(1, 2), 2]
    assert all(len(b) == 1 for _, b in dec)
    with pytest.raises(NotSemisimpleOverField):
        eigenspace_decomposition(dense([[1, 1], [0, 1]]))


def test_eigenvalues_need_roots_in_field():
    # x^2 + 1 has no rational root, but splits mod 5
    M = [[0, -1], [1, 0]]
    with pytest.raises(NotSemisimpleOverField):
        eigenspace_decomposition(dense(M))
    assert len(eigenspace_decomposition(dense(M, GF(5)))) == 2


def test_prime_field():
    assert F7(3) / F7(5) * F7(5) == F7(3)
    assert F7.parse("1/2") * 2 == F7.one
    assert field_from_descriptor({"Fp": 7}) == F7
    assert field_from_descriptor("Q") == QQ
    with pytest.raises(FieldError):
        GF(8)
    with pytest.raises(FieldError):
        QQ.parse("x")


def test_lagrange_and_monomials():
    M = SparseMatrix.diagonal([2, 3, 3])
    P = lagrange_projection(M, QQ(3), [QQ(2), QQ(3)])
    assert P == SparseMatrix.diagonal([0, 1, 1])
    assert monomial_values([QQ(2), QQ(1) / 2], 2) == [Fraction(1, 4), 1, 4]


# -- properties

@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_nullity(rows):
    M = dense(rows)
    K = kernel_basis(M)
    assert rank(M) + len(K) == M.cols
    for v in K:
        assert not M.apply(v)


@settings(max_examples=60, deadline=None)
@given(matrices(), st.sampled_from([QQ, F7]))
def test_solve_finds_preimages(rows, field):
    M = dense(rows, field)
    x = {j: field(j + 1) for j in range(M.cols)}
    b = M.apply(x)
    y = solve(M, b)
    assert y is not None and M.apply(y) == b


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(
    st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_inverse_and_determinant(rows):
    M = dense(rows)
    if determinant(M) == 0:
        assert rank(M) < M.rows
        with pytest.raises(ZeroDivisionError):
            inverse(M)
    else:
        assert M @ inverse(M) == SparseMatrix.identity(M.rows)


@settings(max_examples=40, deadline=None)
@given(matrices(4), matrices(4))
def test_homology_dimension_formula(a, b):
    # build d_out o d_in = 0 by projecting d_in into ker d_out
    d_out = dense(a)
    K = kernel_basis(d_out)
    cols = [dict(K[j % len(K)]) if K else {} for j in range(len(b[0]))]
    d_in = SparseMatrix.from_columns(d_out.cols, len(cols), cols)
    H = homology(d_in, d_out)
    assert H.dim == d_out.cols - rank(d_out) - rank(d_in)
    for z in H.reps:
        assert H.is_cycle(z) and not H.is_boundary(z)
