from fractions import Fraction

import pytest

from koszul_bv.algebra import expand, koszul_dual_coalgebra, quadratic_dual
from koszul_bv.frobenius import detect_frobenius, nakayama_of_A, sigma_star
from koszul_bv.hochschild import (OperatorBlocks, bar_chains, coalgebra_chains, graded_chains,
                                  graded_cochains)
from koszul_bv.kernel import SparseMatrix, eigenspace_decomposition

from criteria import poly2, qplane


@pytest.fixture(scope="module")
def qp():
    pres = qplane()
    Ad = expand(quadratic_dual(pres), 3)
    fr = detect_frobenius(Ad)
    A = expand(pres, 4)
    C = koszul_dual_coalgebra(pres, 3)
    return dict(A=A, Ad=Ad, C=C, fr=fr, sA=nakayama_of_A(fr, A, C), ss=sigma_star(fr, A, C))


def test_weight_zero_and_one():
    bar = bar_chains(expand(poly2(), 3), 3)
    assert bar.dim((0, 0)) == 1 and bar.b(1, 1).is_zero()
    assert bar.homology(0, 0).dim == 1
    # H_0 and H_1 at weight 1: A_1 and A_0 (x) A_1
    assert (bar.homology(0, 1).dim, bar.homology(1, 1).dim) == (2, 2)


def test_B_on_length_zero(qp):
    bar = bar_chains(qp["A"], 3, qp["sA"])
    x = ((1, 0),)
    assert bar.B_label(x) == {((0, 0), (1, 0)): 1}
    assert bar.B_label(((0, 0),)) == {}


def test_untwisted_identities():
    bar = bar_chains(expand(poly2(), 3), 3)
    assert bar.check_mixed()
    for (p, w) in bar.cells():
        assert bar.T(p, w) == SparseMatrix.identity(bar.dim((p, w)))


def test_identity_twist_is_untwisted(qp):
    A = expand(poly2(), 3)
    ident = nakayama_of_A(detect_frobenius(expand(quadratic_dual(poly2()), 3)), A)
    plain, twisted = bar_chains(A, 3), bar_chains(A, 3, ident)
    for cell in plain.cells():
        if cell[0]:
            assert plain.complex.d(*cell) == twisted.complex.d(*cell)
        assert plain.B(*cell) == twisted.B(*cell)


def test_T_on_generators(qp):
    bar = bar_chains(qp["A"], 4, qp["sA"])
    T = bar.T(0, 1).to_dense()
    assert T == [[2, 0], [0, Fraction(1, 2)]]
    assert bar.check_T_commutes()


def test_homotopy_T_quantum_plane(qp):
    bar = bar_chains(qp["A"], 4, qp["sA"])
    assert bar.check_homotopy_T()
    CC = coalgebra_chains(qp["C"], 6, qp["ss"])
    assert CC.check_homotopy_T()
    assert max(p for p, _ in CC.interior_cells()) >= 4


def test_eigen_blocks_weight_2(qp):
    bar = bar_chains(qp["A"], 4, qp["sA"])
    EB = bar.eigen_blocks()
    assert EB.check_decomposition()
    assert sorted(set(EB.basis[(1, 2)])) == [Fraction(1, 4), 1, 4]
    for lam in EB.eigenvalues:
        if lam != 1:
            assert not any(EB.block_homology_dims(lam).values())


def test_coalgebra_blocks(qp):
    CC = coalgebra_chains(qp["C"], 5, qp["ss"])
    ss = qp["ss"]
    vals = [l for l, _ in eigenspace_decomposition(SparseMatrix.from_dense(ss.V, ss.field))]
    ob = OperatorBlocks(CC, vals)
    assert ob.check_decomposition()
    CC.complex.check_square_zero()
    for lam in ob.eigenvalues():
        if lam != 1:
            assert not any(ob.block_homology_dims(lam).values())
    assert any(ob.block_homology_dims(1).values())


def test_graded_chains_mixed_and_twisted(qp):
    E = graded_chains(qp["Ad"], 5, qp["fr"].sigma)
    assert E.check_homotopy_T()
    E0 = graded_chains(qp["Ad"], 5)
    assert E0.check_mixed()


def test_graded_cochains_hkr_exterior():
    # HH^*(Lambda(xi, eta)) is k[x,y] (x) Lambda(d_x, d_y) up to regrading
    Ad = expand(quadratic_dual(poly2()), 3)
    G = graded_cochains(Ad, -3, 2)
    G.complex.check_square_zero()
    assert [G.complex.homology(0, q).dim for q in (0, -1, -2, -3)] == [1, 2, 3, 4]
    assert G.complex.homology(2, 2).dim == 1
    assert G.in_window((5, 7)) and not G.in_window((0, -9))


def _pairing(CC, E, Ad, cell):
    pr = CC.pairing(Ad, cell)
    idx = E.index[cell]
    cols = [{idx[k]: v for k, v in pr[s].items()} for s in range(CC.dim(cell))]
    return SparseMatrix.from_columns(len(idx), len(cols), cols, Ad.field)


@pytest.mark.parametrize("pres", [poly2(), qplane()], ids=["poly2", "qplane"])
def test_coalgebra_operators_are_transposes(pres):
    Ad = expand(quadratic_dual(pres), 3)
    A = expand(pres, 3)
    C = koszul_dual_coalgebra(pres, 3)
    fr = detect_frobenius(Ad)
    E = graded_chains(Ad, 5, fr.sigma)
    CC = coalgebra_chains(C, 5, sigma_star(fr, A, C))
    for (p, d) in CC.cells():
        P0 = _pairing(CC, E, Ad, (p, d))
        if (p + 1, d) in CC.labels:
            assert E.b(p + 1, d).T @ P0 == _pairing(CC, E, Ad, (p + 1, d)) @ CC.delta(p, d)
        if p >= 1:
            assert E.B(p - 1, d).T @ P0 == _pairing(CC, E, Ad, (p - 1, d)) @ CC.B(p, d)
        assert E.T(p, d).T @ P0 == P0 @ CC.T(p, d)
