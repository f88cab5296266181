import itertools

import pytest

from koszul_bv.algebra import QuadraticPresentation, expand, koszul_dual_coalgebra, quadratic_dual
from koszul_bv.duality import (KoszulModelOps, TheoremSetup, convolution_cup, cup_constants,
                               inclusion_q, koszul_cochain, koszul_twisted, pd_map,
                               restriction_to_koszul, verify_main_theorem)
from koszul_bv.frobenius import detect_frobenius, nakayama_of_A
from koszul_bv.hochschild import bar_chains, graded_cochains
from koszul_bv.kernel import QQ, SparseMatrix, rank

from criteria import poly2, polyvector_dims, qplane


@pytest.fixture(scope="module")
def kxy():
    return TheoremSetup(poly2(), W=3, P=5)


@pytest.fixture(scope="module")
def qp():
    return TheoremSetup(qplane(), W=3, P=5)


# -- polyvector oracle for HH(k[x,y]) = k[x,y] (x) Lambda(d_x, d_y)

def pv_basis(m, w):
    d = w + m
    if d < 0:
        return []
    monos = [e for e in itertools.product(range(d + 1), repeat=2) if sum(e) == d]
    subsets = [S for S in itertools.combinations(range(2), m)]
    return [(e, S) for e in monos for S in subsets]


def pv_mul(a, b):
    (e1, S1), (e2, S2) = a, b
    if set(S1) & set(S2):
        return None, 0
    S = tuple(sorted(S1 + S2))
    inv = sum(1 for i in S1 for j in S2 if i > j)
    return ((e1[0] + e2[0], e1[1] + e2[1]), S), (-1) ** inv


def pv_div(a):
    e, S = a
    out = {}
    for pos, i in enumerate(S):
        if e[i]:
            f = list(e)
            f[i] -= 1
            key = (tuple(f), S[:pos] + S[pos + 1:])
            out[key] = out.get(key, 0) + (-1) ** pos * e[i]
    return out


def pv_mult_rank(c1, c2):
    tgt = (c1[0] + c2[0], c1[1] + c2[1])
    idx = {b: k for k, b in enumerate(pv_basis(*tgt))}
    cols = []
    for a in pv_basis(*c1):
        for b in pv_basis(*c2):
            key, s = pv_mul(a, b)
            cols.append({idx[key]: s} if s else {})
    return rank(SparseMatrix.from_columns(len(idx), len(cols), cols)) if idx and cols else 0


def pv_div_rank(m, w):
    idx = {b: k for k, b in enumerate(pv_basis(m - 1, w))}
    cols = [{idx[k]: v for k, v in pv_div(a).items()} for a in pv_basis(m, w)]
    return rank(SparseMatrix.from_columns(len(idx), len(cols), cols)) if idx and cols else 0


# -- tests

def test_one_variable_model():
    kx = QuadraticPresentation(["x"], [])
    A = expand(kx, 6)
    C = koszul_dual_coalgebra(kx, 2)
    K = koszul_cochain(A, C, 0, 4)
    for w in range(5):
        assert K.homology(0, w).dim == 1 and K.homology(1, w).dim == 1


def test_hkr_dims(kxy):
    for m in range(3):
        for w in range(-2, 4):
            if (m, w) in kxy.Kco.labels:
                assert kxy.Kco.homology(m, w).dim == polyvector_dims(m, w)


def test_twisted_chains_match_bar_chains():
    pres = poly2()
    A = expand(pres, 4)
    C = koszul_dual_coalgebra(pres, 3)
    K = koszul_twisted(A, C, 3)
    bar = bar_chains(A, 3)
    q = inclusion_q(K, bar)
    assert q.check_chain_map() and q.check_quasi_iso()
    for (m, w) in K.labels:
        if (m, w) in bar.labels:
            assert K.homology(m, w).dim == bar.homology(m, w).dim
    # m = 0 is the identity on A
    for w in range(4):
        assert q[(0, w)] == SparseMatrix.identity(A.dim(w))


def test_quantum_plane_volume_class(qp):
    assert qp.Kch.homology(2, 2).dim == 1
    q = qp.q
    assert q.check_quasi_iso([(2, 2)])


def test_pd_sends_unit_to_volume(qp):
    phi = qp.phi
    one = {qp.Kco.index[(0, 0)][((0, 0), 0)]: QQ.one}
    vol = phi[(0, 0)].apply(one)
    assert len(vol) == 1
    assert phi.check_quasi_iso([c for c in phi.cells() if c[0] <= 2 and 0 <= c[1] <= 2])
    assert phi.profile == {0: 1, 1: 1, 2: -1}


def test_restriction(kxy):
    R = kxy.R
    G = kxy.G
    unit = {G.index[(0, 0)][((), (0, 0))]: 1}
    assert R[(0, 0)].apply(unit) == {kxy.Kco.index[(0, 0)][((0, 0), 0)]: 1}
    # chain level: restriction of a cup is the convolution of the restrictions
    from koszul_bv.calculus import cup
    for c1, c2 in [((1, 0), (1, 0)), ((0, -1), (1, 0)), ((1, -1), (1, 1))]:
        tgt = (c1[0] + c2[0], c1[1] + c2[1])
        if tgt not in G.labels or (tgt[0], -tgt[1]) not in kxy.Kco.labels:
            continue
        H1, H2 = G.complex.homology(*c1), G.complex.homology(*c2)
        for z1 in H1.reps[:3]:
            for z2 in H2.reps[:3]:
                lhs = R[tgt].apply(cup(G, c1, z1, c2, z2))
                rhs = convolution_cup(kxy.Kco, (c1[0], -c1[1]), R[c1].apply(z1),
                                      (c2[0], -c2[1]), R[c2].apply(z2))
                assert lhs == rhs


def test_convolution_unit(kxy):
    K = kxy.Kco
    one = {K.index[(0, 0)][((0, 0), 0)]: 1}
    for cell in [(1, 0), (2, 1), (1, 2)]:
        for k in range(0, K.complex.dim(cell), 3):
            assert convolution_cup(K, (0, 0), one, cell, {k: 1}) == {k: 1}


def test_cup_ranks_match_polyvectors(kxy):
    K = kxy.Kco
    consts = cup_constants(K, [(m, w) for m in range(3) for w in range(0, 2)])
    pairs = {}
    for (c1, i, c2, j), v in consts.items():
        pairs.setdefault((c1, c2), []).append(v)
    for (c1, c2), cols in pairs.items():
        tgt = (c1[0] + c2[0], c1[1] + c2[1])
        M = SparseMatrix.from_columns(K.homology(*tgt).dim, len(cols), cols)
        assert rank(M) == pv_mult_rank(c1, c2), (c1, c2)


def test_delta_A_divergence(kxy):
    DA = kxy.delta_A
    for (m, w), M in DA.items():
        if 0 <= w <= 3 and m <= 2:
            assert rank(M) == pv_div_rank(m, w), (m, w)
    # x d/dx: the cochain x^* -> x
    K = kxy.Kco
    z = {K.index[(1, 0)][((1, 0), 0)]: 1}
    u = {K.index[(0, 0)][((0, 0), 0)]: 1}
    cls = K.homology(1, 0).class_of(z)
    one = K.homology(0, 0).class_of(u)
    image = DA[(1, 0)].apply(cls)
    assert image in ({k: v for k, v in one.items()}, {k: -v for k, v in one.items()})
    assert K.homology(2, -2).dim == 1


def test_delta_invariants(kxy, qp):
    for S in (kxy, qp):
        DA = S.delta_A
        for (m, w), M in DA.items():
            if (m - 1, w) in DA:
                assert (DA[(m - 1, w)] @ M).is_zero()
        DD = S.delta_dual
        for (m, q), M in DD.items():
            if (m - 1, q) in DD and M.rows and M.cols:
                assert (DD[(m - 1, q)] @ M).is_zero()


def test_scale_invariance(qp):
    S7 = TheoremSetup(qplane(), W=3, P=5, scale=7)
    assert all(S7.delta_A[c] == qp.delta_A[c] for c in qp.delta_A)


def test_bv_identity_transported(qp):
    from koszul_bv.calculus import check_bv
    ops = KoszulModelOps(qp.Kco, qp.G, qp.R)
    cells = [c for c in ops.cells() if c[1] <= 3]
    rep = check_bv(cells, ops.dims(cells), ops.cup, ops.bracket, qp.delta_A)
    assert rep.passed and rep.as_dict()["axioms"]["seven-term"]["checked"] > 0


@pytest.mark.parametrize("which", ["kxy", "qp"])
def test_main_theorem_report(which, request):
    S = request.getfixturevalue(which)
    rep = verify_main_theorem(S)
    assert rep["verdict"] == "pass", rep["failed"]
    assert set(rep["stages"]) == {"comparison maps", "cup constants", "delta agreement", "bv A",
                                  "bv dual"}
    assert rep["stages"]["delta agreement"]["matrices"]


def test_fault_is_caught():
    S = TheoremSetup(qplane(), W=2, P=4, fault="twisted-B-sign")
    rep = verify_main_theorem(S)
    assert rep["verdict"] == "fail"
    w = rep["stages"]["delta agreement"]["witness"]
    assert w["operator"] == "delta" and "delta_A" in rep["stages"]["delta agreement"]
    with pytest.raises(ValueError):
        TheoremSetup(qplane(), fault="nonsense")
    with pytest.raises(ValueError):
        TheoremSetup(qplane(), W=1)


def test_worker_pool_gives_same_report(qp):
    a = verify_main_theorem(qp, workers=1)
    b = verify_main_theorem(qp, workers=3)
    a.pop("timing"), b.pop("timing")
    assert a == b
