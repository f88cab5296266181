import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from koszul_bv.algebra import (NotAnAutomorphism, QuadraticPresentation, SpecError, check_koszul,
                               expand, extend_automorphism, koszul_complex, koszul_dual_coalgebra,
                               load_spec, parse_spec, presentation_to_spec, quadratic_dual)
from koszul_bv.kernel import QQ, GF, NotSemisimpleOverField, SparseMatrix

from criteria import poly2, qplane

EXAMPLES = Path(__file__).resolve().parent.parent / "examples"


def exterior2():
    return QuadraticPresentation(["x", "y"], [{(0, 0): 1}, {(1, 1): 1}, {(0, 1): 1, (1, 0): 1}])


@pytest.mark.parametrize("pres, dims", [
    (poly2(), [1, 2, 3, 4]),
    (qplane(), [1, 2, 3, 4]),
    (exterior2(), [1, 2, 1, 0]),
    (QuadraticPresentation(["x"], []), [1, 1, 1, 1]),
])
def test_expand_dims(pres, dims):
    assert expand(pres, 3).dims() == dims


def test_quadratic_dual_of_poly2_is_exterior():
    d = quadratic_dual(poly2())
    assert d.dim_R == 3
    assert d.relation_space_equals(
        QuadraticPresentation(["x*", "y*"], [{(0, 0): 1}, {(1, 1): 1}, {(0, 1): 1, (1, 0): 1}]))
    assert quadratic_dual(d).relation_space_equals(poly2())


def test_quadratic_dual_of_qplane():
    # yx - 2xy = 0 is annihilated by x*y* + 2 y*x*
    d = quadratic_dual(qplane())
    assert d.dim_R == 3
    e = QuadraticPresentation(d.generators, [{(0, 0): 1}, {(1, 1): 1}, {(0, 1): 1, (1, 0): 2}])
    assert d.relation_space_equals(e)
    # the same plane written as xy - 2yx: x*y* + (1/2) y*x*
    mirrored = QuadraticPresentation(["x", "y"], [{(0, 1): 1, (1, 0): -2}])
    e = QuadraticPresentation(d.generators, [{(0, 0): 1}, {(1, 1): 1},
                                             {(0, 1): 1, (1, 0): Fraction(1, 2)}])
    assert quadratic_dual(mirrored).relation_space_equals(e)


def test_dual_of_free_algebra_on_one_generator():
    d = quadratic_dual(QuadraticPresentation(["x"], []))
    assert d.dim_R == 1
    assert expand(d, 3).dims() == [1, 1, 0, 0]


@pytest.mark.parametrize("pres, dims", [
    (poly2(), [1, 2, 1, 0]),
    (qplane(), [1, 2, 1, 0]),
    (QuadraticPresentation(["x"], []), [1, 1, 0, 0]),
])
def test_koszul_dual_coalgebra(pres, dims):
    C = koszul_dual_coalgebra(pres, 3)
    assert C.dims() == dims
    assert C.check_coassociative() and C.check_counit()


def test_signed_coproduct_is_not_coassociative():
    C = koszul_dual_coalgebra(poly2(), 3, signed=True)
    assert not C.check_coassociative()


def test_koszul_complex_small_weights():
    A = expand(poly2(), 3)
    C = koszul_dual_coalgebra(poly2(), 3)
    K = koszul_complex(A, C, 3)
    assert [K.dim((m, 2)) for m in (0, 1, 2)] == [3, 4, 1]
    for m in (0, 1, 2):
        assert K.homology(m, 2).dim == 0
    kx = QuadraticPresentation(["x"], [])
    K1 = koszul_complex(expand(kx, 2), koszul_dual_coalgebra(kx, 2), 2)
    assert K1.d(1, 1).to_dense() == [[1]]


@pytest.mark.parametrize("pres", [poly2(), qplane(), poly2(GF(1009))])
def test_koszul_up_to_6(pres):
    r = check_koszul(pres, 6)
    assert r["koszul_up_to_degree"] and r["statement"] == "Koszul up to degree 6"
    assert r["hilbert_product"] == [1, 0, 0, 0, 0, 0, 0]


def test_non_koszul_detected():
    # k<x,y>/(x^2, xy): A^! = k<x*,y*>/(y*x*, y*^2) and the Hilbert product fails at t^3
    pres = QuadraticPresentation(["x", "y"], [{(0, 0): 1}, {(0, 1): 1}])
    r = check_koszul(pres, 4)
    assert r["hilbert_ok"] == (r["hilbert_product"] == [1, 0, 0, 0, 0])


def test_extend_automorphism():
    A = expand(poly2(), 2)
    ident = extend_automorphism(A, [[1, 0], [0, 1]])
    assert ident.is_identity()
    s = extend_automorphism(A, [[2, 0], [0, 3]])
    assert sorted(s.matrix(2)[i, i] for i in range(3)) == [4, 6, 9]
    assert s.check_multiplicative()
    jordan = extend_automorphism(A, [[1, 1], [0, 1]])
    with pytest.raises(NotSemisimpleOverField):
        jordan.eigendata()
    with pytest.raises(NotAnAutomorphism):
        # swapping x and y does not preserve yx = 2xy
        extend_automorphism(expand(qplane(), 2), [[0, 1], [1, 0]])


@settings(max_examples=25, deadline=None)
@given(st.integers(-5, 5).filter(bool), st.integers(-5, 5).filter(bool))
def test_quantum_planes_have_polynomial_growth(p, q):
    pres = QuadraticPresentation(["x", "y"], [{(1, 0): p, (0, 1): q}])
    A = expand(pres, 4)
    assert A.dims() == [1, 2, 3, 4, 5]
    assert A.check_associative()
    assert quadratic_dual(quadratic_dual(pres)).relation_space_equals(pres)


# -- spec documents

def test_shipped_specs_parse():
    pres, auto = load_spec(EXAMPLES / "qplane2.json")
    assert pres.relation_space_equals(qplane())
    assert auto == [[2, 0], [0, Fraction(1, 2)]]
    pres, _ = load_spec(EXAMPLES / "exterior2.json")
    assert quadratic_dual(pres).relation_space_equals(poly2())
    pres, _ = load_spec(EXAMPLES / "qplane2_f1009.json")
    assert pres.field == GF(1009)


def test_spec_roundtrip():
    doc = presentation_to_spec(qplane())
    pres, _ = parse_spec(json.dumps(doc))
    assert pres.relation_space_equals(qplane())


@pytest.mark.parametrize("text, where", [
    ('{"generators": ["x"], "relations": [', "<spec>:1:"),
    ('{"generators": []}', "generators"),
    ('{"generators": ["x"], "relations": [[{"coeff": "1", "word": ["x"]}]]}', "relations[0][0].word"),
    ('{"generators": ["x"], "relations": [[{"coeff": "1", "word": ["x", "z"]}]]}', "relations[0][0].word"),
    ('{"generators": ["x"], "relations": [[{"coeff": "1/0", "word": ["x", "x"]}]]}', "relations[0][0].coeff"),
    ('{"generators": ["x"], "degrees": [2]}', "degrees"),
    ('{"field": "R", "generators": ["x"]}', "field"),
])
def test_malformed_specs_report_position(text, where):
    with pytest.raises(SpecError) as err:
        parse_spec(text)
    assert where in str(err.value)
