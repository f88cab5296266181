"""Eigenspace decomposition over the ground field.

Roots of the characteristic polynomial are found with sympy (exact
factorisation over QQ or GF(p)); everything else is our own elimination.
"""

from fractions import Fraction

import sympy

from .fields import PrimeField
from .sparse import SparseMatrix, kernel_basis


class NotSemisimpleOverField(ArithmeticError):
    """Raised when a matrix is not diagonalizable with eigenvalues in the field."""


def _to_sympy(M):
    field = M.field
    if isinstance(field, PrimeField):
        conv = lambda v: sympy.Integer(v.value)
    else:
        conv = lambda v: sympy.Rational(v.numerator, v.denominator)
    rows = [[0] * M.cols for _ in range(M.rows)]
    for (r, c), v in M.items():
        rows[r][c] = conv(v)
    return sympy.Matrix(rows)


def field_roots(M):
    """Distinct roots in the ground field of the characteristic polynomial."""
    if M.rows == 0:
        return []
    x = sympy.Symbol("x")
    field = M.field
    cp = _to_sympy(M).charpoly(x).as_expr()
    if isinstance(field, PrimeField):
        poly = sympy.Poly(cp, x, modulus=field.p)
        _, factors = poly.factor_list()
        roots = []
        for fac, _mult in factors:
            if fac.degree() == 1:
                a, b = fac.all_coeffs()
                roots.append(field(-int(b)) / field(int(a)))
    else:
        poly = sympy.Poly(cp, x, domain=sympy.QQ)
        _, factors = poly.factor_list()
        roots = []
        for fac, _mult in factors:
            if fac.degree() == 1:
                a, b = fac.all_coeffs()
                r = -sympy.Rational(b) / sympy.Rational(a)
                roots.append(Fraction(int(r.p), int(r.q)))
    out = []
    for r in roots:
        if r not in out:
            out.append(r)
    return sorted(out, key=_sort_key)


def _sort_key(x):
    if isinstance(x, Fraction):
        return (0, x)
    return (1, x.value)


def eigenspace_decomposition(M):
    """``[(eigenvalue, basis of eigenvectors), ...]`` or NotSemisimpleOverField.

    Eigenvalues come sorted (rationals by value, F_p by representative).
    """
    if M.rows != M.cols:
        raise ValueError("eigenspace_decomposition needs a square matrix")
    n = M.rows
    out = []
    total = 0
    ident = SparseMatrix.identity(n, M.field)
    for lam in field_roots(M):
        basis = kernel_basis(M - ident.scale(lam))
        out.append((lam, basis))
        total += len(basis)
    if total != n:
        raise NotSemisimpleOverField(
            "matrix of size %d has eigenspaces of total dimension %d over %r"
            % (n, total, M.field))
    return out


def lagrange_projection(M, lam, candidates):
    """Projector onto the lam-eigenspace of a diagonalizable M whose
    eigenvalues lie in ``candidates``: prod_{mu != lam} (M - mu)/(lam - mu)."""
    n = M.rows
    ident = SparseMatrix.identity(n, M.field)
    P = ident
    for mu in candidates:
        if mu == lam:
            continue
        P = P @ (M - ident.scale(mu)).scale(M.field.one / (lam - mu))
    return P


def monomial_values(values, d):
    """Distinct products of d elements of ``values`` (with repetition)."""
    values = list(values)
    acc = {values[0] / values[0]}
    for _ in range(d):
        acc = {a * v for a in acc for v in values}
    return sorted(acc, key=_sort_key)
