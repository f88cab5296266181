"""Frobenius structure on a finite-dimensional graded algebra (the dual A^!).

The pairing is <a, b> = lambda(ab) with lambda dual to the chosen top basis
element.  The Nakayama automorphism is the solution of

    <ab, c> = (-1)^{|c|(|a|+|b|)} <sigma(c) a, b>,

i.e. lambda(y c) = (-1)^{|c|(n-|c|)} lambda(sigma(c) y) for |y| = n - |c|.

Conventions for the other side: the adjoint of sigma_! on V = (V*)* has
matrix sigma_!^T on the generators; the Nakayama automorphism of A is taken
to be the inverse of that adjoint (see ``nakayama_of_A``).
"""

from .algebra import AlgebraAutomorphism, extend_automorphism
from .kernel import (
    NotSemisimpleOverField,
    SparseMatrix,
    determinant,
    eigenspace_decomposition,
    inverse,
)


class NotFrobenius(ValueError):
    pass


class FrobeniusStructure:
    def __init__(self, dual, top, lam, pairings, sigma):
        self.dual = dual
        self.field = dual.field
        self.top = top
        self.lam = lam                # coordinate vector on A^!_n (length 1)
        self.pairings = pairings      # i -> matrix P_i[r][s] = <e^i_r, e^{n-i}_s>
        self.sigma = sigma            # AlgebraAutomorphism of A^!

    def pair(self, d1, x, d2, y):
        if d1 + d2 != self.top:
            return self.field.zero
        P = self.pairings[d1]
        total = self.field.zero
        for r, a in x.items():
            for s, b in y.items():
                total += a * b * P[r, s]
        return total

    def sigma_matrix(self, d):
        return self.sigma.matrix(d)

    def sigma_V(self):
        return [row[:] for row in self.sigma.V]

    def check_associative_pairing(self):
        A, n = self.dual, self.top
        for d1 in range(n + 1):
            for d2 in range(n + 1 - d1):
                d3 = n - d1 - d2
                for i in range(A.dim(d1)):
                    for j in range(A.dim(d2)):
                        for k in range(A.dim(d3)):
                            ab = A.multiply_basis(d1, i, d2, j)
                            bc = A.multiply_basis(d2, j, d3, k)
                            if self.pair(d1 + d2, ab, d3, {k: 1}) != self.pair(d1, {i: 1}, d2 + d3, bc):
                                return False
        return True

    def check_nakayama_identity(self):
        A, n = self.dual, self.top
        for d1 in range(n + 1):
            for d2 in range(n + 1 - d1):
                d3 = n - d1 - d2
                sign = -1 if (d3 * (d1 + d2)) % 2 else 1
                for i in range(A.dim(d1)):
                    for j in range(A.dim(d2)):
                        ab = A.multiply_basis(d1, i, d2, j)
                        for k in range(A.dim(d3)):
                            lhs = self.pair(d1 + d2, ab, d3, {k: 1})
                            sc = self.sigma.matrix(d3).column(k)
                            sca = A.multiply(d3, sc, d1, {i: 1})
                            rhs = self.pair(d3 + d1, sca, d2, {j: 1})
                            if lhs != sign * rhs:
                                return False
        return True

    def check_transpose_symmetry(self, twisted=True):
        """P_{n-i} = (-1)^{i(n-i)} P_i^T S_i, with S_i = sigma_! on degree i.

        ``twisted=False`` drops S_i; that version holds exactly when sigma_!
        is the identity.
        """
        n = self.top
        for i in range(n + 1):
            sign = -1 if (i * (n - i)) % 2 else 1
            rhs = self.pairings[i].T
            if twisted:
                rhs = rhs @ self.sigma.matrix(i)
            if self.pairings[n - i] != rhs.scale(sign):
                return False
        return True

    def lambda_fixed(self):
        """lambda o sigma_! = lambda on the top degree."""
        M = self.sigma.matrix(self.top)
        return M[0, 0] == 1

    def summary(self):
        F = self.field
        return {
            "top_degree": self.top,
            "dims": [self.dual.dim(d) for d in range(self.top + 1)],
            "sigma_generators": [[F.format(x) for x in row] for row in self.sigma.V],
        }


def _pairing_matrix(dual, i, n, lam_scale):
    rows = {}
    for r in range(dual.dim(i)):
        row = {}
        for s in range(dual.dim(n - i)):
            v = dual.multiply_basis(i, r, n - i, s).get(0)
            if v:
                row[s] = v * lam_scale
        rows[r] = row
    return SparseMatrix.from_rows(dual.dim(i), dual.dim(n - i), rows, dual.field)


def detect_frobenius(dual, lam_scale=1):
    """Frobenius structure on a finite graded algebra, or NotFrobenius."""
    if not dual.is_finite():
        raise NotFrobenius("algebra does not vanish within degree %d" % dual.D)
    F = dual.field
    n = dual.top_degree()
    if dual.dim(n) != 1:
        raise NotFrobenius("top degree %d has dimension %d" % (n, dual.dim(n)))
    lam_scale = F(lam_scale)
    if not lam_scale:
        raise NotFrobenius("lambda must be nonzero")
    pairings = {}
    for i in range(n + 1):
        P = _pairing_matrix(dual, i, n, lam_scale)
        if P.rows != P.cols or not determinant(P):
            raise NotFrobenius("pairing in degrees (%d, %d) is degenerate" % (i, n - i))
        pairings[i] = P
    # S_d = sign * P_d^{-T} P_{n-d}
    S1 = (inverse(pairings[1].T) @ pairings[n - 1]).scale(-1 if (n - 1) % 2 else 1) if n >= 1 else None
    if S1 is None:
        raise NotFrobenius("algebra is concentrated in degree 0")
    sigma = extend_automorphism(dual, S1.to_dense())
    for d in range(n + 1):
        sign = -1 if (d * (n - d)) % 2 else 1
        S = (inverse(pairings[d].T) @ pairings[n - d]).scale(sign)
        if S != sigma.matrix(d):
            raise NotFrobenius("Nakayama map is not multiplicative in degree %d" % d)
    frob = FrobeniusStructure(dual, n, {0: lam_scale}, pairings, sigma)
    if not frob.check_associative_pairing():
        raise NotFrobenius("pairing is not associative")
    if not frob.check_nakayama_identity():
        raise NotFrobenius("Nakayama identity fails")
    return frob


def check_semisimple(sigma):
    """Eigendata of a graded automorphism; raises NotSemisimpleOverField.

    Also checks that the eigenvalues on every tabled degree are products of
    degree-1 eigenvalues.
    """
    alg = sigma.alg
    V = SparseMatrix.from_dense(sigma.V, sigma.field)
    base = eigenspace_decomposition(V)
    lams = [lam for lam, _ in base]
    out = {"generators": base, "degrees": {}}
    prods = {0: {sigma.field.one}}
    for d in range(1, alg.D + 1):
        prods[d] = {p * l for p in prods[d - 1] for l in lams}
    for d in range(alg.D + 1):
        if not alg.dim(d):
            continue
        dec = eigenspace_decomposition(sigma.matrix(d))
        for lam, _ in dec:
            if lam not in prods[d]:
                raise ArithmeticError("eigenvalue %r on degree %d is not a product" % (lam, d))
        out["degrees"][d] = dec
    return out


def adjoint_on_V(frob):
    """Matrix of the adjoint of sigma_! on V (column g = image of x_g)."""
    return SparseMatrix.from_dense(frob.sigma.V, frob.field).T


def nakayama_of_A(frob, alg, coalg=None):
    """Nakayama automorphism of A: the inverse of the adjoint of sigma_!.

    With this choice the right-contraction map A (x) A^! -> A (x) A^dual-coalg
    intertwines the twisted complexes on both sides (checked in duality).
    """
    M = inverse(adjoint_on_V(frob))
    return extend_automorphism(alg, M.to_dense(), coalg)


def sigma_star(frob, alg, coalg):
    """The adjoint sigma* of sigma_!, acting on A and on the coalgebra."""
    return extend_automorphism(alg, adjoint_on_V(frob).to_dense(), coalg)


class PsiIso:
    """psi_d : A^!_d -> C_{n-d}, a |-> the functional <-, a> on A^!_{n-d}."""

    def __init__(self, frob, coalg):
        self.frob = frob
        self.coalg = coalg
        n = frob.top
        self.maps = {}
        for d in range(n + 1):
            G = coalg.pairing_matrix(frob.dual, n - d)
            self.maps[d] = inverse(G) @ frob.pairings[n - d]

    def matrix(self, d):
        return self.maps[d]

    def is_invertible(self):
        return all(M.rows == M.cols and determinant(M) for M in self.maps.values())

    def functional(self, d, a):
        """<-, a> as a coordinate vector on A^!_{n-d}."""
        P = self.frob.pairings[self.frob.top - d]
        return P.apply(a)

    def check_bimodule(self):
        """psi(b a) = b . psi(a) and psi(a b) = (-1)^{|b|(n-|b|)} psi(a) . sigma(b)

        in the dual bimodule (b.f.c)(y) = f(c y b), compared as functionals."""
        fr = self.frob
        A, n = fr.dual, fr.top
        for d in range(n + 1):
            for e in range(n + 1 - d):
                sign = -1 if (e * (n - e)) % 2 else 1
                for i in range(A.dim(d)):
                    for j in range(A.dim(e)):
                        # left: psi(b a)(y) vs psi(a)(y b)
                        ba = A.multiply_basis(e, j, d, i)
                        left = self.functional(d + e, ba)
                        fa = self.functional(d, {i: 1})
                        for y in range(A.dim(n - d - e)):
                            yb = A.multiply_basis(n - d - e, y, e, j)
                            val = sum((fa.get(k, 0) * c for k, c in yb.items()), fr.field.zero)
                            if left.get(y, 0) != val:
                                return False
                        # right: psi(a b)(y) vs sign * psi(a)(sigma(b) y)
                        ab = A.multiply_basis(d, i, e, j)
                        right = self.functional(d + e, ab)
                        sb = fr.sigma.matrix(e).column(j)
                        for y in range(A.dim(n - d - e)):
                            sby = A.multiply(e, sb, n - d - e, {y: 1})
                            val = sum((fa.get(k, 0) * c for k, c in sby.items()), fr.field.zero)
                            if right.get(y, 0) != sign * val:
                                return False
        return True


def psi_iso(frob, coalg):
    return PsiIso(frob, coalg)
