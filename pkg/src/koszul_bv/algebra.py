"""Quadratic algebras T(V)/(R), their quadratic duals and Koszul dual coalgebras.

Conventions
-----------
* Generators all have internal degree 1.  Words of length d are tuples of
  generator indices; V^{(x)d} has the words in lexicographic order as basis.
* The chosen basis of A_d consists of the lexicographically earliest words
  that stay independent modulo the ideal component I_d.  Equivalently, the
  non-basis words are the lex-largest leading words of I_d, so the reduction
  to normal form is a fully reduced echelon form with reversed columns.
* The dual pairing of xi_{i1}...xi_{id} (in V*^{(x)d}) with x_{j1}...x_{jd} is
  the product of Kronecker deltas.
"""

import itertools
import json

from .kernel import (
    QQ,
    Echelon,
    FieldError,
    NotSemisimpleOverField,
    SparseMatrix,
    eigenspace_decomposition,
    field_from_descriptor,
    kernel_basis,
    rref,
    vec_axpy,
    vec_scale,
)
from .kernel.homology import BigradedComplex


class SpecError(ValueError):
    """Malformed algebra spec; ``location`` names the offending position."""

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = "%s: %s" % (location, message)
        super().__init__(message)


class NotAnAutomorphism(ValueError):
    pass


# --------------------------------------------------------------- words

def words(n, d):
    return list(itertools.product(range(n), repeat=d))


def word_index(word, n):
    idx = 0
    for g in word:
        idx = idx * n + g
    return idx


def tensor_apply(mat_rows, vec_words, n):
    """Apply g -> sum_h mat[h][g] h to each letter of a word-vector.

    ``mat_rows`` is a dense n x n list (column g is the image of generator g);
    ``vec_words`` maps words to coefficients.
    """
    out = {}
    for w, c in vec_words.items():
        acc = {(): c}
        for g in w:
            nxt = {}
            for prefix, a in acc.items():
                for h in range(n):
                    m = mat_rows[h][g]
                    if m:
                        key = prefix + (h,)
                        s = nxt.get(key)
                        s = a * m if s is None else s + a * m
                        if s:
                            nxt[key] = s
                        else:
                            nxt.pop(key, None)
            acc = nxt
        for key, a in acc.items():
            s = out.get(key)
            s = a if s is None else s + a
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


# ---------------------------------------------------------- presentation

class QuadraticPresentation:
    """Generators of degree 1 and a basis of the relation space R in V (x) V.

    ``relations`` is a list of dicts ``{(i, j): coeff}``; they are reduced to
    a basis (in echelon form) on construction.
    """

    def __init__(self, generators, relations, field=QQ, name=None):
        self.field = field
        self.generators = list(generators)
        if len(set(self.generators)) != len(self.generators):
            raise SpecError("duplicate generator names")
        self.name = name
        n = len(self.generators)
        self.n = n
        vecs = []
        for rel in relations:
            for (i, j) in rel:
                if not (0 <= i < n and 0 <= j < n):
                    raise SpecError("relation uses unknown generator index %r" % ((i, j),))
            vecs.append({i * n + j: field(c) for (i, j), c in rel.items() if field(c)})
        _, rows = rref(SparseMatrix.from_rows(len(vecs), n * n, dict(enumerate(vecs)), field))
        self.relations = [{(k // n, k % n): v for k, v in row.items()} for row in rows]

    @property
    def dim_R(self):
        return len(self.relations)

    def relation_vectors(self):
        n = self.n
        return [{i * n + j: c for (i, j), c in r.items()} for r in self.relations]

    def relation_space_equals(self, other):
        if other.n != self.n:
            return False
        a = Echelon(self.field)
        for v in self.relation_vectors():
            a.add(v)
        if len(a) != other.dim_R:
            return False
        return all(a.contains(v) for v in other.relation_vectors())

    def __repr__(self):
        return "QuadraticPresentation(%s, dim R=%d, %r)" % (self.generators, self.dim_R, self.field)


def quadratic_dual(pres):
    """T(V*)/(R^perp) with R^perp the annihilator of R under the word pairing."""
    n = pres.n
    M = SparseMatrix.from_rows(len(pres.relations), n * n,
                               dict(enumerate(pres.relation_vectors())), pres.field)
    perp = kernel_basis(M)
    rels = [{(k // n, k % n): v for k, v in vec.items()} for vec in perp]
    names = [dual_name(g) for g in pres.generators]
    base = pres.name or "A"
    return QuadraticPresentation(names, rels, pres.field, name=base + "^!")


def dual_name(g):
    return g[:-1] if g.endswith("*") else g + "*"


# --------------------------------------------------------------- algebra

class GradedAlgebra:
    """Degreewise bases of A = T(V)/(R) up to a degree bound, with products."""

    def __init__(self, pres, D):
        if D < 2:
            raise ValueError("degree bound must be >= 2")
        self.pres = pres
        self.field = pres.field
        self.D = D
        n = pres.n
        self.n = n
        self.bases = {}       # d -> list of words (basis of A_d)
        self._nf = {}         # d -> {word: {basis idx: coeff}}
        self.ideal_rank = {}
        for d in range(D + 1):
            self._expand_degree(d)

    def _expand_degree(self, d):
        n, F = self.n, self.field
        all_words = words(n, d)
        N = len(all_words)
        # column index = reversed lex position, so leading term = lex largest word
        col = lambda w: N - 1 - word_index(w, n)
        gens = []
        for i in range(d - 1):
            j = d - 2 - i
            for u in words(n, i):
                for v in words(n, j):
                    for rel in self.pres.relations:
                        gens.append({col(u + (a, b) + v): c for (a, b), c in rel.items()})
        M = SparseMatrix.from_rows(len(gens), N, dict(enumerate(gens)), F)
        pcols, rows = rref(M)
        self.ideal_rank[d] = len(pcols)
        piv = set(pcols)
        basis = [w for w in all_words if col(w) not in piv]
        pos = {w: i for i, w in enumerate(basis)}
        nf = {}
        one = F.one
        for w in basis:
            nf[w] = {pos[w]: one}
        for k, row in zip(pcols, rows):
            w = all_words[N - 1 - k]
            red = {}
            for c, v in row.items():
                if c != k:
                    red[pos[all_words[N - 1 - c]]] = -v
            nf[w] = red
        self.bases[d] = basis
        self._nf[d] = nf

    # -- queries
    def dim(self, d):
        if d < 0:
            return 0
        if d > self.D:
            raise ValueError("degree %d beyond expansion bound %d" % (d, self.D))
        return len(self.bases[d])

    def dims(self):
        return [self.dim(d) for d in range(self.D + 1)]

    def top_degree(self):
        """Largest d <= D with A_d != 0."""
        return max(d for d in range(self.D + 1) if self.bases[d])

    def is_finite(self):
        return not self.bases[self.D]

    def normal_form(self, word):
        """Coordinates in the basis of A_{len(word)} of a single word."""
        return self._nf[len(word)][tuple(word)]

    def reduce(self, d, word_vec):
        out = {}
        nf = self._nf[d]
        for w, c in word_vec.items():
            vec_axpy(out, c, nf[w])
        return out

    def label(self, d, i):
        w = self.bases[d][i]
        if not w:
            return "1"
        return "".join(self.pres.generators[g] for g in w)

    def multiply_basis(self, d1, i, d2, j):
        """Product of basis elements as a dict over the basis of A_{d1+d2}."""
        if d1 + d2 > self.D:
            raise ValueError("product degree %d beyond bound %d" % (d1 + d2, self.D))
        return self._nf[d1 + d2][self.bases[d1][i] + self.bases[d2][j]]

    def multiply(self, d1, x, d2, y):
        out = {}
        for i, a in x.items():
            for j, b in y.items():
                vec_axpy(out, a * b, self.multiply_basis(d1, i, d2, j))
        return out

    def mult_matrix(self, d1, d2):
        """Matrix of A_{d1} (x) A_{d2} -> A_{d1+d2}; column index i * dim(d2) + j."""
        return _mult_matrix(self, d1, d2)

    def augmentation(self, d, x):
        return x.get(0, self.field.zero) if d == 0 else self.field.zero

    def check_associative(self, max_degree=None):
        top = self.D if max_degree is None else max_degree
        for d1 in range(top + 1):
            for d2 in range(top + 1 - d1):
                for d3 in range(top + 1 - d1 - d2):
                    for i in range(self.dim(d1)):
                        for j in range(self.dim(d2)):
                            for k in range(self.dim(d3)):
                                ab = self.multiply_basis(d1, i, d2, j)
                                left = self.multiply(d1 + d2, ab, d3, {k: 1})
                                bc = self.multiply_basis(d2, j, d3, k)
                                right = self.multiply(d1, {i: 1}, d2 + d3, bc)
                                if left != right:
                                    return False
        return True

    # -- flat indexing across degrees 0..top
    def flat(self, max_degree):
        return FlatBasis(self, max_degree)

    def __repr__(self):
        return "GradedAlgebra(%s, dims=%s)" % (self.pres.generators, self.dims())


def _mult_matrix(alg, d1, d2):
    cache = alg.__dict__.setdefault("_mm_cache", {})
    key = (d1, d2)
    if key not in cache:
        n2 = alg.dim(d2)
        cols = []
        for i in range(alg.dim(d1)):
            for j in range(n2):
                cols.append(alg.multiply_basis(d1, i, d2, j))
        cache[key] = SparseMatrix.from_columns(alg.dim(d1 + d2), len(cols), cols, alg.field)
    return cache[key]


class FlatBasis:
    """Basis of A_0 + ... + A_top with a single index; degrees recorded."""

    def __init__(self, alg, top):
        self.alg = alg
        self.top = top
        self.items = [(d, i) for d in range(top + 1) for i in range(alg.dim(d))]
        self.index = {it: k for k, it in enumerate(self.items)}
        self.degree = [d for d, _ in self.items]
        self.by_degree = {d: [self.index[(d, i)] for i in range(alg.dim(d))]
                          for d in range(top + 1)}

    def __len__(self):
        return len(self.items)

    def multiply(self, a, b):
        """Product of flat basis elements a, b (dict over flat indices)."""
        (d1, i), (d2, j) = self.items[a], self.items[b]
        if d1 + d2 > self.top:
            if d1 + d2 <= self.alg.D and self.alg.dim(d1 + d2):
                raise ValueError("product leaves the flat window")
            return {}
        return {self.index[(d1 + d2, k)]: v
                for k, v in self.alg.multiply_basis(d1, i, d2, j).items()}


def expand(pres, D):
    return GradedAlgebra(pres, D)


# --------------------------------------------------------------- coalgebra

class GradedCoalgebra:
    """Koszul dual coalgebra: A^!_d components realised inside V^{(x)d}.

    Each component basis is in reduced echelon form over the word coordinates,
    so the coordinate of an element on basis vector s is its entry at the
    pivot word of s.
    """

    def __init__(self, pres, D, signed=False):
        self.pres = pres
        self.field = pres.field
        self.n = pres.n
        self.D = D
        self.signed = signed
        self.bases = {}     # d -> list of {word: coeff}
        self.pivots = {}    # d -> list of pivot words
        n, F = self.n, self.field
        for d in range(D + 1):
            if d < 2:
                vecs = [{w: F.one} for w in words(n, d)]
                self.bases[d] = vecs
                self.pivots[d] = [w for w in words(n, d)]
                continue
            all_words = words(n, d)
            N = len(all_words)
            # annihilators of V^i (x) R (x) V^j are V*^i (x) R^perp (x) V*^j
            Rmat = SparseMatrix.from_rows(len(pres.relations), n * n,
                                          dict(enumerate(pres.relation_vectors())), F)
            perp = kernel_basis(Rmat)
            ann = []
            for i in range(d - 1):
                j = d - 2 - i
                for u in words(n, i):
                    for v in words(n, j):
                        for f in perp:
                            ann.append({word_index(u + (k // n, k % n) + v, n): c
                                        for k, c in f.items()})
            M = SparseMatrix.from_rows(len(ann), N, dict(enumerate(ann)), F)
            ker = kernel_basis(M)
            K = SparseMatrix.from_rows(len(ker), N, dict(enumerate(ker)), F)
            pcols, rows = rref(K)
            self.bases[d] = [{all_words[c]: v for c, v in row.items()} for row in rows]
            self.pivots[d] = [all_words[c] for c in pcols]

    def dim(self, d):
        if d < 0 or d > self.D:
            return 0
        return len(self.bases[d])

    def dims(self):
        return [self.dim(d) for d in range(self.D + 1)]

    def coords(self, d, word_vec):
        """Coordinates of a tensor known to lie in C_d."""
        return {s: word_vec[p] for s, p in enumerate(self.pivots[d]) if word_vec.get(p)}

    def contains(self, d, word_vec):
        co = self.coords(d, word_vec)
        back = {}
        for s, c in co.items():
            for w, v in self.bases[d][s].items():
                back[w] = back.get(w, 0) + c * v
        back = {w: v for w, v in back.items() if v}
        clean = {w: v for w, v in word_vec.items() if v}
        return back == clean

    def coproduct(self, d, s):
        """{(i, a, b): coeff} for Delta of basis element s of C_d, a in C_i, b in C_{d-i}."""
        vec = self.bases[d][s]
        out = {}
        for i in range(d + 1):
            sign = -1 if (self.signed and i % 2) else 1
            split = {}
            for w, c in vec.items():
                split[(w[:i], w[i:])] = c
            for a, pa in enumerate(self.pivots[i]):
                for b, pb in enumerate(self.pivots[d - i]):
                    c = split.get((pa, pb))
                    if c:
                        out[(i, a, b)] = sign * c
        return out

    def split_first(self, d, s):
        """f = sum_g x_g (x) f'_g:  {(g, t): coeff} with f'_g in C_{d-1}."""
        return self._split(d, s, first=True)

    def split_last(self, d, s):
        """f = sum_g f'_g (x) x_g:  {(g, t): coeff} with f'_g in C_{d-1}."""
        return self._split(d, s, first=False)

    def _split(self, d, s, first):
        cache = self.__dict__.setdefault("_split_cache", {})
        key = (d, s, first)
        if key not in cache:
            parts = {}
            for w, c in self.bases[d][s].items():
                g, rest = (w[0], w[1:]) if first else (w[-1], w[:-1])
                parts.setdefault(g, {})[rest] = c
            out = {}
            for g, vec in parts.items():
                for t, v in self.coords(d - 1, vec).items():
                    out[(g, t)] = v
            cache[key] = out
        return cache[key]

    def reduced_coproduct(self, d, s):
        return {k: v for k, v in self.coproduct(d, s).items() if 0 < k[0] < d}

    def counit(self, d, s):
        return self.field.one if d == 0 else self.field.zero

    def check_coassociative(self):
        """(Delta (x) 1) Delta == (1 (x) Delta) Delta on every basis element."""
        for d in range(self.D + 1):
            for s in range(self.dim(d)):
                left, right = {}, {}
                for (i, a, b), c in self.coproduct(d, s).items():
                    for (j, a1, a2), c2 in self.coproduct(i, a).items():
                        key = (j, i - j, a1, a2, b)
                        left[key] = left.get(key, 0) + c * c2
                    for (j, b1, b2), c2 in self.coproduct(d - i, b).items():
                        key = (i, j, a, b1, b2)
                        right[key] = right.get(key, 0) + c * c2
                left = {k: v for k, v in left.items() if v}
                right = {k: v for k, v in right.items() if v}
                if left != right:
                    return False
        return True

    def check_counit(self):
        for d in range(self.D + 1):
            for s in range(self.dim(d)):
                co = self.coproduct(d, s)
                if co.get((0, 0, s)) != 1 or co.get((d, s, 0)) != 1:
                    return False
        return True

    def pairing_matrix(self, dual_alg, d):
        """<basis word of A^!_d, basis vector of C_d> (rows: A^!, cols: C)."""
        rows = {}
        for r, w in enumerate(dual_alg.bases[d]):
            row = {}
            for s, vec in enumerate(self.bases[d]):
                c = vec.get(w)
                if c:
                    row[s] = c
            rows[r] = row
        return SparseMatrix.from_rows(dual_alg.dim(d), self.dim(d), rows, self.field)

    def label(self, d, s):
        gens = self.pres.generators
        parts = []
        for w, c in sorted(self.bases[d][s].items()):
            parts.append("%s*%s" % (self.field.format(c), "".join(gens[g] for g in w) or "1"))
        return "+".join(parts)


def koszul_dual_coalgebra(pres, D, signed=False):
    return GradedCoalgebra(pres, D, signed=signed)


# ----------------------------------------------------------- Koszul complex

def koszul_complex(alg, coalg, D):
    """Augmented Koszul complex A (x) C_m, b(a (x) x_i f') = a x_i (x) f'.

    The letter moved into A is the first tensor factor of f; with the last
    factor instead, b o b would multiply by the opposite relations.

    Cells are (m, w) with w = deg a + m; the augmentation A_0 -> k sits at
    homological degree -1, weight 0.
    """
    F = alg.field
    n = alg.n
    terms, diffs = {}, {}
    for w in range(D + 1):
        for m in range(0, w + 1):
            i = w - m
            if i > alg.D or m > coalg.D:
                continue
            terms[(m, w)] = [(i, a, s) for a in range(alg.dim(i)) for s in range(coalg.dim(m))]
    terms[(-1, 0)] = ["k"]
    for (m, w), labels in terms.items():
        if m <= 0:
            continue
        i = w - m
        tgt = {lab: k for k, lab in enumerate(terms[(m - 1, w)])}
        cols = []
        for (_, a, s) in labels:
            out = {}
            for (g, s2), c in coalg.split_first(m, s).items():
                for a2, v in alg.multiply_basis(i, a, 1, g).items():
                    vec_axpy(out, c * v, {tgt[(i + 1, a2, s2)]: F.one})
            cols.append(out)
        diffs[(m, w)] = SparseMatrix.from_columns(len(terms[(m - 1, w)]), len(labels), cols, F)
    diffs[(0, 0)] = SparseMatrix.from_rows(1, 1, {0: {0: F.one}}, F)
    return BigradedComplex(terms, diffs, direction=-1, field=F, name="Koszul complex")


def check_koszul(pres, D):
    """Exactness of the augmented Koszul complex weight by weight, plus the
    Hilbert-series witness  h_A(t) h_{A^!}(-t) = 1 + O(t^{D+1})."""
    alg = expand(pres, D)
    coalg = koszul_dual_coalgebra(pres, D)
    dual = expand(quadratic_dual(pres), D)
    K = koszul_complex(alg, coalg, D)
    exact = {}
    for w in range(D + 1):
        ok = True
        for m in range(-1 if w == 0 else 0, w + 1):
            if K.dim((m, w)) and K.homology(m, w).dim:
                ok = False
        exact[w] = ok
    a = alg.dims()
    b = [(-1) ** d * dual.dim(d) for d in range(D + 1)]
    prod = [sum(a[i] * b[t - i] for i in range(t + 1)) for t in range(D + 1)]
    hilbert_ok = prod == [1] + [0] * D
    verdict = all(exact.values()) and hilbert_ok
    return {
        "degree_bound": D,
        "exact": exact,
        "hilbert_product": prod,
        "hilbert_ok": hilbert_ok,
        "koszul_up_to_degree": verdict,
        "statement": ("Koszul up to degree %d" % D) if verdict else ("not Koszul (within degree %d)" % D),
    }


# ------------------------------------------------------------ automorphisms

class AlgebraAutomorphism:
    """Graded automorphism determined by its matrix on V (column g = image of g)."""

    def __init__(self, alg, matrix_V, coalg=None):
        self.alg = alg
        self.field = alg.field
        n = alg.n
        F = self.field
        self.V = [[F(x) for x in row] for row in matrix_V]
        if len(self.V) != n or any(len(r) != n for r in self.V):
            raise NotAnAutomorphism("matrix on V must be %dx%d" % (n, n))
        mV = SparseMatrix.from_dense(self.V, F)
        from .kernel import determinant
        if not determinant(mV):
            raise NotAnAutomorphism("matrix on V is singular")
        self._check_relations()
        self.on_A = {}
        for d in range(alg.D + 1):
            cols = []
            for w in alg.bases[d]:
                img = tensor_apply(self.V, {w: F.one}, n)
                cols.append(alg.reduce(d, img))
            self.on_A[d] = SparseMatrix.from_columns(alg.dim(d), alg.dim(d), cols, F)
        self.coalg = coalg
        self.on_C = {}
        if coalg is not None:
            for d in range(coalg.D + 1):
                cols = []
                for vec in coalg.bases[d]:
                    img = tensor_apply(self.V, vec, n)
                    if not coalg.contains(d, img):
                        raise NotAnAutomorphism("sigma does not preserve C_%d" % d)
                    cols.append(coalg.coords(d, img))
                self.on_C[d] = SparseMatrix.from_columns(coalg.dim(d), coalg.dim(d), cols, F)

    def _check_relations(self):
        pres = self.alg.pres
        n = pres.n
        ech = Echelon(self.field)
        for v in pres.relation_vectors():
            ech.add(v)
        for rel in pres.relations:
            img = tensor_apply(self.V, {(i, j): c for (i, j), c in rel.items()}, n)
            vec = {word_index(w, n): c for w, c in img.items()}
            if not ech.contains(vec):
                raise NotAnAutomorphism("sigma(R) != R")

    def matrix(self, d):
        return self.on_A[d]

    def check_multiplicative(self):
        alg = self.alg
        for d1 in range(alg.D + 1):
            for d2 in range(alg.D + 1 - d1):
                for i in range(alg.dim(d1)):
                    for j in range(alg.dim(d2)):
                        lhs = self.on_A[d1 + d2].apply(alg.multiply_basis(d1, i, d2, j))
                        rhs = alg.multiply(d1, self.on_A[d1].column(i), d2, self.on_A[d2].column(j))
                        if lhs != rhs:
                            return False
        return True

    def check_coalgebra_map(self):
        """(sigma (x) sigma) Delta == Delta sigma on the coalgebra."""
        C = self.coalg
        if C is None:
            return True
        for d in range(C.D + 1):
            for s in range(C.dim(d)):
                lhs = {}
                for (i, a, b), c in C.coproduct(d, s).items():
                    for a2, x in self.on_C[i].column(a).items():
                        for b2, y in self.on_C[d - i].column(b).items():
                            key = (i, a2, b2)
                            lhs[key] = lhs.get(key, 0) + c * x * y
                rhs = {}
                for s2, x in self.on_C[d].column(s).items():
                    for key, c in C.coproduct(d, s2).items():
                        rhs[key] = rhs.get(key, 0) + x * c
                lhs = {k: v for k, v in lhs.items() if v}
                rhs = {k: v for k, v in rhs.items() if v}
                if lhs != rhs:
                    return False
        return True

    def eigendata(self):
        return eigenspace_decomposition(SparseMatrix.from_dense(self.V, self.field))

    def is_identity(self):
        n = self.alg.n
        return all(self.V[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))


def extend_automorphism(alg, matrix_V, coalg=None):
    return AlgebraAutomorphism(alg, matrix_V, coalg)


# ----------------------------------------------------------------- spec IO

def parse_spec(text, source="<spec>"):
    """Parse the algebra-spec JSON document into (presentation, automorphism)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(exc.msg, "%s:%d:%d" % (source, exc.lineno, exc.colno)) from None
    if not isinstance(doc, dict):
        raise SpecError("top level must be an object", source)
    try:
        field = field_from_descriptor(doc.get("field", "Q"))
    except FieldError as exc:
        raise SpecError(str(exc), "%s: field" % source) from None
    gens = doc.get("generators")
    if not isinstance(gens, list) or not gens or not all(isinstance(g, str) for g in gens):
        raise SpecError("generators must be a non-empty list of names", "%s: generators" % source)
    if "degrees" in doc and any(d != 1 for d in doc["degrees"]):
        raise SpecError("all generators must have degree 1", "%s: degrees" % source)
    pos = {g: i for i, g in enumerate(gens)}
    rels = []
    for r, rel in enumerate(doc.get("relations", [])):
        if not isinstance(rel, list):
            raise SpecError("relation must be a list of terms", "%s: relations[%d]" % (source, r))
        vec = {}
        for t, term in enumerate(rel):
            loc = "%s: relations[%d][%d]" % (source, r, t)
            if not isinstance(term, dict) or "coeff" not in term or "word" not in term:
                raise SpecError("term needs 'coeff' and 'word'", loc)
            word = term["word"]
            if not isinstance(word, list) or len(word) != 2:
                raise SpecError("relation words must have length 2 (quadratic)", loc + ".word")
            for g in word:
                if g not in pos:
                    raise SpecError("unknown generator %r" % (g,), loc + ".word")
            try:
                c = field.parse(term["coeff"])
            except FieldError as exc:
                raise SpecError(str(exc), loc + ".coeff") from None
            key = (pos[word[0]], pos[word[1]])
            vec[key] = vec.get(key, field.zero) + c
        rels.append(vec)
    pres = QuadraticPresentation(gens, rels, field, name=doc.get("name"))
    auto = doc.get("automorphism")
    if auto is not None:
        n = len(gens)
        if not isinstance(auto, list) or len(auto) != n or any(
                not isinstance(row, list) or len(row) != n for row in auto):
            raise SpecError("automorphism must be a %dx%d matrix" % (n, n), "%s: automorphism" % source)
        try:
            auto = [[field.parse(x) for x in row] for row in auto]
        except FieldError as exc:
            raise SpecError(str(exc), "%s: automorphism" % source) from None
    return pres, auto


def load_spec(path):
    with open(path) as fh:
        text = fh.read()
    return parse_spec(text, source=str(path))


def presentation_to_spec(pres):
    F = pres.field
    return {
        "field": F.descriptor(),
        "generators": list(pres.generators),
        "relations": [[{"coeff": F.format(c), "word": [pres.generators[i], pres.generators[j]]}
                       for (i, j), c in sorted(rel.items())] for rel in pres.relations],
    }
