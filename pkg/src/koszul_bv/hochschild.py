"""Hochschild complexes, Connes operators and eigenvalue blocks.

Algebra side (A graded by weight, no Koszul signs):

    reduced chains  M (x) Abar^{(x)p},  cell (p, w) with w the total degree.

Twisted coefficients are the bimodule _sA (left action through s):

    b(m, a_1..a_n) = (m a_1, ..) + sum (-1)^i (.., a_i a_{i+1}, ..)
                     + (-1)^n (s(a_n) m, a_1, .., a_{n-1})
    B(a_0..a_n)    = sum_i (-1)^{ni} (1, s(a_i), .., s(a_n), a_0, .., a_{i-1})
    T              = s on every tensor factor

so that bB + Bb = Id - T, and s = id gives the classical mixed complex.
Since _sA is isomorphic to A_{s^{-1}} (m -> s^{-1}(m)), this models the
right-twisted module A_sigma with sigma = s^{-1}.

Basis labels of chains are tuples of (degree, index) pairs.
"""

import itertools

from .kernel import (
    BigradedComplex,
    NotSemisimpleOverField,
    SparseMatrix,
    eigenspace_decomposition,
    inverse,
    lagrange_projection,
    monomial_values,
    rank,
    vec_axpy,
)


class IdentityViolated(AssertionError):
    def __init__(self, cell, what="bB + Bb = Id - T"):
        self.cell = cell
        super().__init__("%s fails at cell %r" % (what, cell))


# ------------------------------------------------------------ tensor utils

def _add(out, k, v):
    s = out.get(k)
    s = v if s is None else s + v
    if s:
        out[k] = s
    else:
        out.pop(k, None)


def tensor(factors):
    """Multilinear expansion of a list of dicts into a dict over tuples."""
    acc = {(): 1}
    for f in factors:
        nxt = {}
        for t, c in acc.items():
            for e, v in f.items():
                _add(nxt, t + (e,), c * v)
        acc = nxt
    return acc


def degree_compositions(w, p, first_min=0):
    """Tuples (d_0, .., d_p) with d_0 >= first_min, d_i >= 1, summing to w."""
    def pos(total, k):
        if k == 0:
            if total == 0:
                yield ()
            return
        for d in range(1, total - k + 2):
            for rest in pos(total - d, k - 1):
                yield (d,) + rest
    for d0 in range(first_min, w - p + 1):
        for rest in pos(w - d0, p):
            yield (d0,) + rest


class AlgebraOps:
    """Products and automorphism action on (degree, index) basis elements."""

    def __init__(self, alg, sigma=None):
        self.alg = alg
        self.field = alg.field
        self.sigma = sigma
        self._mul = {}
        self._sig = {}

    def mul(self, x, y):
        key = (x, y)
        r = self._mul.get(key)
        if r is None:
            (d1, i), (d2, j) = x, y
            r = {(d1 + d2, k): v for k, v in self.alg.multiply_basis(d1, i, d2, j).items()}
            self._mul[key] = r
        return r

    def mulv(self, X, Y):
        out = {}
        for x, a in X.items():
            for y, b in Y.items():
                for k, v in self.mul(x, y).items():
                    _add(out, k, a * b * v)
        return out

    def sig(self, x):
        if self.sigma is None:
            return {x: self.field.one}
        r = self._sig.get(x)
        if r is None:
            d, i = x
            r = {(d, k): v for k, v in self.sigma.matrix(d).column(i).items()}
            self._sig[x] = r
        return r

    def sigv(self, X):
        out = {}
        for x, a in X.items():
            for k, v in self.sig(x).items():
                _add(out, k, a * v)
        return out

    def one(self):
        return {(0, 0): self.field.one}


# ------------------------------------------------------------ bar chains

class BarChains:
    """Reduced Hochschild chains of A with coefficients in A or _sA.

    Cells (p, w) for w <= W.  ``complex`` is the underlying BigradedComplex.
    """

    def __init__(self, alg, W, sigma=None, name=None):
        if W > alg.D:
            raise ValueError("weight bound %d exceeds expansion degree %d" % (W, alg.D))
        self.alg = alg
        self.field = alg.field
        self.W = W
        self.sigma = sigma
        self.ops = AlgebraOps(alg, sigma)
        self.labels = {}
        for w in range(W + 1):
            for p in range(0, w + 1):
                labs = []
                for ds in degree_compositions(w, p):
                    for idx in itertools.product(*[range(alg.dim(d)) for d in ds]):
                        labs.append(tuple(zip(ds, idx)))
                self.labels[(p, w)] = labs
        self.index = {c: {lab: k for k, lab in enumerate(labs)} for c, labs in self.labels.items()}
        diffs = {}
        for (p, w) in self.labels:
            if p >= 1:
                diffs[(p, w)] = self._matrix((p, w), (p - 1, w), self.b_label)
        self.complex = BigradedComplex(self.labels, diffs, direction=-1, field=self.field,
                                       name=name or "bar chains")
        self._B = None
        self._T = None

    def cells(self):
        return sorted(self.labels)

    def dim(self, cell):
        return len(self.labels.get(cell, ()))

    def _matrix(self, src, dst, fn):
        tgt = self.index.get(dst, {})
        cols = []
        for lab in self.labels[src]:
            col = {}
            for k, v in fn(lab).items():
                col[tgt[k]] = col.get(tgt[k], 0) + v
            cols.append({r: v for r, v in col.items() if v})
        return SparseMatrix.from_columns(len(tgt), len(self.labels[src]), cols, self.field)

    # -- operators on basis labels
    def b_label(self, t):
        n = len(t) - 1
        out = {}
        if n == 0:
            return out
        ops = self.ops
        a = [{x: self.field.one} for x in t]
        for k, v in tensor([ops.mulv(a[0], a[1])] + a[2:]).items():
            _add(out, k, v)
        for i in range(1, n):
            sign = -1 if i % 2 else 1
            for k, v in tensor(a[:i] + [ops.mulv(a[i], a[i + 1])] + a[i + 2:]).items():
                _add(out, k, sign * v)
        sign = -1 if n % 2 else 1
        for k, v in tensor([ops.mulv(ops.sigv(a[n]), a[0])] + a[1:n]).items():
            _add(out, k, sign * v)
        return out

    def B_label(self, t):
        n = len(t) - 1
        out = {}
        if t[0][0] == 0:
            return out       # a_0 lands in Abar: its unit part dies
        ops = self.ops
        a = [{x: self.field.one} for x in t]
        for i in range(n + 1):
            sign = -1 if (n * i) % 2 else 1
            if i == 0:
                f = [ops.one()] + a
            else:
                f = [ops.one()] + [ops.sigv(x) for x in a[i:]] + a[:i]
            for k, v in tensor(f).items():
                _add(out, k, sign * v)
        return out

    def T_label(self, t):
        return tensor([self.ops.sig(x) for x in t])

    # -- matrices
    def b(self, p, w):
        return self.complex.d(p, w)

    def B(self, p, w):
        """Connes operator (p, w) -> (p + 1, w); zero beyond the window."""
        if self._B is None:
            self._B = {}
        if (p, w) not in self._B:
            if (p + 1, w) in self.labels:
                M = self._matrix((p, w), (p + 1, w), self.B_label)
            else:
                M = SparseMatrix.zero(0, self.dim((p, w)), self.field)
            self._B[(p, w)] = M
        return self._B[(p, w)]

    def T(self, p, w):
        if self._T is None:
            self._T = {}
        if (p, w) not in self._T:
            self._T[(p, w)] = self._matrix((p, w), (p, w), self.T_label)
        return self._T[(p, w)]

    def homology(self, p, w):
        return self.complex.homology(p, w)

    # -- identities
    def _bB_plus_Bb(self, p, w):
        n = self.dim((p, w))
        acc = SparseMatrix.zero(n, n, self.field)
        if (p + 1, w) in self.labels:
            acc = acc + self.b(p + 1, w) @ self.B(p, w)
        if p >= 1:
            acc = acc + self.B(p - 1, w) @ self.b(p, w)
        return acc

    def interior_cells(self):
        """Cells where both bB and Bb stay inside the window (p + 1 <= w)."""
        return [(p, w) for (p, w) in self.cells() if p + 1 <= w]

    def check_homotopy_T(self):
        for (p, w) in self.interior_cells():
            lhs = self._bB_plus_Bb(p, w)
            n = self.dim((p, w))
            rhs = SparseMatrix.identity(n, self.field) - self.T(p, w)
            if lhs != rhs:
                raise IdentityViolated((p, w))
        return True

    def check_mixed(self):
        """B^2 = 0 and bB + Bb = 0 (classical coefficients)."""
        for (p, w) in self.interior_cells():
            if not self._bB_plus_Bb(p, w).is_zero():
                raise IdentityViolated((p, w), "bB + Bb = 0")
            if (p + 2, w) in self.labels and not (self.B(p + 1, w) @ self.B(p, w)).is_zero():
                raise IdentityViolated((p, w), "B^2 = 0")
        return True

    def check_T_commutes(self):
        for (p, w) in self.cells():
            if p >= 1 and self.b(p, w) @ self.T(p, w) != self.T(p - 1, w) @ self.b(p, w):
                return False
        return True

    # -- eigen blocks
    def eigen_blocks(self):
        """EigenBlocks for the twist, or NotSemisimpleOverField."""
        return EigenBlocks(self)


class EigenBlocks:
    """Decomposition of every chain term by products of eigenvalues of s.

    ``basis[(p, w)]`` is a list of (lambda, vector) over the term; the
    change-of-basis matrices ``P[(p, w)]`` (columns = eigenvectors) are
    invertible and ``block_complex(lam)`` restricts b to the lambda part.
    """

    def __init__(self, chains):
        self.chains = chains
        F = chains.field
        alg = chains.alg
        self.degree_eigs = {}
        for d in range(chains.W + 1):
            if not alg.dim(d):
                continue
            if chains.sigma is None:
                vecs = [(F.one, {i: F.one}) for i in range(alg.dim(d))]
            else:
                dec = eigenspace_decomposition(chains.sigma.matrix(d))
                vecs = [(lam, v) for lam, basis in dec for v in basis]
            self.degree_eigs[d] = vecs
        self.basis = {}
        self.P = {}
        self.Pinv = {}
        for cell, labs in chains.labels.items():
            p, w = cell
            vecs = []
            for ds in degree_compositions(w, p):
                if any(d not in self.degree_eigs for d in ds):
                    continue
                choices = [self.degree_eigs[d] for d in ds]
                for combo in itertools.product(*choices):
                    lam = F.one
                    for l, _ in combo:
                        lam = lam * l
                    factors = [{(d, i): c for i, c in v.items()} for d, (_, v) in zip(ds, combo)]
                    vecs.append((lam, tensor(factors)))
            idx = chains.index[cell]
            cols = [{idx[k]: c for k, c in vec.items()} for _, vec in vecs]
            self.basis[cell] = [lam for lam, _ in vecs]
            self.P[cell] = SparseMatrix.from_columns(len(labs), len(cols), cols, F)
            self.Pinv[cell] = inverse(self.P[cell]) if labs else self.P[cell]
        self.eigenvalues = sorted({lam for lams in self.basis.values() for lam in lams},
                                  key=_key)

    def positions(self, cell, lam):
        return [k for k, l in enumerate(self.basis[cell]) if l == lam]

    def projection(self, cell, lam):
        keep = set(self.positions(cell, lam))
        F = self.chains.field
        n = len(self.basis[cell])
        D = SparseMatrix.from_rows(n, n, {k: {k: F.one} for k in keep}, F)
        return self.P[cell] @ D @ self.Pinv[cell]

    def block_complex(self, lam):
        ch = self.chains
        F = ch.field
        terms = {cell: [("e", k) for k in self.positions(cell, lam)] for cell in ch.labels}
        diffs = {}
        for (p, w) in ch.labels:
            if p < 1:
                continue
            src = self.positions((p, w), lam)
            dst = self.positions((p - 1, w), lam)
            full = self.Pinv[(p - 1, w)] @ ch.b(p, w) @ self.P[(p, w)]
            dpos = {k: r for r, k in enumerate(dst)}
            cols = []
            for k in src:
                col = full.column(k)
                out = {}
                for r, v in col.items():
                    if r not in dpos:
                        raise ArithmeticError("b does not preserve the eigenvalue blocks")
                    out[dpos[r]] = v
                cols.append(out)
            diffs[(p, w)] = SparseMatrix.from_columns(len(dst), len(src), cols, F)
        return BigradedComplex(terms, diffs, direction=-1, field=F, name="block %r" % (lam,))

    def block_homology_dims(self, lam):
        C = self.block_complex(lam)
        return {cell: C.homology(*cell).dim for cell in C.cells() if C.dim(cell)}

    def check_decomposition(self):
        for cell in self.chains.labels:
            n = len(self.basis[cell])
            if not n:
                continue
            total = SparseMatrix.zero(n, n, self.chains.field)
            for lam in set(self.basis[cell]):
                Pl = self.projection(cell, lam)
                if Pl @ Pl != Pl:
                    return False
                total = total + Pl
            if total != SparseMatrix.identity(n, self.chains.field):
                return False
        return True


def _key(x):
    return (0, x) if not hasattr(x, "value") else (1, x.value)


def bar_chains(alg, W, sigma=None):
    return BarChains(alg, W, sigma)


# ------------------------------------------------ graded (finite) algebra side
#
# For the finite-dimensional graded algebra A^! all signs are Koszul signs in
# the suspension sA (|sa| = |a| - 1):
#
#     m~(sa, sb) = (-1)^{|a|} s(ab)
#
# A cochain is F : (s Abar)^{(x)p} -> sA of degree |F| = q + p - 1, where q is
# its internal weight (output degree minus input degree).  Braces insert with
# the Koszul rule, delta F = [m~, F] and [F, G] = F{G} - (-1)^{|F||G|} G{F}.
# The total degree of the desuspended cochain is m = p + q = |F| + 1.


def _sgn(k):
    return -1 if k % 2 else 1


def input_tuples(alg, p, total, top):
    """Tuples of p basis elements of Abar with degrees summing to ``total``."""
    out = []
    for ds in degree_compositions(total, p - 1, first_min=1) if p else [()]:
        if p and not all(1 <= d <= top for d in ds):
            continue
        for idx in itertools.product(*[range(alg.dim(d)) for d in ds]):
            out.append(tuple(zip(ds, idx)))
    return out if p else ([()] if total == 0 else [])


class GradedOps:
    """Suspended product and automorphism on (degree, index) elements of A^!."""

    def __init__(self, alg, sigma=None):
        self.alg = alg
        self.field = alg.field
        self.top = alg.top_degree()
        self.sigma = sigma
        self._m = {}

    def mt(self, x, y):
        """m~(sx, sy) as a dict over (degree, index)."""
        key = (x, y)
        r = self._m.get(key)
        if r is None:
            (d1, i), (d2, j) = x, y
            if d1 + d2 > self.top:
                r = {}
            else:
                e = _sgn(d1)
                r = {(d1 + d2, k): e * v for k, v in self.alg.multiply_basis(d1, i, d2, j).items()}
            self._m[key] = r
        return r

    def mul(self, x, y):
        (d1, i), (d2, j) = x, y
        if d1 + d2 > self.top:
            return {}
        return {(d1 + d2, k): v for k, v in self.alg.multiply_basis(d1, i, d2, j).items()}

    def sig(self, x):
        if self.sigma is None:
            return {x: self.field.one}
        d, i = x
        return {(d, k): v for k, v in self.sigma.matrix(d).column(i).items()}


class GradedCochains:
    """Reduced Hochschild cochains of a finite graded algebra with itself.

    Cells are (m, q): total degree m = p + q and internal weight q, where p
    is the number of inputs.  Labels are (inputs, output) pairs: the basis
    cochain sending the basis tuple ``inputs`` to the basis element
    ``output`` (in unsuspended terms) and all other basis tuples to zero.
    Each weight slice is finite (p <= top - q), so slices are built whole.
    """

    def __init__(self, alg, qmin, qmax, pmax=None):
        self.alg = alg
        self.field = alg.field
        self.ops = GradedOps(alg)
        top = self.ops.top
        self.top = top
        self.qmin, self.qmax, self.pmax = qmin, qmax, pmax
        self.labels = {}
        self._inputs = {}
        for q in range(qmin, qmax + 1):
            phigh = top - q
            if pmax is not None:
                phigh = min(phigh, pmax)
            for p in range(0, phigh + 1):
                labs = []
                for e in range(p, p * top + 1):
                    o = e + q
                    if o < 0 or o > top:
                        continue
                    ins = input_tuples(alg, p, e, top)
                    for t in ins:
                        for k in range(alg.dim(o)):
                            labs.append((t, (o, k)))
                if labs or p == 0:
                    self.labels[(p + q, q)] = labs
        self.index = {c: {lab: k for k, lab in enumerate(l)} for c, l in self.labels.items()}
        diffs = {}
        for (m, q) in self.labels:
            if (m + 1, q) in self.labels:
                diffs[(m, q)] = self._delta_matrix(m, q)
        self.complex = BigradedComplex(self.labels, diffs, direction=+1, field=self.field,
                                       name="CH^*(A^!)")

    @staticmethod
    def arity(cell):
        m, q = cell
        return m - q

    def in_window(self, cell):
        """True when the cell lies in the window, built or structurally empty
        (q above the top degree leaves no room for an output)."""
        p, q = cell[0] - cell[1], cell[1]
        if q > self.top:
            return True
        return self.qmin <= q <= self.qmax and (self.pmax is None or p <= self.pmax)

    def _delta_matrix(self, m, q):
        """Matrix of delta F = m~{F} - (-1)^{|F|} F{m~} on basis cochains."""
        p = m - q
        F_deg = q + p - 1
        src = self.index[(m, q)]
        tgt = self.index[(m + 1, q)]
        cols = [dict() for _ in range(len(src))]
        ops = self.ops
        for (ys, o2), row in tgt.items():
            # contributions to (delta E)(ys) at output o2, for each source E
            sus = [d - 1 for d, _ in ys]
            # m~(F(y_1..y_p), y_{p+1})
            for (t, o), col in self._by_inputs(m, q, ys[:p]):
                c = ops.mt(o, ys[p]).get(o2)
                if c:
                    _add(cols[col], row, c)
            # (-1)^{|F||y_1|} m~(y_1, F(y_2..))
            e1 = _sgn(F_deg * sus[0])
            for (t, o), col in self._by_inputs(m, q, ys[1:]):
                c = ops.mt(ys[0], o).get(o2)
                if c:
                    _add(cols[col], row, e1 * c)
            # -(-1)^{|F|} sum_i (-1)^{|y_1|+..+|y_i|} F(.., m~(y_{i+1}, y_{i+2}), ..)
            pre = 0
            for i in range(p):
                prod = ops.mt(ys[i], ys[i + 1])
                e = -_sgn(F_deg) * _sgn(pre)
                for z, c in prod.items():
                    t = ys[:i] + (z,) + ys[i + 2:]
                    col = src.get((t, o2))
                    if col is not None:
                        _add(cols[col], row, e * c)
                pre += sus[i]
        return SparseMatrix.from_columns(len(tgt), len(src), cols, self.field)

    def _by_inputs(self, m, q, t):
        """Source basis cochains with input tuple t: [(label, column)]."""
        cache = self.__dict__.setdefault("_bi_cache", {})
        key = (m, q)
        if key not in cache:
            table = {}
            for lab, col in self.index[(m, q)].items():
                table.setdefault(lab[0], []).append((lab, col))
            cache[key] = table
        return cache[key].get(tuple(t), ())

    def homology(self, m, q):
        return self.complex.homology(m, q)

    def dims(self):
        return {c: self.homology(*c).dim for c in sorted(self.labels)}

    # -- evaluation helpers
    def evaluate(self, cell, F, ys):
        """F(ys) (unsuspended output coordinates) for a cochain vector F."""
        out = {}
        L = self.labels[cell]
        for k, c in F.items():
            t, o = L[k]
            if t == tuple(ys):
                _add(out, o, c)
        return out

    def cochain_from_function(self, cell, fn):
        """Vector of the cochain whose value on each input tuple is fn(t)."""
        out = {}
        idx = self.index[cell]
        seen = set()
        for (t, o) in self.labels[cell]:
            if t in seen:
                continue
            seen.add(t)
            for oo, c in fn(t).items():
                k = idx.get((t, oo))
                if k is None:
                    if c:
                        raise ValueError("value outside the cell")
                    continue
                _add(out, k, c)
        return out


def graded_cochains(alg, qmin, qmax, pmax=None):
    return GradedCochains(alg, qmin, qmax, pmax)


class GradedChains(BarChains):
    """Reduced Hochschild chains of a finite graded algebra, coefficients _sA.

    Cells are (p, d) with p the number of Abar factors and d the total
    internal degree, d <= D.  With x_j = s a_j:

        b(x_0|..|x_p) = sum_i (-1)^{|x_0|+..+|x_{i-1}|} (..|m~(x_i, x_{i+1})|..)
                        + (-1)^{|x_p|(|x_0|+..+|x_{p-1}|)} (m~(s x_p, x_0)|x_1|..)
        B(x_0|..|x_p) = sum_i (-1)^{(|x_0|+..+|x_{i-1}|)(|x_i|+..+|x_p|)}
                        (s1|s x_i|..|s x_p|x_0|..|x_{i-1})

    where s is the twist; B vanishes when x_0 is the unit.
    """

    def __init__(self, alg, D, sigma=None, name=None):
        if not alg.is_finite():
            raise ValueError("graded chains need a finite-dimensional algebra")
        self.alg = alg
        self.field = alg.field
        self.W = D
        self.sigma = sigma
        self.ops = GradedOps(alg, sigma)
        top = self.ops.top
        self.labels = {}
        for d in range(D + 1):
            for p in range(0, d + 1):
                labs = []
                for ds in degree_compositions(d, p):
                    if ds[0] > top or any(e > top for e in ds[1:]):
                        continue
                    for idx in itertools.product(*[range(alg.dim(e)) for e in ds]):
                        labs.append(tuple(zip(ds, idx)))
                self.labels[(p, d)] = labs
        self.index = {c: {lab: k for k, lab in enumerate(labs)} for c, labs in self.labels.items()}
        diffs = {}
        for (p, d) in self.labels:
            if p >= 1:
                diffs[(p, d)] = self._matrix((p, d), (p - 1, d), self.b_label)
        self.complex = BigradedComplex(self.labels, diffs, direction=-1, field=self.field,
                                       name=name or "CH_*(A^!)")
        self._B = None
        self._T = None

    def b_label(self, t):
        n = len(t) - 1
        out = {}
        if n == 0:
            return out
        ops = self.ops
        sus = [d - 1 for d, _ in t]
        pre = 0
        for i in range(n):
            e = _sgn(pre)
            for z, c in ops.mt(t[i], t[i + 1]).items():
                _add(out, t[:i] + (z,) + t[i + 2:], e * c)
            pre += sus[i]
        e = _sgn(sus[n] * (pre))
        for y, a in ops.sig(t[n]).items():
            for z, c in ops.mt(y, t[0]).items():
                _add(out, (z,) + t[1:n], e * a * c)
        return out

    def B_label(self, t):
        n = len(t) - 1
        out = {}
        if t[0][0] == 0:
            return out
        sus = [d - 1 for d, _ in t]
        one = [{(0, 0): self.field.one}]
        a = [{x: self.field.one} for x in t]
        total = sum(sus)
        pre = 0
        for i in range(n + 1):
            e = _sgn(pre * (total - pre))
            if i == 0:
                f = one + a
            else:
                f = one + [self.ops.sig(x) for x in t[i:]] + a[:i]
            for k, v in tensor(f).items():
                _add(out, k, e * v)
            pre += sus[i]
        return out


def graded_chains(alg, D, sigma=None):
    return GradedChains(alg, D, sigma)


# ------------------------------------------------ coalgebra side

class CoalgebraChains:
    """Hochschild chains of the coalgebra C = (A^!)^* with coefficients in the
    twisted comodule sigma*C.

    Labels are (c_1, .., c_p, c_0): p factors of Cbar followed by the
    coefficient c_0, each a (degree, index) pair; cells are (p, d) with d the
    total degree, d <= D.  The operators are built from the coproduct, the
    counit and sigma*:

        delta* splits one factor (the coefficient splits through
                 Delta_r and through the twisted Delta_l = (sigma* (x) 1) Delta)
        B*     is counit-weighted rotation toward shorter tensors
        T*     is sigma* on every factor

    and are, by construction, the transposes of b, B and T on
    ``GradedChains`` under the pairing of tensor factors (``pairing``).
    """

    def __init__(self, coalg, D, sigma_star=None, top=None, name=None):
        self.coalg = coalg
        self.field = coalg.field
        self.W = D
        self.sigma = sigma_star
        if top is None:
            top = max(d for d in range(coalg.D + 1) if coalg.dim(d))
        if coalg.D < top or coalg.dim(top) == 0:
            raise ValueError("coalgebra must be tabled through its top degree")
        self.top = top
        self.labels = {}
        for d in range(D + 1):
            for p in range(0, d + 1):
                labs = []
                for ds in degree_compositions(d, p):
                    if ds[0] > top or any(e > top for e in ds[1:]):
                        continue
                    order = ds[1:] + ds[:1]
                    for idx in itertools.product(*[range(coalg.dim(e)) for e in order]):
                        labs.append(tuple(zip(order, idx)))
                self.labels[(p, d)] = labs
        self.index = {c: {lab: k for k, lab in enumerate(labs)} for c, labs in self.labels.items()}
        diffs = {}
        for (p, d) in self.labels:
            if (p + 1, d) in self.labels:
                diffs[(p, d)] = self._matrix((p, d), (p + 1, d), self.delta_label)
        self.complex = BigradedComplex(self.labels, diffs, direction=+1, field=self.field,
                                       name=name or "coalgebra chains")
        self._B = {}
        self._T = {}
        self._cop = {}

    def cells(self):
        return sorted(self.labels)

    def dim(self, cell):
        return len(self.labels.get(cell, ()))

    _matrix = BarChains._matrix

    def _split(self, x):
        """Delta(x) as {(x', x''): coeff} over (degree, index) pairs."""
        r = self._cop.get(x) if hasattr(self, "_cop") else None
        if r is None:
            d, s = x
            r = {((i, a), (d - i, b)): c for (i, a, b), c in self.coalg.coproduct(d, s).items()
                 if i <= self.top and d - i <= self.top}
            self.__dict__.setdefault("_cop", {})[x] = r
        return r

    def sig(self, x):
        if self.sigma is None:
            return {x: self.field.one}
        d, s = x
        return {(d, k): v for k, v in self.sigma.on_C[d].column(s).items()}

    @staticmethod
    def _chain_order(t):
        """(c_1..c_p, c_0) -> (c_0, c_1..c_p), the order of the chain side."""
        return t[-1:] + t[:-1]

    def delta_label(self, c):
        """delta*: length p -> p + 1."""
        out = {}
        p = len(c) - 1
        fs = list(c[:p])
        c0 = c[p]
        # face 0: c_0 -> (a_0, a_1) with a_1 in Cbar
        for (x1, x2), v in self._split(c0).items():
            if x2[0] == 0:
                continue
            e = _sgn(x1[0])
            _add(out, tuple([x2] + fs + [x1]), e * v)
        # inner faces
        pre = c0[0] - 1
        for i in range(p):
            for (x1, x2), v in self._split(fs[i]).items():
                if x1[0] == 0 or x2[0] == 0:
                    continue
                e = _sgn(pre + x1[0])
                _add(out, tuple(fs[:i] + [x1, x2] + fs[i + 1:] + [c0]), e * v)
            pre += fs[i][0] - 1
        # wrap face: c_0 -> (sigma(a_p), a_0)
        for (x1, x2), v in self._split(c0).items():
            if x1[0] == 0:
                continue
            pre = x2[0] - 1 + sum(f[0] - 1 for f in fs)
            e = _sgn((x1[0] - 1) * pre + x1[0])
            for y, w in self.sig(x1).items():
                _add(out, tuple(fs + [y, x2]), e * v * w)
        return out

    def B_label(self, c):
        """B*: length p + 1 -> p, nonzero only on a counit coefficient."""
        out = {}
        if c[-1][0] != 0:
            return out
        ys = list(c[:-1])
        P1 = len(ys)
        if P1 == 0:
            return out
        p = P1 - 1
        F = self.field
        total = sum(y[0] - 1 for y in ys)
        for i in range(p + 1):
            # chain (a_0..a_p): a_k = y_{p+1-i+k} for k < i, a_{i+k} = sigma* y_k
            if i == 0:
                a = [{y: F.one} for y in ys]
            else:
                a = [{y: F.one} for y in ys[p + 1 - i:]] + [self.sig(y) for y in ys[:p + 1 - i]]
            pre = sum(y[0] - 1 for y in ys[p + 1 - i:]) if i else 0
            e = _sgn(pre * (total - pre))
            for k, v in tensor(a).items():
                _add(out, k[1:] + k[:1], e * v)
        return out

    def T_label(self, c):
        return tensor([self.sig(x) for x in c])

    def delta(self, p, d):
        return self.complex.d(p, d)

    def B(self, p, d):
        """(p, d) -> (p - 1, d)."""
        if (p, d) not in self._B:
            if (p - 1, d) in self.labels:
                M = self._matrix((p, d), (p - 1, d), self.B_label)
            else:
                M = SparseMatrix.zero(0, self.dim((p, d)), self.field)
            self._B[(p, d)] = M
        return self._B[(p, d)]

    def T(self, p, d):
        if (p, d) not in self._T:
            self._T[(p, d)] = self._matrix((p, d), (p, d), self.T_label)
        return self._T[(p, d)]

    def homology(self, p, d):
        return self.complex.homology(p, d)

    def interior_cells(self):
        return [(p, d) for (p, d) in self.cells() if p + 1 <= d]

    def check_homotopy_T(self):
        """delta* B* + B* delta* = Id - T* on interior cells."""
        for (p, d) in self.interior_cells():
            n = self.dim((p, d))
            acc = SparseMatrix.zero(n, n, self.field)
            acc = acc + self.B(p + 1, d) @ self.delta(p, d)
            if p >= 1:
                acc = acc + self.delta(p - 1, d) @ self.B(p, d)
            if acc != SparseMatrix.identity(n, self.field) - self.T(p, d):
                raise IdentityViolated((p, d), "delta* B* + B* delta* = Id - T*")
        return True

    def pairing(self, dual_alg, cell):
        """Matrix <chain label, coalgebra label> (rows: GradedChains labels)."""
        G = {}
        out = {}
        for s, c in enumerate(self.labels[cell]):
            factors = []
            for (d, k) in self._chain_order(c):
                if d not in G:
                    G[d] = self.coalg.pairing_matrix(dual_alg, d)
                factors.append({(d, r): v for r, v in G[d].column(k).items()})
            out[s] = tensor(factors)
        return out


def coalgebra_chains(coalg, D, sigma_star=None, top=None):
    return CoalgebraChains(coalg, D, sigma_star, top)


class OperatorBlocks:
    """Eigen-blocks of T on any chains object with ``T(cell)`` and cells
    (length, degree).  ``values`` are the eigenvalues of the twist on
    generators; on a cell of total degree d the eigenvalues of T lie among
    their d-fold products, which drives a Lagrange projector."""

    def __init__(self, chains, values):
        self.chains = chains
        self.values = list(values)
        self._proj = {}

    def candidates(self, cell):
        return monomial_values(self.values, cell[1])

    def eigenvalues(self):
        out = set()
        for cell in self.chains.labels:
            out.update(self.candidates(cell))
        return sorted(out, key=_key)

    def projection(self, cell, lam):
        key = (cell, lam)
        if key not in self._proj:
            T = self.chains.T(*cell)
            cands = self.candidates(cell)
            if lam not in cands:
                P = SparseMatrix.zero(T.rows, T.cols, self.chains.field)
            else:
                P = lagrange_projection(T, lam, cands)
            self._proj[key] = P
        return self._proj[key]

    def check_decomposition(self):
        ch = self.chains
        for cell in ch.labels:
            n = ch.dim(cell)
            if not n:
                continue
            total = SparseMatrix.zero(n, n, ch.field)
            for lam in self.candidates(cell):
                P = self.projection(cell, lam)
                if P @ P != P:
                    return False
                total = total + P
            if total != SparseMatrix.identity(n, ch.field):
                return False
        return True

    def block_homology_dims(self, lam):
        """dim of the homology of the lam-block at every cell."""
        ch = self.chains
        C = ch.complex
        out = {}
        for cell in ch.cells():
            if not ch.dim(cell):
                continue
            P = self.projection(cell, lam)
            dimE = rank(P)
            if not dimE:
                continue
            h, w = cell
            nxt = (h + C.direction, w)
            prv = (h - C.direction, w)
            r_out = rank(C.d(*cell) @ P) if nxt in ch.labels and ch.dim(nxt) else 0
            r_in = 0
            if prv in ch.labels and ch.dim(prv):
                r_in = rank(C.d(*prv) @ self.projection(prv, lam))
            hd = dimE - r_out - r_in
            if hd:
                out[cell] = hd
        return out
