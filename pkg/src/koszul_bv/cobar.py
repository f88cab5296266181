"""Cobar construction of the Koszul dual coalgebra and the complexes over it.

Omega(C) is the tensor algebra on s^{-1} Cbar.  A word is a tuple of letters
(d, s), the basis element s of C_d with d >= 1.  Degrees are homological:
|s^{-1} c| = d - 1, weight = d.  The differential is

    d(s^{-1}c) = sum (-1)^{|c'|} s^{-1}c' s^{-1}c''      (reduced coproduct)

extended as a derivation.  q : Omega(C) -> A sends a word of degree-one
letters to their product in A and every other word to zero.

Hochschild chains of Omega with coefficients in _sOmega use the suspension
|sa| = |a| + 1 and

    m1(sa) = -s(da),   m2(sa, sb) = (-1)^{|a|} s(ab)

with the same Koszul bookkeeping as the graded chains of A^!: the last
factor wraps around through s.
"""

import itertools

from .hochschild import IdentityViolated, _add, _sgn, degree_compositions, tensor
from .kernel import BigradedComplex, SparseMatrix


def _wdeg(word):
    return sum(d - 1 for d, _ in word)


def _wweight(word):
    return sum(d for d, _ in word)


class CobarAlgebra:
    """Omega(C) truncated at weight W (and optionally word length L)."""

    def __init__(self, coalg, W, L=None, sigma=None):
        self.coalg = coalg
        self.field = coalg.field
        self.W = W
        self.L = L
        self.sigma = sigma
        top = max(d for d in range(coalg.D + 1) if coalg.dim(d))
        self.top = top
        self.letters = [(d, s) for d in range(1, top + 1) for s in range(coalg.dim(d))]
        self.words = {0: [()]}
        for w in range(1, W + 1):
            out = []
            for d, s in self.letters:
                if d <= w:
                    out.extend(((d, s),) + rest for rest in self.words[w - d])
            self.words[w] = [x for x in out if L is None or len(x) <= L]
        self._dl = {}
        self._sl = {}
        labels = {}
        for w, ws in self.words.items():
            for x in ws:
                labels.setdefault((_wdeg(x), w), []).append(x)
        self.labels = labels
        self.index = {c: {x: k for k, x in enumerate(l)} for c, l in labels.items()}
        diffs = {}
        for (n, w), xs in labels.items():
            if n >= 1:
                tgt = self.index.get((n - 1, w), {})
                cols = [{tgt[y]: v for y, v in self.d_word(x).items()} for x in xs]
                diffs[(n, w)] = SparseMatrix.from_columns(len(tgt), len(xs), cols, self.field)
        self.complex = BigradedComplex(labels, diffs, direction=-1, field=self.field,
                                       name="cobar")

    def d_letter(self, x):
        """d(s^{-1}c) as {word: coeff} (words of length two)."""
        r = self._dl.get(x)
        if r is None:
            d, s = x
            r = {}
            for (i, a, b), c in self.coalg.coproduct(d, s).items():
                if i == 0 or i == d:
                    continue
                _add(r, ((i, a), (d - i, b)), _sgn(i - 1) * c)
            self._dl[x] = r
        return r

    def d_word(self, word):
        out = {}
        pre = 0
        for i, x in enumerate(word):
            e = _sgn(pre)
            for y, c in self.d_letter(x).items():
                new = word[:i] + y + word[i + 1:]
                if self.L is not None and len(new) > self.L:
                    continue
                _add(out, new, e * c)
            pre += x[0] - 1
        return out

    def sig_letter(self, x):
        if self.sigma is None:
            return {x: self.field.one}
        r = self._sl.get(x)
        if r is None:
            d, s = x
            r = {(d, k): v for k, v in self.sigma.on_C[d].column(s).items()}
            self._sl[x] = r
        return r

    def sig_word(self, word):
        out = {}
        for t, c in tensor([self.sig_letter(x) for x in word]).items():
            _add(out, t, c)
        return out

    def q_word(self, alg, word):
        """q(word) as coordinates on A_{len(word)}."""
        if any(d != 1 for d, _ in word):
            return {}
        C1 = self.coalg.bases[1]
        acc = {0: self.field.one}
        deg = 0
        for (_, s) in word:
            gen = {}
            for (g,), c in C1[s].items():
                gen[g] = c
            nxt = {}
            for i, a in acc.items():
                for g, c in gen.items():
                    for k, v in alg.multiply_basis(deg, i, 1, g).items():
                        _add(nxt, k, a * c * v)
            acc = nxt
            deg += 1
        return acc

    def check_q(self, alg):
        """q o d = 0 and q induces H_0(weight w) = A_w."""
        from .kernel import rank
        for (n, w), xs in self.labels.items():
            if n == 1:
                M = self.complex.d(1, w)
                for k in range(len(xs)):
                    img = {}
                    for r, c in M.column(k).items():
                        for j, v in self.q_word(alg, self.labels[(0, w)][r]).items():
                            _add(img, j, c * v)
                    if img:
                        return False
        for w in range(self.W + 1):
            if (0, w) not in self.labels:
                continue
            if self.complex.homology(0, w).dim != alg.dim(w):
                return False
            cols = [self.q_word(alg, x) for x in self.labels[(0, w)]]
            if rank(SparseMatrix.from_columns(alg.dim(w), len(cols), cols, self.field)) != alg.dim(w):
                return False
        return True


def cobar(coalg, W, L=None, sigma=None):
    return CobarAlgebra(coalg, W, L, sigma)


# ------------------------------------------------------------------ chains

def _concat(u, v):
    return u + v


class OmegaChains:
    """Reduced Hochschild chains of Omega with coefficients _sOmega.

    Labels are tuples of words (a_0, a_1..a_r) with a_i nonempty for i >= 1.
    Cells (N, w): N = |a_0| + sum_{i >= 1} (|a_i| + 1), w the total weight.
    """

    def __init__(self, omega, W=None):
        self.omega = omega
        self.field = omega.field
        W = omega.W if W is None else W
        self.W = W
        self.sigma = omega.sigma
        self.labels = {}
        for w in range(W + 1):
            for r in range(w + 1):
                for ds in degree_compositions(w, r):
                    for t in itertools.product(*[omega.words[e] for e in ds]):
                        N = _wdeg(t[0]) + sum(_wdeg(a) + 1 for a in t[1:])
                        self.labels.setdefault((N, w), []).append(t)
        self.index = {c: {t: k for k, t in enumerate(l)} for c, l in self.labels.items()}
        diffs = {}
        for (N, w) in self.labels:
            if (N - 1, w) in self.labels:
                diffs[(N, w)] = self._matrix((N, w), (N - 1, w), self.D_label)
        self.complex = BigradedComplex(self.labels, diffs, direction=-1, field=self.field,
                                       name="CH(Omega)")
        self._B = {}
        self._T = {}

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
                if k not in tgt:
                    raise KeyError("term %r escapes cell %r" % (k, dst))
                _add(col, tgt[k], v)
            cols.append(col)
        return SparseMatrix.from_columns(len(tgt), len(self.labels[src]), cols, self.field)

    @staticmethod
    def _sus(a):
        return _wdeg(a) + 1

    def D_label(self, t):
        om = self.omega
        out = {}
        r = len(t) - 1
        sus = [self._sus(a) for a in t]
        pre = 0
        for i, a in enumerate(t):
            # m1 on slot i
            e = -_sgn(pre)
            for y, c in om.d_word(a).items():
                _add(out, t[:i] + (y,) + t[i + 1:], e * c)
            if i < r:
                e = _sgn(pre + _wdeg(a))
                _add(out, t[:i] + (a + t[i + 1],) + t[i + 2:], e * self.field.one)
            pre += sus[i]
        if r >= 1:
            last = t[r]
            e = _sgn(sus[r] * (pre - sus[r]) + _wdeg(last))
            for y, c in om.sig_word(last).items():
                _add(out, (y + t[0],) + t[1:r], e * c)
        return out

    def B_label(self, t):
        out = {}
        if not t[0]:
            return out
        om = self.omega
        r = len(t) - 1
        sus = [self._sus(a) for a in t]
        total = sum(sus)
        pre = 0
        F = self.field
        for i in range(r + 1):
            e = _sgn(pre * (total - pre))
            if i == 0:
                f = [{(): F.one}] + [{a: F.one} for a in t]
            else:
                f = [{(): F.one}] + [om.sig_word(a) for a in t[i:]] + [{a: F.one} for a in t[:i]]
            for k, v in tensor(f).items():
                _add(out, k, e * v)
            pre += sus[i]
        return out

    def T_label(self, t):
        return tensor([self.omega.sig_word(a) for a in t])

    def D(self, N, w):
        return self.complex.d(N, w)

    def B(self, N, w):
        if (N, w) not in self._B:
            if (N + 1, w) in self.labels:
                M = self._matrix((N, w), (N + 1, w), self.B_label)
            else:
                M = SparseMatrix.zero(0, self.dim((N, w)), self.field)
            self._B[(N, w)] = M
        return self._B[(N, w)]

    def T(self, N, w):
        if (N, w) not in self._T:
            self._T[(N, w)] = self._matrix((N, w), (N, w), self.T_label)
        return self._T[(N, w)]

    def homology(self, N, w):
        return self.complex.homology(N, w)

    def check_homotopy_T(self):
        for (N, w) in self.cells():
            n = self.dim((N, w))
            if not n:
                continue
            acc = SparseMatrix.zero(n, n, self.field)
            if (N + 1, w) in self.labels:
                acc = acc + self.D(N + 1, w) @ self.B(N, w)
            if (N - 1, w) in self.labels:
                acc = acc + self.B(N - 1, w) @ self.D(N, w)
            if acc != SparseMatrix.identity(n, self.field) - self.T(N, w):
                raise IdentityViolated((N, w), "DB + BD = Id - T on CH(Omega)")
        return True


def _unit_letter():
    return (0, 0)


class TwistedTensorChains:
    """Omega_s (x) C with the twisted differential: the small model of CH(Omega; _sOmega).

    Labels (v, u): v a word of Omega, u = (d, s) a basis element of C, with
    u = (0, 0) the counit.  Cells (N, w): N = |v| + d, w = weight(v) + d.

        delta(v; u) = -(dv; u) + (-1)^{|v|} (v u'; u'')
                      - (-1)^{d''(|v| + d')} (s(u'') v; u')

    sums over Delta u = u' (x) u'' with u' resp. u'' in Cbar.
    B(v; 1) = sum_i (-1)^{e_i} (s(v_{i+1}..v_m) v_1..v_{i-1}; v_i) and B = 0
    when u is not the counit; e_i is the sign of q2 below.
    """

    def __init__(self, omega, W=None):
        self.omega = omega
        self.field = omega.field
        self.W = omega.W if W is None else W
        C = omega.coalg
        self.labels = {}
        for w in range(self.W + 1):
            for d in range(0, min(w, omega.top) + 1):
                us = [(0, 0)] if d == 0 else [(d, s) for s in range(C.dim(d))]
                for v in omega.words[w - d]:
                    for u in us:
                        self.labels.setdefault((_wdeg(v) + d, w), []).append((v, u))
        self.index = {c: {t: k for k, t in enumerate(l)} for c, l in self.labels.items()}
        diffs = {}
        for (N, w) in self.labels:
            if (N - 1, w) in self.labels:
                diffs[(N, w)] = self._matrix((N, w), (N - 1, w), self.delta_label)
        self.complex = BigradedComplex(self.labels, diffs, direction=-1, field=self.field,
                                       name="Omega (x) C")
        self._B = {}
        self._T = {}

    cells = OmegaChains.cells
    dim = OmegaChains.dim
    _matrix = OmegaChains._matrix

    def _cop(self, u):
        d, s = u
        for (i, a, b), c in self.omega.coalg.coproduct(d, s).items():
            yield (i, a), (d - i, b), c

    def delta_label(self, t):
        om = self.omega
        v, u = t
        out = {}
        for y, c in om.d_word(v).items():
            _add(out, (y, u), -c)
        d = u[0]
        if d == 0:
            return out
        dv = _wdeg(v)
        for u1, u2, c in self._cop(u):
            if u1[0]:
                _add(out, (v + (u1,), u2 if u2[0] else (0, 0)), _sgn(dv) * c)
            if u2[0]:
                e = -_sgn(u2[0] * (dv + u1[0]))
                for y, x in om.sig_word((u2,)).items():
                    _add(out, (y + v, u1 if u1[0] else (0, 0)), e * c * x)
        return out

    def B_label(self, t):
        v, u = t
        if u[0]:
            return {}
        return q2_split((), v, self.omega)

    def T_label(self, t):
        v, u = t
        out = {}
        us = {u: self.field.one} if not u[0] else self.omega.sig_letter(u)
        for y, c in self.omega.sig_word(v).items():
            for z, x in us.items():
                _add(out, (y, z), c * x)
        return out

    def delta(self, N, w):
        return self.complex.d(N, w)

    B = OmegaChains.B
    T = OmegaChains.T

    def D(self, N, w):
        return self.complex.d(N, w)

    def homology(self, N, w):
        return self.complex.homology(N, w)

    check_homotopy_T = OmegaChains.check_homotopy_T


def q2_split(a0, a1, omega):
    """sum_i (-1)^{e_i} (s(S) a0 P; v_i) for a1 = P v_i S,
    e_i = |S|(|a0| + |P| + d_i) + |P|."""
    out = {}
    for i, vi in enumerate(a1):
        P, S = a1[:i], a1[i + 1:]
        e = _sgn(_wdeg(S) * (_wdeg(a0) + _wdeg(P) + vi[0]) + _wdeg(P))
        for y, c in omega.sig_word(S).items():
            _add(out, (y + a0 + P, vi), e * c)
    return out
