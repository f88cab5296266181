"""Koszul-duality side: small complexes computing HH of a Koszul algebra A.

K^m = Hom(C_m, A)             (C = Koszul dual coalgebra, C_m in V^{(x)m})
    (delta f)(c) = (-1)^m sum_g f(c''_g) x_g - sum_g x_g f(c'_g)
    where c = sum x_g (x) c'_g = sum c''_g (x) x_g.

K_m(_sA) = A (x) C_m
    b(a (x) c) = sum_g a x_g (x) c'_g + (-1)^m sum_g s(x_g) a (x) c''_g

Both are the restrictions of the bar (co)chain complexes along the inclusion
C_m -> Abar^{(x)m}: the inner faces vanish on C since adjacent letters of any
element of C_m span relations.  Cochain cells are (m, w) with
w = deg(value) - m; chain cells are (m, w) with w = deg a + m.
"""

import os
import time

from .hochschild import _add
from .kernel import BigradedComplex, SparseMatrix


class KoszulCochains:
    """K^m_w with basis labels (a, t): the map sending c_t to the basis element a."""

    def __init__(self, alg, coalg, wmin, wmax):
        self.alg = alg
        self.coalg = coalg
        self.field = alg.field
        top = max(d for d in range(coalg.D + 1) if coalg.dim(d))
        self.top = top
        self.wmin, self.wmax = wmin, wmax
        self.labels = {}
        for w in range(wmin, wmax + 1):
            for m in range(top + 1):
                deg = w + m
                if deg < 0:
                    continue
                if deg > alg.D:
                    raise ValueError("need A expanded to degree %d" % deg)
                self.labels[(m, w)] = [((deg, i), t) for t in range(coalg.dim(m))
                                       for i in range(alg.dim(deg))]
        self.index = {c: {lab: k for k, lab in enumerate(l)} for c, l in self.labels.items()}
        diffs = {}
        for (m, w), labs in self.labels.items():
            if (m + 1, w) not in self.labels:
                continue
            diffs[(m, w)] = self._delta_matrix(m, w)
        self.complex = BigradedComplex(self.labels, diffs, direction=+1, field=self.field,
                                       name="K^*")

    def _delta_matrix(self, m, w):
        alg, C, F = self.alg, self.coalg, self.field
        tgt = self.index[(m + 1, w)]
        sign = -1 if m % 2 else 1
        # transpose of the splitting: for each target t2, which (g, t) it hits
        firsts = {}
        lasts = {}
        for t2 in range(C.dim(m + 1)):
            for (g, t), c in C.split_first(m + 1, t2).items():
                firsts.setdefault(t, []).append((g, t2, c))
            for (g, t), c in C.split_last(m + 1, t2).items():
                lasts.setdefault(t, []).append((g, t2, c))
        cols = []
        for ((deg, i), t) in self.labels[(m, w)]:
            col = {}
            for g, t2, c in firsts.get(t, ()):
                for k, v in alg.multiply_basis(1, g, deg, i).items():
                    _add(col, tgt[((deg + 1, k), t2)], -c * v)
            for g, t2, c in lasts.get(t, ()):
                for k, v in alg.multiply_basis(deg, i, 1, g).items():
                    _add(col, tgt[((deg + 1, k), t2)], sign * c * v)
            cols.append(col)
        return SparseMatrix.from_columns(len(tgt), len(self.labels[(m, w)]), cols, F)

    def homology(self, m, w):
        return self.complex.homology(m, w)

    def dims(self):
        return {c: self.homology(*c).dim for c in sorted(self.labels)}


class KoszulChains:
    """K_m(_sA)_w = A_{w-m} (x) C_m with labels ((deg, i), t)."""

    def __init__(self, alg, coalg, W, sigma=None):
        self.alg = alg
        self.coalg = coalg
        self.field = alg.field
        self.sigma = sigma
        self.W = W
        self.labels = {}
        for w in range(W + 1):
            for m in range(min(w, coalg.D) + 1):
                if not coalg.dim(m):
                    continue
                deg = w - m
                self.labels[(m, w)] = [((deg, i), t) for i in range(alg.dim(deg))
                                       for t in range(coalg.dim(m))]
        self.index = {c: {lab: k for k, lab in enumerate(l)} for c, l in self.labels.items()}
        diffs = {}
        for (m, w) in self.labels:
            if m >= 1:
                diffs[(m, w)] = self._b_matrix(m, w)
        self.complex = BigradedComplex(self.labels, diffs, direction=-1, field=self.field,
                                       name="K_*")

    def _sig1(self, g):
        if self.sigma is None:
            return {g: self.field.one}
        return self.sigma.matrix(1).column(g)

    def _b_matrix(self, m, w):
        alg, C, F = self.alg, self.coalg, self.field
        tgt = self.index[(m - 1, w)]
        sign = -1 if m % 2 else 1
        cols = []
        for ((deg, i), t) in self.labels[(m, w)]:
            col = {}
            for (g, t2), c in C.split_first(m, t).items():
                for k, v in alg.multiply_basis(deg, i, 1, g).items():
                    _add(col, tgt[((deg + 1, k), t2)], c * v)
            for (g, t2), c in C.split_last(m, t).items():
                for h, s in self._sig1(g).items():
                    for k, v in alg.multiply_basis(1, h, deg, i).items():
                        _add(col, tgt[((deg + 1, k), t2)], sign * c * s * v)
            cols.append(col)
        return SparseMatrix.from_columns(len(tgt), len(self.labels[(m, w)]), cols, F)

    def homology(self, m, w):
        return self.complex.homology(m, w)

    def dims(self):
        return {c: self.homology(*c).dim for c in sorted(self.labels)}


def koszul_cochain(alg, coalg, wmin, wmax):
    return KoszulCochains(alg, coalg, wmin, wmax)


def koszul_twisted(alg, coalg, W, sigma=None):
    return KoszulChains(alg, coalg, W, sigma)


class NotQuasiIso(ArithmeticError):
    def __init__(self, cell, what="map"):
        self.cell = cell
        super().__init__("%s is not a quasi-isomorphism at %r" % (what, cell))


class ChainMapViolated(ArithmeticError):
    def __init__(self, cell, what="map"):
        self.cell = cell
        super().__init__("%s does not commute with differentials at %r" % (what, cell))


class CellMap:
    """Matrices between two cell-indexed complexes, with a cell translation."""

    def __init__(self, src, dst, matrices, shift, name):
        self.src = src            # object with .complex and .labels
        self.dst = dst
        self.matrices = matrices  # src cell -> matrix
        self.shift = shift        # src cell -> dst cell
        self.name = name

    def __getitem__(self, cell):
        return self.matrices[cell]

    def cells(self):
        return sorted(self.matrices)

    def check_chain_map(self, cells=None):
        S, D = self.src.complex, self.dst.complex
        for cell in cells or self.cells():
            h, w = cell
            nxt = (h + S.direction, w)
            if nxt not in self.matrices:
                continue
            dcell = self.shift(cell)
            lhs = D.d(*dcell) @ self.matrices[cell]
            rhs = self.matrices[nxt] @ S.d(*cell)
            if lhs.rows != rhs.rows:
                continue
            if lhs != rhs:
                raise ChainMapViolated(cell, self.name)
        return True

    def on_homology(self, cell):
        from .kernel import induced_matrix
        Hs = self.src.complex.homology(*cell)
        Hd = self.dst.complex.homology(*self.shift(cell))
        return induced_matrix(self.matrices[cell], Hs, Hd)

    def check_quasi_iso(self, cells=None):
        from .kernel import rank
        for cell in cells or self.cells():
            M = self.on_homology(cell)
            if M.rows != M.cols or (M.rows and rank(M) != M.rows):
                raise NotQuasiIso(cell, self.name)
        return True


def inclusion_q(K, bar):
    """A (x) C_m -> A (x) Abar^{(x)m}: c in C_m read as a sum of words in V."""
    mats = {}
    for cell, labs in K.labels.items():
        if cell not in bar.labels:
            continue
        m, w = cell
        idx = bar.index[cell]
        cols = []
        for (a, t) in labs:
            col = {}
            for word, c in K.coalg.bases[m][t].items():
                _add(col, idx[(a,) + tuple((1, g) for g in word)], c)
            cols.append(col)
        mats[cell] = SparseMatrix.from_columns(len(idx), len(labs), cols, K.field)
    return CellMap(K, bar, mats, lambda c: c, "q")


def pd_sign(m):
    """Sign profile of the cap map in cohomological degree m."""
    return -1 if (m * (m - 1) // 2) % 2 else 1


def pd_map(Kco, Kch, scale=1):
    """Cap with the volume chain  scale * 1 (x) c_top:  f |-> sum f(c') (x) c''.

    Cochain cell (m, w) goes to chain cell (n - m, w + n), with the fixed
    sign (-1)^{m(m-1)/2}; the chain-map identity is asserted.
    """
    C, F = Kco.coalg, Kco.field
    n = Kco.top
    co = C.coproduct(n, 0)
    scale = F(scale)
    mats = {}
    for (m, w), labs in Kco.labels.items():
        dst = (n - m, w + n)
        if dst not in Kch.labels:
            continue
        idx = Kch.index[dst]
        e = scale * pd_sign(m)
        cols = []
        for (a, t) in labs:
            col = {}
            for s in range(C.dim(n - m)):
                c = co.get((m, t, s))
                if c:
                    _add(col, idx[(a, s)], e * c)
            cols.append(col)
        mats[(m, w)] = SparseMatrix.from_columns(len(idx), len(labs), cols, F)
    cm = CellMap(Kco, Kch, mats, lambda c: (n - c[0], c[1] + n), "pd")
    cm.profile = {m: pd_sign(m) for m in range(n + 1)}
    cm.check_chain_map()
    return cm


class ClassNotInImage(ArithmeticError):
    pass


def _solve_classes(M, c, what):
    from .kernel import solve
    x = solve(M, c)
    if x is None:
        raise ClassNotInImage("%s: class outside the image" % what)
    return x


ORIENTATION = -1


def delta_A(Kco, Kch, bar, phi, q, blocks=None, orientation=ORIENTATION):
    """Delta = orientation * phi^{-1} B phi on H(K^*), with B the twisted
    Connes operator applied to the lambda = 1 part of q(phi(u)).

    Once phi and q are honest chain maps the only freedom left is the sign
    of Delta.  The default -1 is the one for which Delta satisfies the BV
    identity with the bracket transported from the A^! bar model (so that
    x d/dx goes to -1 for k[x,y]).

    Returns {(m, w): matrix H^m_w -> H^{m-1}_w} for all cochain cells with
    m >= 1 inside the windows.
    """
    n = Kco.top
    F = Kco.field
    if blocks is None and bar.sigma is not None:
        blocks = bar.eigen_blocks()
    out = {}
    for (m, w) in sorted(Kco.labels):
        if m < 1 or (m - 1, w) not in Kco.labels:
            continue
        p, W = n - m, w + n
        if (p + 1, W) not in bar.labels or (p, W) not in bar.labels:
            continue
        H = Kco.complex.homology(m, w)
        Ht = Kco.complex.homology(m - 1, w)
        Hbar = bar.complex.homology(p + 1, W)
        Q = q.on_homology((p + 1, W))
        Phi = phi.on_homology((m - 1, w))
        P1 = blocks.projection((p, W), F.one) if blocks is not None else None
        cols = []
        for z in H.reps:
            y = q[(p, W)].apply(phi[(m, w)].apply(z))
            if P1 is not None:
                y = P1.apply(y)
            By = bar.B(p, W).apply(y)
            c = Hbar.class_of(By)
            x = _solve_classes(Q, c, "q at %r" % ((p + 1, W),))
            u = _solve_classes(Phi, x, "pd at %r" % ((m - 1, w),))
            cols.append({k: orientation * v for k, v in u.items()})
        out[(m, w)] = SparseMatrix.from_columns(Ht.dim, H.dim, cols, F)
    return out


def convolution_cup(Kco, cell1, u, cell2, v):
    """(u * v)(c) = sum u(c') v(c'') over the deconcatenation of c.

    u, v are coordinate dicts over the labels of K^* at the given cells.
    """
    alg, C = Kco.alg, Kco.coalg
    (m1, w1), (m2, w2) = cell1, cell2
    cell = (m1 + m2, w1 + w2)
    if cell not in Kco.labels:
        raise ValueError("product cell %r outside the window" % (cell,))
    idx = Kco.index[cell]
    L1, L2 = Kco.labels[cell1], Kco.labels[cell2]
    out = {}
    m = m1 + m2
    for t in range(C.dim(m)):
        for (i, t1, t2), c in C.coproduct(m, t).items():
            if i != m1:
                continue
            for k1, a1 in u.items():
                (d1, j1), s1 = L1[k1]
                if s1 != t1:
                    continue
                for k2, a2 in v.items():
                    (d2, j2), s2 = L2[k2]
                    if s2 != t2:
                        continue
                    for k, val in alg.multiply_basis(d1, j1, d2, j2).items():
                        _add(out, idx[((d1 + d2, k), t)], c * a1 * a2 * val)
    return out


def cup_constants(Kco, cells=None):
    """Structure constants of the induced product on H(K^*):

    {(cell1, i, cell2, j): class coordinates in H at cell1 + cell2}."""
    cells = cells or sorted(Kco.labels)
    out = {}
    for c1 in cells:
        H1 = Kco.complex.homology(*c1)
        for c2 in cells:
            tgt = (c1[0] + c2[0], c1[1] + c2[1])
            if tgt not in Kco.labels:
                continue
            H2 = Kco.complex.homology(*c2)
            Ht = Kco.complex.homology(*tgt)
            for i, z1 in enumerate(H1.reps):
                for j, z2 in enumerate(H2.reps):
                    out[(c1, i, c2, j)] = Ht.class_of(convolution_cup(Kco, c1, z1, c2, z2))
    return out


def restriction_to_koszul(G, Kco, sign=None):
    """Bar cochains of A^! at (m, q) -> K^m at weight w = -q.

    F restricted to inputs in V* (degree-1 letters) gives an element of
    V^{(x)p} (x) A^!_m; project the first leg to A_p and read the second as a
    functional on C_m through the pairing.  No sign is needed: the map is a
    chain map and sends the cup product to the convolution product on the
    nose.  ``sign(p, m)`` imposes a per-cell sign profile.
    """
    alg, C = Kco.alg, Kco.coalg
    F = Kco.field
    pair = {}
    mats = {}
    for (m, q), labs in G.labels.items():
        w = -q
        if (m, w) not in Kco.labels or m < 0:
            continue
        p = m - q
        if m not in pair:
            pair[m] = C.pairing_matrix(G.alg, m)
        Pm = pair[m]
        e = sign(p, m) if sign else 1
        idx = Kco.index[(m, w)]
        cols = []
        for (t, o) in labs:
            col = {}
            if all(d == 1 for d, _ in t) and o[0] == m:
                word = tuple(g for _, g in t)
                for k, v in alg.normal_form(word).items():
                    for s, c in Pm.row(o[1]).items():
                        _add(col, idx[((p, k), s)], e * v * c)
            cols.append(col)
        mats[(m, q)] = SparseMatrix.from_columns(len(idx), len(labs), cols, F)
    return CellMap(G, Kco, mats, lambda c: (c[0], -c[1]), "restriction")


def lzz_pd(frob, G, CC, sign=None):
    """Hom(B(A^!), A^!) -> coalgebra chains of A^! with sigma* coefficients.

    F at cochain cell (m, q) goes to the functional
        (a_0 | a_1 .. a_p) |-> e * lambda(a_0 F(a_1..a_p))
    on chains of length p = m - q and degree d = n - q, written in the
    coalgebra basis through the inverse pairing on each tensor factor.
    The sign e is (-1)^{(m-1)(|a_0|-1) + |a_0|} times the cell profile
    ``sign(m, q)``, by default (-1)^{m(m-1)/2}, which makes the map commute
    with delta and delta* exactly.
    """
    from .kernel import inverse
    n = frob.top
    Fld = frob.field
    dual = frob.dual
    Ginv = {}
    for d in range(n + 1):
        Ginv[d] = inverse(CC.coalg.pairing_matrix(dual, d))
    mats = {}
    for (m, q), labs in G.labels.items():
        p, d = m - q, n - q
        if (p, d) not in CC.labels:
            continue
        idx = CC.index[(p, d)]
        prof = sign(m, q) if sign else lzz_sign(m)
        cols = []
        for (t, (do, ko)) in labs:
            col = {}
            d0 = n - do
            P = frob.pairings[d0]
            for r in range(dual.dim(d0)):
                val = P[r, ko]
                if not val:
                    continue
                e = prof * (-1 if ((m - 1) * (d0 - 1) + d0) % 2 else 1)
                factors = [{(a[0], c): v for c, v in Ginv[a[0]].column(a[1]).items()}
                           for a in t + ((d0, r),)]
                for lab, v in _tensor_dicts(factors).items():
                    _add(col, idx[lab], e * val * v)
            cols.append(col)
        mats[(m, q)] = SparseMatrix.from_columns(len(idx), len(labs), cols, Fld)
    cm = CellMap(G, CC, mats, lambda c: (c[0] - c[1], n - c[1]), "lzz_pd")
    cm.profile = "(-1)^{m(m-1)/2}" if sign is None else "custom"
    return cm


def lzz_sign(m):
    return -1 if (m * (m - 1) // 2) % 2 else 1


def _tensor_dicts(factors):
    acc = {(): 1}
    for f in factors:
        nxt = {}
        for t, c in acc.items():
            for e, v in f.items():
                _add(nxt, t + (e,), c * v)
        acc = nxt
    return acc


def delta_dual(G, CC, pd, blocks=None, cells=None):
    """Delta = PD^{-1} B* PD on HH(A^!), with B* applied to the lambda = 1
    part of PD(u).  Returns {(m, q): matrix H^m_q -> H^{m-1}_q}."""
    F = G.field
    out = {}
    for (m, q) in sorted(cells or G.labels):
        if (m - 1, q) not in G.labels and G.in_window((m - 1, q)) and (m, q) in pd.matrices:
            out[(m, q)] = SparseMatrix.zero(0, G.complex.homology(m, q).dim, F)
            continue
        if (m - 1, q) not in G.labels or (m, q) not in pd.matrices:
            continue
        if (m - 1, q) not in pd.matrices:
            continue
        p, d = pd.shift((m, q))
        H = G.complex.homology(m, q)
        Ht = G.complex.homology(m - 1, q)
        Hc = CC.complex.homology(p - 1, d)
        Phi = pd.on_homology((m - 1, q))
        P1 = blocks.projection((p, d), F.one) if blocks is not None else None
        cols = []
        for z in H.reps:
            y = pd[(m, q)].apply(z)
            if P1 is not None:
                y = P1.apply(y)
            By = CC.B(p, d).apply(y)
            c = Hc.class_of(By)
            cols.append(_solve_classes(Phi, c, "lzz_pd at %r" % ((m - 1, q),)))
        out[(m, q)] = SparseMatrix.from_columns(Ht.dim, H.dim, cols, F)
    return out


# ------------------------------------------------------- comparison maps

class HomotopyViolated(ArithmeticError):
    def __init__(self, cell):
        self.cell = cell
        super().__init__("h D + D h = id - p2 q2 fails at cell %r" % (cell,))


class ComparisonMaps:
    """p1 : CH(Omega; _sOmega) -> CH(A; _sA), p2 : Omega_s (x) C -> CH(Omega),
    q2 : CH(Omega) -> Omega_s (x) C and the homotopy h on CH(Omega).

    p1 applies q to every slot.  p2 keeps the word and expands the
    coefficient into all its reduced iterated coproducts, one letter per bar
    slot, with no signs.  q2 is the identity on (a_0), sends (a_0 | P v_i S)
    to sum_i (-1)^{e_i} (s(S) a_0 P; v_i) and kills length >= 2.

    h splits the last letter v off the last slot, t = (x_0..x_{n-1}, a v):

        h(t) = g (x_0..x_{n-1}, a, v)
               - g w h(s(v) x_0, x_1..x_{n-1}, a)
               + g (-1)^{pre + |a| + 1} h(x_0..x_{n-1}, a, dv)

    with pre the suspended degree of x_0..x_{n-1}, g = (-1)^{pre + |a|},
    w = (-1)^{d_v (pre + |a| + 1) + |v|}, and h = 0 when the last slot is a
    single letter or the chain has no slots.
    """

    def __init__(self, omega_chains, small, bar=None):
        self.big = omega_chains
        self.small = small
        self.bar = bar
        self.omega = omega_chains.omega
        self.field = omega_chains.field
        self._h = {}

    # -- on labels
    def _iter_cop(self, x, k):
        if k == 0:
            return {(x,): self.field.one}
        d, s = x
        out = {}
        for (i, a, b), c in self.omega.coalg.coproduct(d, s).items():
            if i == 0 or i == d:
                continue
            for t, v in self._iter_cop((d - i, b), k - 1).items():
                _add(out, ((i, a),) + t, c * v)
        return out

    def p2_label(self, t):
        v, u = t
        if not u[0]:
            return {(v,): self.field.one}
        out = {}
        for k in range(u[0]):
            for letters, c in self._iter_cop(u, k).items():
                _add(out, (v,) + tuple((y,) for y in letters), c)
        return out

    def q2_label(self, t):
        from .cobar import q2_split
        if len(t) == 1:
            return {(t[0], (0, 0)): self.field.one}
        if len(t) > 2:
            return {}
        return q2_split(t[0], t[1], self.omega)

    def p1_label(self, t):
        alg = self.bar.alg
        factors = []
        for a in t:
            if any(d != 1 for d, _ in a):
                return {}
            factors.append({(len(a), k): c for k, c in self.omega.q_word(alg, a).items()})
        return _tensor_dicts(factors)

    def h_label(self, t):
        from .cobar import _wdeg
        r = self._h.get(t)
        if r is not None:
            return r
        out = {}
        n = len(t) - 1
        if n >= 1 and len(t[n]) >= 2:
            om = self.omega
            a, v = t[n][:-1], t[n][-1:]
            pre = sum(_wdeg(x) + 1 for x in t[:n])
            g = -1 if (pre + _wdeg(a)) % 2 else 1
            _add(out, t[:n] + (a, v), g * self.field.one)
            w = -1 if (v[0][0] * (pre + _wdeg(a) + 1) + _wdeg(v)) % 2 else 1
            for y, c in om.sig_word(v).items():
                for k, x in self.h_label((y + t[0],) + t[1:n] + (a,)).items():
                    _add(out, k, -g * w * c * x)
            e = g * (-1 if (pre + _wdeg(a) + 1) % 2 else 1)
            for y, c in om.d_word(v).items():
                for k, x in self.h_label(t[:n] + (a, y)).items():
                    _add(out, k, e * c * x)
        self._h[t] = out
        return out

    # -- as cell maps
    def _map(self, src, dst, fn, shift, name):
        mats = {}
        for cell in src.labels:
            tgt = shift(cell)
            mats[cell] = OmegaMatrix(src, dst, cell, tgt, fn)
        return CellMap(src, dst, mats, shift, name)

    def p1(self):
        if self.bar is None:
            raise ValueError("p1 needs the bar chains of A")
        return self._map(self.big, self.bar, self.p1_label, lambda c: c, "p1")

    def p2(self):
        return self._map(self.small, self.big, self.p2_label, lambda c: c, "p2")

    def q2(self):
        return self._map(self.big, self.small, self.q2_label, lambda c: c, "q2")

    def h(self):
        return self._map(self.big, self.big, self.h_label, lambda c: (c[0] + 1, c[1]), "h")

    # -- identities
    def check_q2p2(self):
        p2, q2 = self.p2(), self.q2()
        for cell in self.small.cells():
            n = self.small.dim(cell)
            if n and q2[cell] @ p2[cell] != SparseMatrix.identity(n, self.field):
                raise ChainMapViolated(cell, "q2 p2 = id")
        return True

    def check_B(self, blocks=None):
        """q2 B = B q2, on the lambda = 1 part when blocks are given."""
        q2 = self.q2()
        F = self.field
        for (N, w) in self.big.cells():
            if (N + 1, w) not in self.big.labels or not self.big.dim((N, w)):
                continue
            lhs = q2[(N + 1, w)] @ self.big.B(N, w)
            rhs = self.small.B(N, w) @ q2[(N, w)]
            if blocks is not None:
                P = blocks.projection((N, w), F.one)
                lhs, rhs = lhs @ P, rhs @ P
            if lhs != rhs:
                raise ChainMapViolated((N, w), "q2 B = B q2")
        return True

    def check_homotopy(self, cells=None):
        h, p2, q2 = self.h(), self.p2(), self.q2()
        big = self.big
        for (N, w) in cells or big.cells():
            n = big.dim((N, w))
            if not n:
                continue
            acc = SparseMatrix.identity(n, self.field)
            if self.small.dim((N, w)):
                acc = acc - p2[(N, w)] @ q2[(N, w)]
            if (N - 1, w) in big.labels:
                acc = acc - h[(N - 1, w)] @ big.D(N, w)
            if (N + 1, w) in big.labels:
                acc = acc - big.D(N + 1, w) @ h[(N, w)]
            if not acc.is_zero():
                raise HomotopyViolated((N, w))
        return True


def OmegaMatrix(src, dst, cell, tgt, fn):
    idx = dst.index.get(tgt, {})
    cols = []
    for lab in src.labels[cell]:
        col = {}
        for k, v in fn(lab).items():
            _add(col, idx[k], v)
        cols.append(col)
    return SparseMatrix.from_columns(len(idx), len(src.labels[cell]), cols, src.field)


def comparison_maps(coalg, W, sigma=None, alg=None):
    """Build Omega(C), CH(Omega; _sOmega), Omega_s (x) C (and the bar chains
    of A when ``alg`` is given) through weight W, with the maps between them."""
    from .cobar import OmegaChains, TwistedTensorChains, cobar
    from .hochschild import bar_chains
    om = cobar(coalg, W, sigma=sigma)
    bar = bar_chains(alg, W, sigma) if alg is not None else None
    return ComparisonMaps(OmegaChains(om, W), TwistedTensorChains(om, W), bar)


# ------------------------------------------------- BV structure on H(K^*)

class KoszulModelOps:
    """Cup (convolution) and bracket on H(K^*), the bracket transported from
    the A^! bar model through the restriction R."""

    def __init__(self, Kco, G, R):
        from .calculus import HomologyOps
        self.K = Kco
        self.G = G
        self.R = R
        self.hops = HomologyOps(G)
        self.field = Kco.field
        self._Rinv = {}

    def H(self, cell):
        return self.K.complex.homology(*cell)

    def cells(self):
        return [c for c in sorted(self.K.labels) if self.H(c).dim]

    def dims(self, cells=None):
        return {c: self.H(c).dim for c in (cells or self.cells())}

    def _zero_cell(self, cell):
        m, w = cell
        return m < 0 or m > self.K.top or w + m < 0

    def _rep(self, cell, x):
        out = {}
        H = self.H(cell)
        for i, a in x.items():
            for k, v in H.reps[i].items():
                _add(out, k, a * v)
        return out

    def cup(self, c1, x, c2, y):
        tgt = (c1[0] + c2[0], c1[1] + c2[1])
        if tgt not in self.K.labels:
            return (tgt, {}) if self._zero_cell(tgt) else None
        if not x or not y:
            return tgt, {}
        z = convolution_cup(self.K, c1, self._rep(c1, x), c2, self._rep(c2, y))
        return tgt, self.H(tgt).class_of(z)

    def to_dual(self, cell, x):
        from .kernel import inverse
        g = (cell[0], -cell[1])
        if g not in self._Rinv:
            self._Rinv[g] = inverse(self.R.on_homology(g))
        return g, self._Rinv[g].apply(x) if x else {}

    def from_dual(self, gcell, x):
        return (gcell[0], -gcell[1]), self.R.on_homology(gcell).apply(x) if x else {}

    def bracket(self, c1, x, c2, y):
        tgt = (c1[0] + c2[0] - 1, c1[1] + c2[1])
        if tgt not in self.K.labels:
            return (tgt, {}) if self._zero_cell(tgt) else None
        if (c1[0], -c1[1]) not in self.R.matrices or (c2[0], -c2[1]) not in self.R.matrices:
            return None
        g1, u = self.to_dual(c1, x)
        g2, v = self.to_dual(c2, y)
        r = self.hops.bracket_vec(g1, u, g2, v)
        if r is None:
            return None
        gt, z = r
        if not z:
            return tgt, {}
        if gt not in self.R.matrices:
            return None
        return self.from_dual(gt, z)


# ---------------------------------------------------------- main theorem

def matrix_literals(M):
    """Row-major matrix of rational (or mod p) literals."""
    return [[M.field.format(v) for v in row] for row in M.to_dense()]


class TheoremSetup:
    """All the complexes and maps for one quadratic algebra and bounds.

    W is the weight bound on HH(A), P the cochain truncation (classes of
    Hochschild degree p <= P - 2 are sampled for pairwise checks), mmax the
    cohomological degree bound of the comparison."""

    FAULTS = ("twisted-B-sign",)

    def __init__(self, pres, W=3, P=5, mmax=2, scale=1, fault=None):
        from .algebra import expand, koszul_dual_coalgebra, quadratic_dual
        from .frobenius import detect_frobenius, nakayama_of_A, sigma_star
        from .hochschild import (OperatorBlocks, bar_chains, coalgebra_chains,
                                 graded_cochains)
        from .kernel import eigenspace_decomposition
        if W < 2 or P < 3:
            raise ValueError("need W >= 2 and P >= 3")
        if fault is not None and fault not in self.FAULTS:
            raise ValueError("unknown fault %r" % (fault,))
        self.fault = fault
        self.pres, self.W, self.P, self.mmax = pres, W, P, mmax
        dual = quadratic_dual(pres)
        n_guess = pres.n
        self.Ad = expand(dual, n_guess + 1)
        self.frob = detect_frobenius(self.Ad)
        n = self.frob.top
        self.n = n
        self.A = expand(pres, W + n + 1)
        self.C = koszul_dual_coalgebra(pres, n + 1)
        self.field = self.A.field
        self.sA = nakayama_of_A(self.frob, self.A, self.C)
        self.ss = sigma_star(self.frob, self.A, self.C)
        twist = None if self.sA.is_identity() else self.sA
        self.Kco = koszul_cochain(self.A, self.C, -n, W)
        self.Kch = koszul_twisted(self.A, self.C, W + n, twist)
        self.bar = bar_chains(self.A, W + n, twist)
        if fault == "twisted-B-sign":
            self.bar = _OddBSignFault(self.bar)
        self.phi = pd_map(self.Kco, self.Kch, scale=scale)
        self.q = inclusion_q(self.Kch, self.bar)
        self.G = graded_cochains(self.Ad, -W, n)
        self.CC = coalgebra_chains(self.C, W + n, None if self.ss.is_identity() else self.ss)
        self.L = lzz_pd(self.frob, self.G, self.CC)
        self.R = restriction_to_koszul(self.G, self.Kco)
        from .kernel import SparseMatrix
        V = SparseMatrix.from_dense(self.ss.V, self.field)
        self.eigenvalues = [lam for lam, _ in eigenspace_decomposition(V)]
        self.blocks = OperatorBlocks(self.CC, self.eigenvalues)
        self._DA = self._DD = None

    def cells(self):
        """Comparison cells (m, w) of H(K^*): 0 <= m <= mmax, 0 <= w <= W
        together with the negative weights -n <= w < 0."""
        return [c for c in sorted(self.Kco.labels) if 0 <= c[0] <= self.mmax]

    @property
    def delta_A(self):
        if self._DA is None:
            self._DA = delta_A(self.Kco, self.Kch, self.bar, self.phi, self.q)
        return self._DA

    @property
    def delta_dual(self):
        if self._DD is None:
            self._DD = delta_dual(self.G, self.CC, self.L, self.blocks)
        return self._DD


class _OddBSignFault:
    """Test fixture: bar chains whose Connes operator has the wrong sign in
    odd Hochschild degree."""

    def __init__(self, bar):
        self._bar = bar

    def __getattr__(self, name):
        return getattr(self._bar, name)

    def B(self, p, w):
        M = self._bar.B(p, w)
        return -M if p % 2 else M


def default_workers():
    try:
        return max(1, int(os.environ.get("KOSZUL_BV_WORKERS", "1")))
    except ValueError:
        return 1


def verify_main_theorem(setup, workers=None):
    """Run the comparison and return a JSON-ready report.

    Stages are independent once the two Delta's are built, and run on a
    thread pool of ``workers`` (default from KOSZUL_BV_WORKERS).  The
    "timing" entry is the only non-deterministic part of the report."""
    S = setup
    F = S.field
    stages = {}
    timing = {}
    jobs = []

    def stage(name, fn):
        jobs.append((name, fn))

    def run_stage(name, fn):
        t0 = time.perf_counter()
        try:
            ok, info = fn()
        except (ArithmeticError, AssertionError, KeyError, ValueError) as exc:
            ok, info = False, {"error": "%s: %s" % (type(exc).__name__, exc)}
        res = {"passed": bool(ok)}
        res.update(info or {})
        return name, res, time.perf_counter() - t0

    t0 = time.perf_counter()
    for name, build in (("delta_A", lambda: S.delta_A), ("delta_dual", lambda: S.delta_dual)):
        t1 = time.perf_counter()
        try:
            build()
        except ArithmeticError as exc:
            stages["build " + name] = {"passed": False, "error": "%s: %s" % (type(exc).__name__, exc)}
        timing["build " + name] = time.perf_counter() - t1
    if stages:
        return _report(S, stages, {}, timing, t0)

    Kcells = S.cells()
    Gcells = [(m, -w) for (m, w) in Kcells]

    def chain_maps():
        S.phi.check_chain_map()
        S.q.check_chain_map()
        S.L.check_chain_map()
        S.R.check_chain_map(Gcells)
        S.R.check_quasi_iso(Gcells)
        S.phi.check_quasi_iso([c for c in Kcells if c in S.phi.matrices])
        return True, {"pd_profile": {str(k): v for k, v in sorted(S.phi.profile.items())},
                      "lzz_profile": S.L.profile}

    stage("comparison maps", chain_maps)

    ops = KoszulModelOps(S.Kco, S.G, S.R)

    def cup_constants_agree():
        from .calculus import HomologyOps
        ho = HomologyOps(S.G)
        checked = 0
        for c1 in Kcells:
            for c2 in Kcells:
                tgt = (c1[0] + c2[0], c1[1] + c2[1])
                if tgt not in S.Kco.labels or (tgt[0], -tgt[1]) not in S.R.matrices:
                    continue
                for i in range(ops.H(c1).dim):
                    for j in range(ops.H(c2).dim):
                        g1, u = ops.to_dual(c1, {i: F.one})
                        g2, v = ops.to_dual(c2, {j: F.one})
                        r = ho.cup_vec(g1, u, g2, v)
                        lhs = ops.from_dual(r[0], r[1])[1] if r and r[1] else {}
                        rhs = ops.cup(c1, {i: F.one}, c2, {j: F.one})[1]
                        checked += 1
                        if lhs != rhs:
                            return False, {"witness": {"operator": "cup", "cells": [list(c1), list(c2)],
                                                       "classes": [i, j]}}
        return True, {"checked": checked}

    stage("cup constants", cup_constants_agree)

    def deltas_agree():
        DA, DD = S.delta_A, S.delta_dual
        mats = {}
        for (m, w) in Kcells:
            if m < 1 or (m, w) not in DA:
                continue
            q = -w
            if (m, q) not in DD:
                return False, {"witness": [m, w], "error": "Delta_dual missing"}
            M = DD[(m, q)]
            lhs = S.R.on_homology((m - 1, q)) @ M if M.rows else M
            rhs = DA[(m, w)] @ S.R.on_homology((m, q))
            if lhs.rows != rhs.rows or lhs != rhs:
                return False, {"witness": {"operator": "delta", "m": m, "w": w},
                               "delta_A": matrix_literals(DA[(m, w)]), "delta_dual": matrix_literals(M),
                               "R": matrix_literals(S.R.on_homology((m, q)))}
            mats["%d,%d" % (m, w)] = {"delta_A": matrix_literals(DA[(m, w)]), "delta_dual": matrix_literals(M),
                                      "R": matrix_literals(S.R.on_homology((m, q)))}
        return True, {"matrices": mats}

    stage("delta agreement", deltas_agree)

    def bv_A():
        from .calculus import check_bv
        cells = [c for c in ops.cells() if c in Kcells]
        rep = check_bv(cells, ops.dims(cells), ops.cup, ops.bracket,
                       {c: M for c, M in S.delta_A.items()}, name="bv A")
        d = rep.as_dict()
        return rep.passed, {"axioms": d["axioms"], "skipped": d["skipped"]}

    stage("bv A", bv_A)

    def bv_dual():
        from .calculus import check_bv, homology_bv_ops
        cells = [c for c in S.G.labels if c[0] - c[1] <= S.P - 2 and c[0] >= 0
                 and S.G.complex.homology(*c).dim]
        cells, dims, cu, br = homology_bv_ops(S.G, cells)
        rep = check_bv(cells, dims, cu, br, S.delta_dual, name="bv dual")
        d = rep.as_dict()
        return rep.passed, {"axioms": d["axioms"], "skipped": d["skipped"]}

    stage("bv dual", bv_dual)

    workers = workers or default_workers()
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda j: run_stage(*j), jobs))
    else:
        results = [run_stage(*j) for j in jobs]
    for name, res, dt in results:
        stages[name] = res
        timing[name] = dt
    dims = {"HH(A) via K^*": {"%d,%d" % c: ops.H(c).dim for c in Kcells},
            "HH(A^!) bar model": {"%d,%d" % (m, q): S.G.complex.homology(m, q).dim
                                  for (m, q) in Gcells if (m, q) in S.G.labels}}
    return _report(S, stages, dims, timing, t0)


def _report(S, stages, dims, timing, t0):
    failed = [k for k, v in stages.items() if not v["passed"]]
    timing["total"] = time.perf_counter() - t0
    return {
        "field": S.field.descriptor(),
        "bounds": {"weight_max": S.W, "P": S.P, "m_max": S.mmax},
        "twist_eigenvalues": [S.field.format(x) for x in S.eigenvalues],
        "fault": S.fault,
        "stages": stages,
        "dimensions": dims,
        "verdict": "fail" if failed else "pass",
        "failed": failed,
        "timing": {k: round(v, 3) for k, v in timing.items()},
    }
