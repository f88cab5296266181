"""Cup, brace and bracket on the graded cochains of A^!, the cap and Lie
derivative on its chains, and the calculus and BV identity checks.

Cochains are coordinate vectors over the labels of a GradedCochains cell.
Internally a cochain is turned into a table {inputs: {output: coeff}} of
suspended values; every operation is a Koszul-signed composition in sA:

    (F{G})(y)  = sum_i (-1)^{|G|(|y_1|+..+|y_i|)} F(y_1..y_i, G(..), ..)
    F cup G    = (-1)^{m_F} m~ o (F (x) G)
               = (-1)^{m_F + |G|(|y_1|+..+|y_p|)} m~(F(y'), G(y''))
    [F, G]     = F{G} - (-1)^{|F||G|} G{F}

with |F| = m - 1 the suspended degree.  The factor (-1)^{m_F} makes 1 a
two-sided unit and the product graded commutative in m.  Homology-level operations use
HomologyBasis.class_of on products of representatives.
"""

from .hochschild import _add, _sgn
from .kernel import SparseMatrix


def table(G, cell, F):
    out = {}
    L = G.labels[cell]
    for k, c in F.items():
        t, o = L[k]
        out.setdefault(t, {})
        _add(out[t], o, c)
    return {t: v for t, v in out.items() if v}


def from_table(G, cell, tab):
    idx = G.index[cell]
    out = {}
    for t, vals in tab.items():
        for o, c in vals.items():
            k = idx.get((t, o))
            if k is None:
                raise ValueError("value %r on %r is outside cell %r" % (o, t, cell))
            _add(out, k, c)
    return out


def _sus(t):
    return sum(d - 1 for d, _ in t)


def cup(G, c1, F, c2, H):
    """F cup H at cell c1 + c2."""
    (m1, q1), (m2, q2) = c1, c2
    cell = (m1 + m2, q1 + q2)
    if cell not in G.labels:
        raise ValueError("cup lands outside the window at %r" % (cell,))
    ops = G.ops
    H_deg = m2 - 1
    tF, tH = table(G, c1, F), table(G, c2, H)
    out = {}
    for t1, v1 in tF.items():
        e = _sgn(H_deg * _sus(t1) + m1)
        for t2, v2 in tH.items():
            acc = out.setdefault(t1 + t2, {})
            for o1, a in v1.items():
                for o2, b in v2.items():
                    for o, c in ops.mt(o1, o2).items():
                        _add(acc, o, e * a * b * c)
    return from_table(G, cell, {t: v for t, v in out.items() if v})


def brace(G, c1, F, c2, H):
    """F{H}: insert H into every slot of F."""
    (m1, q1), (m2, q2) = c1, c2
    cell = (m1 + m2 - 1, q1 + q2)
    if cell not in G.labels:
        raise ValueError("brace lands outside the window at %r" % (cell,))
    H_deg = m2 - 1
    tF, tH = table(G, c1, F), table(G, c2, H)
    out = {}
    for t1, v1 in tF.items():
        pre = 0
        for i, slot in enumerate(t1):
            e = _sgn(H_deg * pre)
            for t2, v2 in tH.items():
                c = v2.get(slot)
                if not c:
                    continue
                t = t1[:i] + t2 + t1[i + 1:]
                acc = out.setdefault(t, {})
                for o, a in v1.items():
                    _add(acc, o, e * a * c)
            pre += slot[0] - 1
    return from_table(G, cell, {t: v for t, v in out.items() if v})


def bracket(G, c1, F, c2, H):
    d1, d2 = c1[0] - 1, c2[0] - 1
    left = brace(G, c1, F, c2, H)
    right = brace(G, c2, H, c1, F)
    e = -_sgn(d1 * d2)
    for k, v in right.items():
        _add(left, k, e * v)
    return left


def mtilde(G):
    """m~ as a cochain: two inputs, weight 0, so cell (2, 0)."""
    cell = (2, 0)
    tab = {}
    for (t, o) in G.labels[cell]:
        if t not in tab:
            tab[t] = dict(G.ops.mt(t[0], t[1]))
    return cell, from_table(G, cell, {t: v for t, v in tab.items() if v})


def unit(G):
    """The unit cochain 1 in A^! at cell (0, 0)."""
    return G.index[(0, 0)][((), (0, 0))]


# ------------------------------------------------------------ homology ops

class HomologyOps:
    """Class-level products on HH(A^!) from a GradedCochains window."""

    def __init__(self, G):
        self.G = G
        self.F = G.field

    def H(self, cell):
        return self.G.complex.homology(*cell)

    def cells(self):
        return [c for c in sorted(self.G.labels) if self.H(c).dim]

    def _binary(self, op, c1, i, c2, j, shift):
        tgt = (c1[0] + c2[0] + shift, c1[1] + c2[1])
        if tgt not in self.G.labels:
            return (tgt, {}) if self.G.in_window(tgt) else None
        z = op(self.G, c1, self.H(c1).reps[i], c2, self.H(c2).reps[j])
        return tgt, self.H(tgt).class_of(z)

    def cup(self, c1, i, c2, j):
        return self._binary(cup, c1, i, c2, j, 0)

    def bracket(self, c1, i, c2, j):
        return self._binary(bracket, c1, i, c2, j, -1)

    def cup_vec(self, c1, x, c2, y):
        """Product of class vectors (dicts over basis classes)."""
        tgt = (c1[0] + c2[0], c1[1] + c2[1])
        out = {}
        for i, a in x.items():
            for j, b in y.items():
                r = self.cup(c1, i, c2, j)
                if r is None:
                    return None
                for k, v in r[1].items():
                    _add(out, k, a * b * v)
        return tgt, out

    def bracket_vec(self, c1, x, c2, y):
        tgt = (c1[0] + c2[0] - 1, c1[1] + c2[1])
        out = {}
        for i, a in x.items():
            for j, b in y.items():
                r = self.bracket(c1, i, c2, j)
                if r is None:
                    return None
                for k, v in r[1].items():
                    _add(out, k, a * b * v)
        return tgt, out


# ------------------------------------------------------- cap and calculus

def cap_cell(cf, cc):
    (m, q), (p, d) = cf, cc
    return (p - (m - q), d + q)


def cap(G, cf, F, E, cc, c):
    """f cap (x_0|x_1..x_p) = e m~(x_0, F(x_1..x_k)) | x_{k+1}..x_p,
    e = (-1)^{m + 1 + |F||x_0|}.

    With this sign 1 cap c = c, f cap (g cap c) = (-1)^{m_f m_g} (g cup f) cap c
    on the nose (so (f cup g) cap = f cap g cap on homology), and the
    two Lie derivative identities hold with the bracket of this module.
    Returns (cell, vector) with cell = (p - k, d + q).
    """
    m, q = cf
    k = m - q
    tgt = cap_cell(cf, cc)
    if tgt not in E.labels or cc[0] < k:
        return tgt, {}
    tab = table(G, cf, F)
    idx = E.index[tgt]
    ops = G.ops
    out = {}
    base = m + 1
    for j, a in c.items():
        t = E.labels[cc][j]
        x0, ins, rest = t[0], t[1:k + 1], t[k + 1:]
        vals = tab.get(ins)
        if not vals:
            continue
        e = _sgn(base + (m - 1) * (x0[0] - 1))
        for o, v in vals.items():
            for z, w in ops.mt(x0, o).items():
                _add(out, idx[(z,) + rest], e * a * v * w)
    return tgt, out


def _apply(M, v):
    return M.apply(v) if v else {}


def _chain_B(E, cell, c):
    p, d = cell
    if (p + 1, d) not in E.labels:
        return None
    return (p + 1, d), _apply(E.B(p, d), c)


def lie_derivative(G, cf, F, E, cc, c):
    """L_f(c) = B(f cap c) - (-1)^m f cap B(c)."""
    m = cf[0]
    t1, fc = cap(G, cf, F, E, cc, c)
    r1 = _chain_B(E, t1, fc) if t1 in E.labels else None
    r2 = _chain_B(E, cc, c)
    if r1 is None or r2 is None:
        return None
    t2, fBc = cap(G, cf, F, E, r2[0], r2[1])
    if t2 != r1[0] or t2 not in E.labels:
        return None
    out = dict(r1[1])
    e = -_sgn(m)
    for k, v in fBc.items():
        _add(out, k, e * v)
    return r1[0], out


def chain_degree(cell):
    """Total homological degree p - d of a chain cell (p, d)."""
    return cell[0] - cell[1]


class DualChains:
    """Functionals on the chains E: the complex CH^*(A^!; A^¡).

    A vector on cell (p, d) is a functional on E at (p, d); the differential
    is the transpose of b, and

        f cap* alpha = (-1)^{|f||alpha|} alpha o (f cap -)
        B* alpha     = (-1)^{|alpha|} alpha o B

    with |f| = m and |alpha| = p - d the degree of the chains alpha eats.
    """

    def __init__(self, E):
        from .kernel import BigradedComplex
        self.E = E
        self.field = E.field
        self.labels = E.labels
        diffs = {}
        for (p, d) in E.labels:
            if (p + 1, d) in E.labels:
                diffs[(p, d)] = E.complex.d(p + 1, d).transpose()
        self.complex = BigradedComplex(E.labels, diffs, direction=+1, field=self.field,
                                       name="CH^*(A^!; A^¡)")
        self._caps = {}

    def cap_matrix(self, G, cf, F, src):
        """The matrix of f cap - on E at cell src."""
        key = (cf, tuple(sorted(F.items())), src)
        M = self._caps.get(key)
        if M is None:
            tgt = cap_cell(cf, src)
            cols = [cap(G, cf, F, self.E, src, {j: self.field.one})[1]
                    for j in range(len(self.E.labels[src]))]
            M = SparseMatrix.from_columns(len(self.E.labels.get(tgt, ())), len(cols), cols,
                                          self.field)
            self._caps[key] = M
        return M

    def cap_star(self, G, cf, F, ca, alpha):
        """Returns (cell, functional) with cell the source of f cap -."""
        m, q = cf
        src = (ca[0] + m - q, ca[1] - q)
        if src not in self.E.labels:
            return src, None
        e = _sgn(m * chain_degree(ca))
        img = self.cap_matrix(G, cf, F, src).apply_left(alpha) if alpha else {}
        return src, {k: e * v for k, v in img.items()}

    def B_star(self, ca, alpha):
        p, d = ca
        src = (p - 1, d)
        if src not in self.E.labels:
            return src, None
        e = _sgn(chain_degree(ca))
        return src, {k: e * v for k, v in self.E.B(p - 1, d).apply_left(alpha).items()} \
            if alpha else {}

    def lie_star(self, G, cf, F, ca, alpha):
        """L*_f = B*(f cap* -) - (-1)^{|f|} f cap* B*."""
        m = cf[0]
        c1, a1 = self.cap_star(G, cf, F, ca, alpha)
        if a1 is None or c1 not in self.E.labels:
            return None
        c2, a2 = self.B_star(c1, a1)
        c3, b1 = self.B_star(ca, alpha)
        if a2 is None or b1 is None:
            return None
        c4, b2 = self.cap_star(G, cf, F, c3, b1)
        if b2 is None or c4 != c2:
            return None
        out = dict(a2)
        e = -_sgn(m)
        for k, v in b2.items():
            _add(out, k, e * v)
        return c2, out


class CalculusReport:
    """Pass/fail per axiom with the first witness of a failure."""

    def __init__(self, name):
        self.name = name
        self.axioms = {}
        self.counts = {}

    def record(self, axiom, ok, witness=None):
        self.counts[axiom] = self.counts.get(axiom, 0) + 1
        prev = self.axioms.get(axiom)
        if prev is None or prev[0]:
            self.axioms[axiom] = (ok, None if ok else witness)

    @property
    def passed(self):
        return all(ok for ok, _ in self.axioms.values())

    skipped = 0

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "skipped": self.skipped,
                "axioms": {k: {"passed": v[0], "checked": self.counts[k],
                               "witness": None if v[1] is None else repr(v[1])}
                           for k, v in sorted(self.axioms.items())}}


def _combine(*terms):
    out = {}
    for s, vec in terms:
        for k, v in vec.items():
            _add(out, k, s * v)
    return out


def _ok_cell(complex_, cell):
    try:
        complex_.homology(*cell)
        return True
    except (KeyError, ValueError):
        return False


def check_calculus(G, E, cochain_cells, chain_cells):
    """Differential-calculus axioms on HH^*(A^!) acting on HH_*(A^!) by cap,
    with B the Connes operator of E.  Every pair (f, alpha) and triple
    (f, g, alpha) of basis classes in the given cells is checked."""
    rep = CalculusReport("calculus")
    GC, EC = G.complex, E.complex
    coh = [(c, i, z) for c in cochain_cells for i, z in enumerate(GC.homology(*c).reps)]
    hom = [(c, i, z) for c in chain_cells for i, z in enumerate(EC.homology(*c).reps)]
    Ecells = set(E.labels)

    def ccls(cell, z):
        return EC.homology(*cell).class_of(z) if cell in Ecells else None

    for (cc, i, a) in hom:
        t, one_cap = cap(G, (0, 0), {unit(G): G.field.one}, E, cc, a)
        rep.record("unit", t == cc and one_cap == a, (cc, i))
    for (cf, i, f) in coh:
        for (cg, j, g) in coh:
            cs = (cf[0] + cg[0], cf[1] + cg[1])
            cb = (cf[0] + cg[0] - 1, cf[1] + cg[1])
            fg = cup(G, cf, f, cg, g) if cs in G.labels else None
            br = bracket(G, cf, f, cg, g) if cb in G.labels else None
            m1, m2 = cf[0], cg[0]
            for (ca, k, a) in hom:
                t1, ga = cap(G, cg, g, E, ca, a)
                if t1 not in Ecells:
                    continue
                t2, fga = cap(G, cf, f, E, t1, ga)
                if fg is not None and t2 in Ecells:
                    t3, r = cap(G, cs, fg, E, ca, a)
                    rep.record("module", ccls(t2, fga) == ccls(t3, r), (cf, i, cg, j, ca, k))
                if br is None:
                    continue
                # L_{f,g} = [L_f, L_g]
                lb = lie_derivative(G, cb, br, E, ca, a)
                lg = lie_derivative(G, cg, g, E, ca, a)
                lf = lie_derivative(G, cf, f, E, ca, a)
                if lb and lg and lf:
                    x = lie_derivative(G, cf, f, E, lg[0], lg[1])
                    y = lie_derivative(G, cg, g, E, lf[0], lf[1])
                    if x and y and x[0] == lb[0] == y[0]:
                        e = _sgn((m1 - 1) * (m2 - 1))
                        rhs = _combine((1, x[1]), (-e, y[1]))
                        rep.record("lie", ccls(lb[0], lb[1]) == ccls(lb[0], rhs),
                                   (cf, i, cg, j, ca, k))
                # (-1)^{|f|+1} {f,g} cap a = L_f(g cap a) - (-1)^{|g|(|f|+1)} g cap L_f(a)
                tb, bra = cap(G, cb, br, E, ca, a)
                x = lie_derivative(G, cf, f, E, t1, ga)
                if lf and x and tb in Ecells:
                    ty, y = cap(G, cg, g, E, lf[0], lf[1])
                    if ty == x[0] == tb:
                        rhs = _combine((1, x[1]), (-_sgn(m2 * (m1 + 1)), y))
                        lhs = {kk: -_sgn(m1) * v for kk, v in bra.items()}
                        rep.record("mixed", ccls(tb, lhs) == ccls(tb, rhs),
                                   (cf, i, cg, j, ca, k))
    return rep


def check_dual_calculus(G, dual, cochain_cells, cochain_cells_dual):
    """The dual calculus (HH^*(A^!), cup, bracket, HH^*(A^!; A^¡), B*, cap*):
    module axiom (g cup f) cap* alpha = g cap* (f cap* alpha), the
    compatibility L*_{f,g} = [L*_f, L*_g] and the mixed Leibniz rule."""
    rep = CalculusReport("dual calculus")
    GC, DC = G.complex, dual.complex
    coh = [(c, i, z) for c in cochain_cells for i, z in enumerate(GC.homology(*c).reps)]
    funs = [(c, i, z) for c in cochain_cells_dual for i, z in enumerate(DC.homology(*c).reps)]
    cells = set(dual.labels)

    def dcls(cell, z):
        return DC.homology(*cell).class_of(z) if cell in cells else None

    for (ca, k, a) in funs:
        t, one = dual.cap_star(G, (0, 0), {unit(G): G.field.one}, ca, a)
        rep.record("unit", t == ca and one == a, (ca, k))
        c2, bb = dual.B_star(ca, a)
        if bb is not None and c2 in cells:
            c3, bbb = dual.B_star(c2, bb)
            if bbb is not None:
                rep.record("B*^2", not bbb, (ca, k))
    for (cf, i, f) in coh:
        for (cg, j, g) in coh:
            m1, m2 = cf[0], cg[0]
            cs = (m1 + m2, cf[1] + cg[1])
            cb = (m1 + m2 - 1, cf[1] + cg[1])
            gf = cup(G, cg, g, cf, f) if cs in G.labels else None
            br = bracket(G, cf, f, cg, g) if cb in G.labels else None
            for (ca, k, a) in funs:
                t1, fa = dual.cap_star(G, cf, f, ca, a)
                if fa is None or t1 not in cells:
                    continue
                if gf is not None:
                    t2, gfa = dual.cap_star(G, cg, g, t1, fa)
                    t3, r = dual.cap_star(G, cs, gf, ca, a)
                    if gfa is not None and r is not None and t2 == t3:
                        rep.record("module", dcls(t2, gfa) == dcls(t3, r), (cf, i, cg, j, ca, k))
                if br is None:
                    continue
                lb = dual.lie_star(G, cb, br, ca, a)
                lf = dual.lie_star(G, cf, f, ca, a)
                lg = dual.lie_star(G, cg, g, ca, a)
                if lb and lf and lg:
                    x = dual.lie_star(G, cf, f, lg[0], lg[1])
                    y = dual.lie_star(G, cg, g, lf[0], lf[1])
                    if x and y and x[0] == lb[0] == y[0]:
                        e = _sgn((m1 - 1) * (m2 - 1))
                        rhs = _combine((1, x[1]), (-e, y[1]))
                        rep.record("lie", dcls(lb[0], lb[1]) == dcls(lb[0], rhs),
                                   (cf, i, cg, j, ca, k))
                tb, bra = dual.cap_star(G, cb, br, ca, a)
                t2, ga = dual.cap_star(G, cg, g, ca, a)
                if bra is None or ga is None or t2 not in cells or not lf:
                    continue
                x = dual.lie_star(G, cf, f, t2, ga)
                ty, y = dual.cap_star(G, cg, g, lf[0], lf[1])
                if x and y is not None and ty == x[0] == tb:
                    rhs = _combine((1, x[1]), (-_sgn(m2 * (m1 + 1)), y))
                    lhs = {kk: -_sgn(m1) * v for kk, v in bra.items()}
                    rep.record("mixed", dcls(tb, lhs) == dcls(tb, rhs), (cf, i, cg, j, ca, k))
    return rep


def check_bv(cells, dims, cup, bracket, delta, name="bv"):
    """Delta^2 = 0, Delta(1) = 0 and the seven-term identity

        {a, b} = (-1)^{|a|+1} (D(a cup b) - D(a) cup b - (-1)^{|a|} a cup D(b))

    on all pairs of basis classes.  ``cup``/``bracket`` take
    (cell1, vec1, cell2, vec2) class vectors and return (cell, vec) or None
    outside the window; ``delta`` maps a cell (m, w) to the matrix
    H(m, w) -> H(m - 1, w).  Pairs that leave the window are counted as
    skipped, not failed."""
    rep = CalculusReport(name)
    skipped = 0
    rep.skipped_pairs = []

    def D(cell, vec):
        if cell[0] == 0 or not vec:
            return (cell[0] - 1, cell[1]), {}
        M = delta.get(cell)
        if M is None:
            return None
        return (cell[0] - 1, cell[1]), (M.apply(vec) if vec else {})

    for cell, M in sorted(delta.items()):
        below = (cell[0] - 1, cell[1])
        if below in delta:
            rep.record("delta^2", (delta[below] @ M).is_zero(), cell)
    unit_cells = [c for c in cells if c[0] == 0 and c[1] == 0]
    rep.record("delta(1)", all(D(c, {0: 1})[1] == {} for c in unit_cells), None)
    for c1 in cells:
        for c2 in cells:
            m1 = c1[0]
            for i in range(dims[c1]):
                for j in range(dims[c2]):
                    a, b = {i: 1}, {j: 1}
                    ab = cup(c1, a, c2, b)
                    br = bracket(c1, a, c2, b)
                    if ab is None or br is None:
                        skipped += 1
                        rep.skipped_pairs.append((c1, i, c2, j))
                        continue
                    dab = D(*ab)
                    da, db = D(c1, a), D(c2, b)
                    if dab is None or da is None or db is None:
                        skipped += 1
                        rep.skipped_pairs.append((c1, i, c2, j))
                        continue
                    terms = [(1, dab[1])]
                    ok = True
                    if da[1]:
                        r = cup(da[0], da[1], c2, b)
                        if r is None:
                            ok = False
                        else:
                            terms.append((-1, r[1]))
                    if db[1]:
                        r = cup(c1, a, db[0], db[1])
                        if r is None:
                            ok = False
                        else:
                            terms.append((-_sgn(m1), r[1]))
                    if not ok:
                        skipped += 1
                        rep.skipped_pairs.append((c1, i, c2, j))
                        continue
                    rhs = {k: -_sgn(m1) * v for k, v in _combine(*terms).items()}
                    rep.record("seven-term", rhs == br[1], (c1, i, c2, j))
    rep.skipped = skipped
    return rep


def homology_bv_ops(G, cells=None):
    """(cells, dims, cup, bracket) for check_bv from a GradedCochains window."""
    ho = HomologyOps(G)
    cells = [c for c in (cells or ho.cells()) if ho.H(c).dim]
    dims = {c: ho.H(c).dim for c in cells}
    return cells, dims, ho.cup_vec, ho.bracket_vec
