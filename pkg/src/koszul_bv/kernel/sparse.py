"""Sparse matrices and exact elimination.

Vectors are plain dicts ``{index: scalar}`` holding nonzero entries only.
A :class:`SparseMatrix` maps column coordinates to row coordinates, i.e.
``M.apply(v)`` is ``M v`` for a column vector ``v``.
"""

from .fields import QQ

DENSE_CUTOFF = 64


# ---------------------------------------------------------------- vectors

def vec_axpy(y, a, x):
    """In place ``y += a * x``; drops cancelled entries."""
    if not a:
        return y
    for k, xv in x.items():
        s = y.get(k)
        if s is None:
            y[k] = a * xv
        else:
            s = s + a * xv
            if s:
                y[k] = s
            else:
                del y[k]
    return y


def vec_add(x, y):
    out = dict(x)
    return vec_axpy(out, 1, y)


def vec_scale(a, x):
    if not a:
        return {}
    return {k: a * v for k, v in x.items()}


def vec_clean(x):
    return {k: v for k, v in x.items() if v}


# ---------------------------------------------------------------- matrices

class SparseMatrix:
    """Immutable sparse matrix over an exact field."""

    __slots__ = ("rows", "cols", "field", "_rows", "_cols")

    def __init__(self, rows, cols, entries=None, field=QQ):
        self.rows = rows
        self.cols = cols
        self.field = field
        data = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < rows and 0 <= c < cols):
                    raise IndexError("entry (%d, %d) outside %dx%d" % (r, c, rows, cols))
                v = field(v)
                if v:
                    data.setdefault(r, {})[c] = v
        self._rows = data
        self._cols = None

    @classmethod
    def from_rows(cls, rows, cols, row_dicts, field=QQ):
        m = cls(rows, cols, None, field)
        data = {}
        for r, d in row_dicts.items():
            if not 0 <= r < rows:
                raise IndexError("row %d outside %d" % (r, rows))
            clean = {}
            for c, v in d.items():
                if not 0 <= c < cols:
                    raise IndexError("col %d outside %d" % (c, cols))
                if v:
                    clean[c] = v
            if clean:
                data[r] = clean
        m._rows = data
        return m

    @classmethod
    def from_columns(cls, rows, cols, col_vectors, field=QQ):
        """``col_vectors[j]`` is the image of basis vector j."""
        data = {}
        for c, vec in enumerate(col_vectors):
            for r, v in vec.items():
                if v:
                    data.setdefault(r, {})[c] = v
        return cls.from_rows(rows, cols, data, field)

    @classmethod
    def from_dense(cls, dense, field=QQ, cols=None):
        rows = len(dense)
        if cols is None:
            cols = len(dense[0]) if rows else 0
        entries = {(i, j): v for i, row in enumerate(dense) for j, v in enumerate(row) if v}
        return cls(rows, cols, entries, field)

    @classmethod
    def identity(cls, n, field=QQ):
        one = field.one
        return cls.from_rows(n, n, {i: {i: one} for i in range(n)}, field)

    @classmethod
    def zero(cls, rows, cols, field=QQ):
        return cls(rows, cols, None, field)

    @classmethod
    def diagonal(cls, values, field=QQ):
        n = len(values)
        return cls.from_rows(n, n, {i: {i: field(v)} for i, v in enumerate(values)}, field)

    # -- access
    @property
    def shape(self):
        return (self.rows, self.cols)

    def row(self, r):
        return self._rows.get(r, {})

    def items(self):
        for r, d in self._rows.items():
            for c, v in d.items():
                yield (r, c), v

    def nnz(self):
        return sum(len(d) for d in self._rows.values())

    def __getitem__(self, rc):
        r, c = rc
        return self._rows.get(r, {}).get(c, self.field.zero)

    def column(self, c):
        if self._cols is None:
            cols = {}
            for r, d in self._rows.items():
                for cc, v in d.items():
                    cols.setdefault(cc, {})[r] = v
            self._cols = cols
        return self._cols.get(c, {})

    def to_dense(self):
        zero = self.field.zero
        out = [[zero] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.items():
            out[r][c] = v
        return out

    def is_zero(self):
        return not self._rows

    # -- arithmetic
    def apply(self, vec):
        """``M v`` for a sparse column vector."""
        out = {}
        for c, x in vec.items():
            col = self.column(c)
            if col:
                vec_axpy(out, x, col)
        return out

    def apply_left(self, vec):
        """``v^T M`` for a sparse row vector (returned as dict over columns)."""
        out = {}
        for r, x in vec.items():
            row = self._rows.get(r)
            if row:
                vec_axpy(out, x, row)
        return out

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch %s @ %s" % (self.shape, other.shape))
        data = {}
        for r, d in self._rows.items():
            acc = {}
            for k, a in d.items():
                orow = other._rows.get(k)
                if orow:
                    vec_axpy(acc, a, orow)
            if acc:
                data[r] = acc
        return SparseMatrix.from_rows(self.rows, other.cols, data, self.field)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch %s + %s" % (self.shape, other.shape))
        data = {r: dict(d) for r, d in self._rows.items()}
        for r, d in other._rows.items():
            vec_axpy(data.setdefault(r, {}), 1, d)
        return SparseMatrix.from_rows(self.rows, self.cols, data, self.field)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        a = self.field(a)
        return SparseMatrix.from_rows(
            self.rows, self.cols,
            {r: vec_scale(a, d) for r, d in self._rows.items()}, self.field)

    def transpose(self):
        data = {}
        for (r, c), v in self.items():
            data.setdefault(c, {})[r] = v
        return SparseMatrix.from_rows(self.cols, self.rows, data, self.field)

    @property
    def T(self):
        return self.transpose()

    def submatrix(self, row_idx, col_idx):
        rpos = {r: i for i, r in enumerate(row_idx)}
        cpos = {c: j for j, c in enumerate(col_idx)}
        data = {}
        for r, d in self._rows.items():
            i = rpos.get(r)
            if i is None:
                continue
            nd = {cpos[c]: v for c, v in d.items() if c in cpos}
            if nd:
                data[i] = nd
        return SparseMatrix.from_rows(len(row_idx), len(col_idx), data, self.field)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.rows, self.cols, self.nnz()))

    def __repr__(self):
        return "SparseMatrix(%dx%d, nnz=%d, %r)" % (self.rows, self.cols, self.nnz(), self.field)


def hstack(mats, field=QQ):
    rows = mats[0].rows if mats else 0
    data, off = {}, 0
    for m in mats:
        if m.rows != rows:
            raise ValueError("hstack row mismatch")
        for r, d in m._rows.items():
            data.setdefault(r, {}).update({c + off: v for c, v in d.items()})
        off += m.cols
    return SparseMatrix.from_rows(rows, off, data, mats[0].field if mats else field)


def vstack(mats, field=QQ):
    cols = mats[0].cols if mats else 0
    data, off = {}, 0
    for m in mats:
        if m.cols != cols:
            raise ValueError("vstack col mismatch")
        for r, d in m._rows.items():
            data[r + off] = dict(d)
        off += m.rows
    return SparseMatrix.from_rows(off, cols, data, mats[0].field if mats else field)


def block_diagonal(mats, field=QQ):
    data, ro, co = {}, 0, 0
    for m in mats:
        for r, d in m._rows.items():
            data[r + ro] = {c + co: v for c, v in d.items()}
        ro += m.rows
        co += m.cols
    return SparseMatrix.from_rows(ro, co, data, mats[0].field if mats else field)


def kron(a, b):
    data = {}
    for (r1, c1), v1 in a.items():
        for (r2, c2), v2 in b.items():
            data.setdefault(r1 * b.rows + r2, {})[c1 * b.cols + c2] = v1 * v2
    return SparseMatrix.from_rows(a.rows * b.rows, a.cols * b.cols, data, a.field)


# ------------------------------------------------------------ elimination

class Echelon:
    """Incrementally row-reduced set of vectors with provenance tracking.

    Each stored row is kept scaled to 1 on its pivot (its smallest index),
    together with the combination of inserted vectors it came from, so the
    echelon can express any vector of its span in terms of the inputs.
    """

    def __init__(self, field=QQ, track=False):
        self.field = field
        self.track = track
        self.pivots = {}       # pivot column -> (row vector, combination)
        self.count = 0

    def __len__(self):
        return len(self.pivots)

    def reduce(self, vec):
        """Return ``(residual, combination)`` with ``vec = residual + sum c_i input_i``."""
        v = dict(vec)
        combo = {}
        pivots = self.pivots
        while v:
            keys = [k for k in v if k in pivots]
            if not keys:
                break
            k = min(keys)
            a = v[k]
            row, rc = pivots[k]
            vec_axpy(v, -a, row)
            if self.track:
                vec_axpy(combo, a, rc)
        return v, combo

    def add(self, vec, tag=None):
        """Insert ``vec``; returns True when it enlarged the span."""
        if tag is None:
            tag = self.count
        self.count += 1
        v, combo = self.reduce(vec)
        if not v:
            return False
        k = min(v)
        inv = 1 / v[k]
        row = vec_scale(inv, v)
        rc = {}
        if self.track:
            # row = (vec - sum combo_i input_i) / v[k]
            rc = vec_scale(-inv, combo)
            vec_axpy(rc, inv, {tag: self.field.one})
        self.pivots[k] = (row, rc)
        return True

    def contains(self, vec):
        return not self.reduce(vec)[0]

    def express(self, vec):
        """Combination of inputs equal to ``vec``, or None if outside the span."""
        v, combo = self.reduce(vec)
        if v:
            return None
        return combo


def _row_order(row_dicts):
    # Markowitz-style: eliminate with the sparsest rows first when the
    # matrix is large; small matrices keep the natural order.
    idx = list(row_dicts)
    if len(idx) > DENSE_CUTOFF:
        idx.sort(key=lambda r: (len(row_dicts[r]), r))
    return idx


def rref(M):
    """Reduced row echelon form of M: returns ``(pivot_cols, rows)`` sorted by pivot."""
    ech = Echelon(M.field)
    for r in _row_order(M._rows):
        ech.add(M._rows[r])
    pcols = sorted(ech.pivots)
    rows = {k: dict(ech.pivots[k][0]) for k in pcols}
    # back-substitution, highest pivot first
    for i in range(len(pcols) - 1, -1, -1):
        k = pcols[i]
        pr = rows[k]
        for j in range(i):
            other = rows[pcols[j]]
            a = other.get(k)
            if a:
                vec_axpy(other, -a, pr)
    return pcols, [rows[k] for k in pcols]


def rank(M):
    ech = Echelon(M.field)
    for r in _row_order(M._rows):
        ech.add(M._rows[r])
    return len(ech)


def kernel_basis(M):
    """Basis of ``{v : M v = 0}`` as sparse coordinate vectors."""
    pcols, rows = rref(M)
    pivset = set(pcols)
    one = M.field.one
    basis = []
    for j in range(M.cols):
        if j in pivset:
            continue
        v = {j: one}
        for k, row in zip(pcols, rows):
            a = row.get(j)
            if a:
                v[k] = -a
        basis.append(v)
    return basis


def solve(M, b):
    """Some ``x`` with ``M x = b``, or None when b is not in the image."""
    ech = Echelon(M.field, track=True)
    for c in range(M.cols):
        col = M.column(c)
        if col:
            ech.add(col, tag=c)
    return ech.express(b)


def image_basis(M):
    """A basis (column vectors) of the column space of M."""
    ech = Echelon(M.field)
    out = []
    for c in range(M.cols):
        col = M.column(c)
        if col and ech.add(col):
            out.append(dict(col))
    return out


def inverse(M):
    if M.rows != M.cols:
        raise ValueError("inverse of non-square matrix")
    n = M.rows
    ech = Echelon(M.field, track=True)
    for c in range(n):
        ech.add(M.column(c), tag=c)
    if len(ech) != n:
        raise ZeroDivisionError("matrix is singular")
    cols = []
    for i in range(n):
        x = ech.express({i: M.field.one})
        cols.append(x)
    return SparseMatrix.from_columns(n, n, cols, M.field)


def determinant(M):
    if M.rows != M.cols:
        raise ValueError("determinant of non-square matrix")
    a = [dict(M.row(r)) for r in range(M.rows)]
    det = M.field.one
    n = M.rows
    for c in range(n):
        piv = None
        for r in range(c, n):
            if a[r].get(c):
                piv = r
                break
        if piv is None:
            return M.field.zero
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        p = a[c][c]
        det = det * p
        inv = 1 / p
        for r in range(c + 1, n):
            x = a[r].get(c)
            if x:
                vec_axpy(a[r], -x * inv, a[c])
    return det
