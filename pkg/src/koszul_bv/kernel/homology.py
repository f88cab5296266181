"""Graded vector spaces, bigraded complexes and their (co)homology."""

from .fields import QQ
from .sparse import Echelon, SparseMatrix, kernel_basis, rank


class ComplexError(ValueError):
    pass


class GradedVectorSpace:
    """Finite-dimensional pieces indexed by a key, each with an ordered basis.

    Keys are arbitrary hashables (an integer degree, or a pair such as
    (homological degree, weight)); basis labels are opaque but unique within
    a piece.
    """

    def __init__(self, components=None):
        self._basis = {}
        self._index = {}
        for key, labels in (components or {}).items():
            self.set(key, labels)

    def set(self, key, labels):
        labels = list(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        if len(index) != len(labels):
            raise ComplexError("duplicate basis labels in component %r" % (key,))
        self._basis[key] = labels
        self._index[key] = index

    def basis(self, key):
        return self._basis.get(key, [])

    def index(self, key):
        return self._index.get(key, {})

    def dim(self, key):
        return len(self._basis.get(key, ()))

    def keys(self):
        return self._basis.keys()

    def __contains__(self, key):
        return key in self._basis


class BigradedComplex:
    """Terms at (h, w) with weight-preserving differentials.

    ``direction`` is -1 for chain complexes (d: (h, w) -> (h-1, w)) and +1 for
    cochain complexes.  Differentials are validated on construction: every
    composite of consecutive differentials must be the zero matrix.
    """

    def __init__(self, terms, differentials, direction=-1, field=QQ, check=True, name=""):
        self.field = field
        self.direction = direction
        self.name = name
        self.terms = terms if isinstance(terms, GradedVectorSpace) else GradedVectorSpace(terms)
        self._d = {}
        for (h, w), M in differentials.items():
            src, dst = self.dim((h, w)), self.dim((h + direction, w))
            if M.shape != (dst, src):
                raise ComplexError("differential at %r has shape %s, expected %s"
                                   % ((h, w), M.shape, (dst, src)))
            self._d[(h, w)] = M
        if check:
            self.check_square_zero()

    def dim(self, cell):
        return self.terms.dim(cell)

    def basis(self, cell):
        return self.terms.basis(cell)

    def cells(self):
        return sorted(self.terms.keys())

    def weights(self):
        return sorted({w for _, w in self.terms.keys()})

    def d(self, h, w):
        """Differential out of (h, w); zero matrix if absent."""
        M = self._d.get((h, w))
        if M is None:
            M = SparseMatrix.zero(self.dim((h + self.direction, w)), self.dim((h, w)), self.field)
        return M

    def d_into(self, h, w):
        return self.d(h - self.direction, w)

    def check_square_zero(self):
        for (h, w), M in self._d.items():
            nxt = self._d.get((h + self.direction, w))
            if nxt is None or M.is_zero():
                continue
            if not (nxt @ M).is_zero():
                raise ComplexError("d^2 != 0 at %r in %s" % ((h, w), self.name or "complex"))

    def homology(self, h, w):
        """HomologyBasis at (h, w); computed once per cell."""
        cache = self.__dict__.setdefault("_hcache", {})
        if (h, w) not in cache:
            cache[(h, w)] = homology(self.d_into(h, w), self.d(h, w), cell=(h, w))
        return cache[(h, w)]

    def homology_dims(self):
        return {cell: self.homology(*cell).dim for cell in self.cells()}


class HomologyBasis:
    """Chosen cycle representatives and the coordinate map on cycles.

    ``reps[i]`` is a cycle whose class is the i-th standard class vector;
    ``class_of(z)`` returns class coordinates (dict) of a cycle z, and kills
    boundaries.
    """

    def __init__(self, cell, ambient_dim, reps, echelon, n_boundary, cycle_dim, field):
        self.cell = cell
        self.ambient_dim = ambient_dim
        self.reps = reps
        self._ech = echelon
        self._nb = n_boundary
        self.cycle_dim = cycle_dim
        self.field = field

    @property
    def dim(self):
        return len(self.reps)

    def class_of(self, z):
        combo = self._ech.express(z)
        if combo is None:
            raise ComplexError("vector is not a cycle at %r" % (self.cell,))
        out = {}
        for tag, c in combo.items():
            if tag[0] == "rep" and c:
                out[tag[1]] = c
        return out

    def class_vector(self, z):
        c = self.class_of(z)
        return [c.get(i, self.field.zero) for i in range(self.dim)]

    def is_cycle(self, z):
        return self._ech.contains(z)

    def is_boundary(self, z):
        return self.is_cycle(z) and not self.class_of(z)

    @property
    def boundary_rank(self):
        return self._nb


def homology(d_in, d_out, cell=None):
    """Homology at the middle of ``. --d_in--> C --d_out--> .``."""
    field = d_out.field
    n = d_out.cols
    if d_in.rows != n:
        raise ComplexError("incompatible shapes %s, %s" % (d_in.shape, d_out.shape))
    if d_in.cols and d_out.rows and not (d_out @ d_in).is_zero():
        raise ComplexError("d_out o d_in != 0 at %r" % (cell,))
    cycles = kernel_basis(d_out)
    ech = Echelon(field, track=True)
    nb = 0
    for c in range(d_in.cols):
        col = d_in.column(c)
        if col and ech.add(col, tag=("bd", c)):
            nb += 1
    reps = []
    for z in cycles:
        if ech.add(z, tag=("rep", len(reps))):
            reps.append(z)
    return HomologyBasis(cell, n, reps, ech, nb, len(cycles), field)


def homology_dim(d_in, d_out):
    n = d_out.cols
    r_out = rank(d_out) if d_out.rows else 0
    r_in = rank(d_in) if d_in.cols else 0
    return n - r_out - r_in


def induced_matrix(M, H_src, H_dst):
    """Matrix of the map on homology induced by the chain map M."""
    cols = [H_dst.class_of(M.apply(z)) for z in H_src.reps]
    return SparseMatrix.from_columns(H_dst.dim, H_src.dim, cols, H_src.field)
