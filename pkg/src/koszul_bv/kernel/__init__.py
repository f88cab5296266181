from .fields import QQ, GF, Field, FieldError, ModP, PrimeField, RationalField, field_from_descriptor
from .sparse import (
    Echelon,
    SparseMatrix,
    block_diagonal,
    determinant,
    hstack,
    image_basis,
    inverse,
    kernel_basis,
    kron,
    rank,
    rref,
    solve,
    vec_add,
    vec_axpy,
    vec_scale,
    vstack,
)
from .homology import BigradedComplex, ComplexError, GradedVectorSpace, HomologyBasis, homology, induced_matrix
from .eigen import NotSemisimpleOverField, eigenspace_decomposition, field_roots, lagrange_projection, monomial_values
