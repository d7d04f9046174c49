"""
Exact linear algebra over a Field.

Vectors are plain lists of field elements. Row reduction, rank and inverses
are delegated to sympy's DomainMatrix; this module adds the guards for empty
shapes and the small set of operations the cohomology code needs:
- rref / rank / nullspace
- solve_in_span (coordinates of a vector in a spanning list)
- quotient_basis (representatives of ambient / sub)
- LinearMap (a matrix with explicit dimensions, including zero-dimensional spaces)
"""

import logging
from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix

from .errors import DimensionMismatchError
from .fields import Field

logger = logging.getLogger(__name__)

Vector = List[Any]


def _check_rows(rows: Sequence[Sequence[Any]], ncols: int) -> None:
    for index, row in enumerate(rows):
        if len(row) != ncols:
            raise DimensionMismatchError(f"Row {index} has length {len(row)}, expected {ncols}")


def _domain_matrix(rows: Sequence[Sequence[Any]], ncols: int, field: Field) -> DomainMatrix:
    return DomainMatrix([list(row) for row in rows], (len(rows), ncols), field.domain)


def rref(
    rows: Sequence[Sequence[Any]], ncols: int, field: Field
) -> Tuple[List[Vector], Tuple[int, ...], int]:
    """Reduced row-echelon form.

    Returns:
        (reduced rows, pivot columns, rank). Pivot rows come first.
    """
    _check_rows(rows, ncols)
    if not rows:
        return [], (), 0
    if ncols == 0:
        return [[] for _ in rows], (), 0
    reduced, pivots = _domain_matrix(rows, ncols, field).rref()
    pivots = tuple(pivots)
    return reduced.to_list(), pivots, len(pivots)


def rank(rows: Sequence[Sequence[Any]], ncols: int, field: Field) -> int:
    return rref(rows, ncols, field)[2]


def nullspace(rows: Sequence[Sequence[Any]], ncols: int, field: Field) -> List[Vector]:
    """Basis of {v : rows . v = 0}, one vector per free column."""
    reduced, pivots, _ = rref(rows, ncols, field)
    pivot_set = set(pivots)
    basis: List[Vector] = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vector = [field.zero] * ncols
        vector[free] = field.one
        for row_index, pivot in enumerate(pivots):
            vector[pivot] = -reduced[row_index][free]
        basis.append(vector)
    return basis


def _columns_as_rows(vectors: Sequence[Sequence[Any]], dim: int) -> List[Vector]:
    _check_rows(vectors, dim)
    return [[vector[i] for vector in vectors] for i in range(dim)]


def independent_columns(vectors: Sequence[Sequence[Any]], dim: int, field: Field) -> Tuple[int, ...]:
    """Indices of the first maximal linearly independent sublist of vectors."""
    if not vectors or dim == 0:
        return ()
    return rref(_columns_as_rows(vectors, dim), len(vectors), field)[1]


def kernel_of_vectors(vectors: Sequence[Sequence[Any]], dim: int, field: Field) -> List[Vector]:
    """Coefficient vectors c with sum_j c_j * vectors[j] = 0."""
    return nullspace(_columns_as_rows(vectors, dim), len(vectors), field)


def solve_in_span(
    basis: Sequence[Sequence[Any]], target: Sequence[Any], field: Field
) -> Optional[Vector]:
    """Coordinates of target in the span of basis, or None if target is not in the span.

    When basis is dependent, free coordinates are set to zero.
    """
    dim = len(target)
    _check_rows(basis, dim)
    count = len(basis)
    if dim == 0:
        return [field.zero] * count
    rows = [[vector[i] for vector in basis] + [target[i]] for i in range(dim)]
    reduced, pivots, _ = rref(rows, count + 1, field)
    if count in pivots:
        return None
    coordinates = [field.zero] * count
    for row_index, pivot in enumerate(pivots):
        coordinates[pivot] = reduced[row_index][count]
    return coordinates


def quotient_basis(sub: Sequence[Sequence[Any]], ambient_dim: int, field: Field) -> List[Vector]:
    """Unit vectors completing a basis of sub to a basis of the ambient space."""
    _, pivots, _ = rref(sub, ambient_dim, field)
    pivot_set = set(pivots)
    representatives = []
    for column in range(ambient_dim):
        if column in pivot_set:
            continue
        vector = [field.zero] * ambient_dim
        vector[column] = field.one
        representatives.append(vector)
    return representatives


def combine(coefficients: Sequence[Any], vectors: Sequence[Sequence[Any]], dim: int, field: Field) -> Vector:
    """sum_j coefficients[j] * vectors[j]."""
    result = [field.zero] * dim
    for coefficient, vector in zip(coefficients, vectors):
        if not coefficient:
            continue
        for i in range(dim):
            if vector[i]:
                result[i] = result[i] + coefficient * vector[i]
    return result


@dataclass(frozen=True)
class LinearMap:
    """A linear map K^source_dim -> K^target_dim stored as target_dim rows.

    Args:
        source_dim: Dimension of the domain
        target_dim: Dimension of the codomain
        rows: target_dim rows of source_dim entries
        field: Coefficient field
    """

    source_dim: int
    target_dim: int
    rows: Tuple[Tuple[Any, ...], ...]
    field: Field

    def __post_init__(self):
        if len(self.rows) != self.target_dim:
            raise DimensionMismatchError(
                f"LinearMap has {len(self.rows)} rows, expected {self.target_dim}"
            )
        _check_rows(self.rows, self.source_dim)

    @classmethod
    def from_columns(
        cls, columns: Sequence[Sequence[Any]], target_dim: int, field: Field
    ) -> "LinearMap":
        _check_rows(columns, target_dim)
        rows = tuple(tuple(column[i] for column in columns) for i in range(target_dim))
        return cls(len(columns), target_dim, rows, field)

    @classmethod
    def identity(cls, dim: int, field: Field) -> "LinearMap":
        rows = tuple(
            tuple(field.one if i == j else field.zero for j in range(dim)) for i in range(dim)
        )
        return cls(dim, dim, rows, field)

    @classmethod
    def zero(cls, source_dim: int, target_dim: int, field: Field) -> "LinearMap":
        rows = tuple(tuple(field.zero for _ in range(source_dim)) for _ in range(target_dim))
        return cls(source_dim, target_dim, rows, field)

    def column(self, j: int) -> Vector:
        return [row[j] for row in self.rows]

    def apply(self, vector: Sequence[Any]) -> Vector:
        if len(vector) != self.source_dim:
            raise DimensionMismatchError(
                f"Vector of length {len(vector)} applied to a map from dimension {self.source_dim}"
            )
        return combine(vector, [self.column(j) for j in range(self.source_dim)], self.target_dim, self.field)

    def compose(self, first: "LinearMap") -> "LinearMap":
        """self after first."""
        if first.target_dim != self.source_dim:
            raise DimensionMismatchError(
                f"Cannot compose: {first.target_dim}-dimensional output into "
                f"{self.source_dim}-dimensional input"
            )
        if self.target_dim == 0 or first.source_dim == 0 or self.source_dim == 0:
            return LinearMap.zero(first.source_dim, self.target_dim, self.field)
        product = _domain_matrix(self.rows, self.source_dim, self.field) * _domain_matrix(
            first.rows, first.source_dim, self.field
        )
        return LinearMap(
            first.source_dim,
            self.target_dim,
            tuple(tuple(row) for row in product.to_list()),
            self.field,
        )

    def rank(self) -> int:
        return rank(self.rows, self.source_dim, self.field)

    def kernel(self) -> List[Vector]:
        return nullspace(self.rows, self.source_dim, self.field)

    def is_zero(self) -> bool:
        return all(not entry for row in self.rows for entry in row)

    def is_isomorphism(self) -> bool:
        return self.source_dim == self.target_dim and self.rank() == self.source_dim

    def inverse(self) -> "LinearMap":
        if not self.is_isomorphism():
            raise DimensionMismatchError("Only isomorphisms can be inverted")
        if self.source_dim == 0:
            return self
        inverted = _domain_matrix(self.rows, self.source_dim, self.field).inv()
        return LinearMap(
            self.target_dim,
            self.source_dim,
            tuple(tuple(row) for row in inverted.to_list()),
            self.field,
        )

    def to_list(self) -> List[Vector]:
        return [list(row) for row in self.rows]


def identity_matrix(dim: int, field: Field) -> LinearMap:
    return LinearMap.identity(dim, field)


def matmul(second: LinearMap, first: LinearMap) -> LinearMap:
    """second after first."""
    return second.compose(first)
