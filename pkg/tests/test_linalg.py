"""
Tests for exact linear algebra.
"""

import random

import pytest

from persistence_cdga.errors import DimensionMismatchError
from persistence_cdga.fields import get_field
from persistence_cdga.linalg import (
    LinearMap,
    combine,
    kernel_of_vectors,
    nullspace,
    quotient_basis,
    rank,
    rref,
    solve_in_span,
)


@pytest.fixture
def Q():
    return get_field("Q")


def vec(Q, *values):
    return [Q.convert(v) for v in values]


class TestRowReduction:
    """Tests for rref, rank and nullspace."""

    def test_rank(self, Q):
        """Test rank of a dependent system."""
        rows = [vec(Q, 1, 2, 3), vec(Q, 2, 4, 6), vec(Q, 0, 1, 1)]
        assert rank(rows, 3, Q) == 2

    def test_empty_shapes(self, Q):
        """Test zero rows and zero columns."""
        assert rref([], 3, Q) == ([], (), 0)
        assert rank([[], []], 0, Q) == 0

    def test_row_length_checked(self, Q):
        """Test that ragged rows are rejected."""
        with pytest.raises(DimensionMismatchError):
            rank([vec(Q, 1, 2), vec(Q, 1)], 2, Q)

    def test_nullspace(self, Q):
        """Test that nullspace vectors are killed by the rows."""
        rows = [vec(Q, 1, 1, 0), vec(Q, 0, 1, 1)]
        basis = nullspace(rows, 3, Q)
        assert len(basis) == 1
        for row in rows:
            assert sum(a * b for a, b in zip(row, basis[0])) == Q.zero

    def test_rank_nullity_random(self, Q):
        """Test rank + nullity = number of columns on seeded random matrices."""
        rng = random.Random(7)
        for _ in range(25):
            nrows, ncols = rng.randint(0, 4), rng.randint(1, 5)
            rows = [vec(Q, *[rng.randint(-2, 2) for _ in range(ncols)]) for _ in range(nrows)]
            assert rank(rows, ncols, Q) + len(nullspace(rows, ncols, Q)) == ncols

    def test_rref_idempotent(self, Q):
        """Test rref(rref(M)) = rref(M) on seeded random matrices."""
        rng = random.Random(41)
        for _ in range(100):
            nrows, ncols = rng.randint(1, 5), rng.randint(1, 5)
            rows = [vec(Q, *[rng.randint(-3, 3) for _ in range(ncols)]) for _ in range(nrows)]
            reduced, pivots, r = rref(rows, ncols, Q)
            assert rref(reduced, ncols, Q) == (reduced, pivots, r)

    def test_rank_of_product(self, Q):
        """Test rank(AB) <= min(rank A, rank B) on seeded random maps."""
        rng = random.Random(13)

        def random_map(source, target):
            rows = tuple(tuple(Q.convert(rng.randint(-2, 2)) for _ in range(source)) for _ in range(target))
            return LinearMap(source, target, rows, Q)

        for _ in range(100):
            n, k, m = rng.randint(1, 4), rng.randint(1, 4), rng.randint(1, 4)
            first, second = random_map(n, k), random_map(k, m)
            assert second.compose(first).rank() <= min(first.rank(), second.rank())


class TestSpans:
    """Tests for span helpers."""

    def test_solve_in_span(self, Q):
        """Test coordinates of a vector in a span."""
        basis = [vec(Q, 1, 0, 1), vec(Q, 0, 1, 1)]
        target = vec(Q, 2, 3, 5)
        coordinates = solve_in_span(basis, target, Q)
        assert coordinates == vec(Q, 2, 3)
        assert combine(coordinates, basis, 3, Q) == target

    def test_not_in_span(self, Q):
        """Test that vectors outside the span give None."""
        assert solve_in_span([vec(Q, 1, 0)], vec(Q, 0, 1), Q) is None

    def test_kernel_of_vectors(self, Q):
        """Test linear relations among vectors."""
        vectors = [vec(Q, 1, 0), vec(Q, 0, 1), vec(Q, 1, 1)]
        kernel = kernel_of_vectors(vectors, 2, Q)
        assert len(kernel) == 1
        assert combine(kernel[0], vectors, 2, Q) == vec(Q, 0, 0)

    def test_quotient_basis(self, Q):
        """Test representatives of a quotient."""
        reps = quotient_basis([vec(Q, 1, 1, 0)], 3, Q)
        assert len(reps) == 2


class TestLinearMap:
    """Tests for LinearMap."""

    def test_identity_and_inverse(self, Q):
        """Test inverse of an invertible map."""
        m = LinearMap.from_columns([vec(Q, 1, 1), vec(Q, 0, 1)], 2, Q)
        assert m.is_isomorphism()
        assert m.inverse().compose(m) == LinearMap.identity(2, Q)

    def test_zero_dimensional(self, Q):
        """Test maps from and to zero-dimensional spaces."""
        m = LinearMap.zero(0, 3, Q)
        n = LinearMap.zero(3, 0, Q)
        assert n.compose(m).source_dim == 0
        assert m.compose(LinearMap.zero(2, 0, Q)).is_zero()
        assert LinearMap.identity(0, Q).is_isomorphism()

    def test_compose_mismatch(self, Q):
        """Test that composing incompatible maps fails."""
        with pytest.raises(DimensionMismatchError):
            LinearMap.identity(2, Q).compose(LinearMap.identity(3, Q))

    def test_apply(self, Q):
        """Test applying a map to a vector."""
        m = LinearMap.from_columns([vec(Q, 1, 2), vec(Q, 3, 4)], 2, Q)
        assert m.apply(vec(Q, 1, 1)) == vec(Q, 4, 6)

    def test_non_square_not_invertible(self, Q):
        """Test that non-isomorphisms refuse to invert."""
        with pytest.raises(DimensionMismatchError):
            LinearMap.zero(2, 1, Q).inverse()
