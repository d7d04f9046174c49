"""
Tests for persistence CDGAs, persistence modules and barcodes.
"""

from fractions import Fraction

import pytest
from sympy import Rational

from persistence_cdga.errors import ModelError, StageEscapeError
from persistence_cdga.parser import parse_model
from persistence_cdga.persistence import (
    Bar,
    Barcode,
    barcode,
    build_theta,
    floor_stage,
    persistence_cohomology,
    persistence_linear_homology,
    shift,
    to_rational,
)

CONSTANT_MAP = """
# Relative model of the constant map S^3 -> S^2
[algebra]
x 2
y 3
xbar 1
ybar 2
ytilde 3

[differential]
y = x^2
xbar = x
ybar = y - x*xbar

[relative]
base = x, y
fiber = xbar, ybar, ytilde
"""


@pytest.fixture
def theta():
    return build_theta(parse_model(CONSTANT_MAP, name="const"))


class TestRationals:
    """Tests for persistence index helpers."""

    def test_to_rational(self):
        """Test exact rationals from strings and ints."""
        assert to_rational("3/2") == Rational(3, 2)
        assert to_rational(2) == 2

    def test_from_fraction(self):
        """Test conversion from fractions.Fraction."""
        assert to_rational(Fraction(3, 4)) == Rational(3, 4)

    def test_floor_stage(self):
        """Test the stage of a rational index."""
        assert floor_stage("5/2") == 2
        assert floor_stage(Rational(1, 2)) == 0


class TestPersistenceCDGA:
    """Tests for build_theta and stages."""

    def test_stage_table(self, theta):
        """Test the generators added at each stage."""
        assert theta.stabilization_index == 3
        assert theta.stage_table() == [
            (0, ("x", "y")),
            (1, ("x", "y", "xbar")),
            (2, ("x", "y", "xbar", "ybar")),
            (3, ("x", "y", "xbar", "ybar", "ytilde")),
        ]

    def test_stage_at_rational(self, theta):
        """Test that Θ(t) is Θ(⌊t⌋)."""
        assert theta.stage("3/2") is theta.stage(1)
        assert theta.stage(7) is theta.algebra

    def test_negative_index(self, theta):
        """Test that negative indices are rejected."""
        with pytest.raises(ModelError):
            theta.stage(-1)

    def test_structure_map(self, theta):
        """Test that structure maps are inclusions and only go up."""
        m = theta.structure_map(0, 2)
        assert m.image("x") == theta.stage(2).gen("x")
        with pytest.raises(ModelError):
            theta.structure_map(2, 1)

    def test_stage_escape(self):
        """Test that a stage not closed under d is reported."""
        text = CONSTANT_MAP + "\n[stages]\nxbar = 2\nybar = 1\n"
        with pytest.raises(StageEscapeError) as excinfo:
            build_theta(parse_model(text))
        assert excinfo.value.generator == "ybar"
        assert excinfo.value.escaped_to == 2

    def test_stage_cohomology(self, theta):
        """Test stage-wise cohomology dimensions."""
        assert theta.cohomology(0, 4).dims() == [1, 0, 1, 0, 0]
        assert theta.cohomology(1, 4).dims() == [1, 0, 0, 1, 0]
        assert theta.cohomology(2, 4).dims() == [1, 0, 0, 0, 0]
        assert theta.cohomology(3, 4).dims() == [1, 0, 0, 1, 0]


class TestPersistenceModule:
    """Tests for persistence modules and shifts."""

    def test_dimensions(self, theta):
        """Test H^3 along the stages."""
        module = persistence_cohomology(theta, 5)
        assert module.last_stage == 4
        assert [module.dimension(3, s) for s in range(6)] == [0, 1, 0, 1, 1, 1]

    def test_ranks(self, theta):
        """Test ranks of composite structure maps."""
        module = persistence_cohomology(theta, 5)
        assert module.rank(3, 1, 1) == 1
        assert module.rank(3, 1, 2) == 0
        assert module.rank(3, 1, 3) == 0
        assert module.rank(0, 0, 4) == 1

    def test_linear_homology(self, theta):
        """Test H(Q) along the stages."""
        module = persistence_linear_homology(theta, 4)
        assert [module.dimension(3, s) for s in range(5)] == [1, 1, 0, 1, 1]
        assert [module.dimension(2, s) for s in range(5)] == [1, 0, 0, 0, 0]

    def test_shift(self, theta):
        """Test that shifting reads stage ⌊s + ε⌋."""
        shifted = shift(persistence_cohomology(theta, 5), 1)
        assert [shifted.dimension(3, s) for s in range(5)] == [1, 0, 1, 1, 1]
        half = shift(persistence_cohomology(theta, 5), "1/2")
        assert [half.dimension(3, s) for s in range(5)] == [0, 1, 0, 1, 1]

    def test_negative_shift(self, theta):
        """Test that negative shifts are rejected."""
        with pytest.raises(ValueError):
            shift(persistence_cohomology(theta, 5), -1)


class TestBarcode:
    """Tests for barcodes."""

    def test_constant_map_barcode(self, theta):
        """Test the barcode of the constant map S^3 -> S^2."""
        bars = barcode(persistence_cohomology(theta, 6))
        assert bars.format_lines() == ["0 0 inf", "2 0 1", "3 1 2", "3 3 inf"]

    def test_multiset_equality(self):
        """Test that barcodes compare as multisets."""
        first = Barcode([Bar(1, 0, 2), Bar(1, 0, 2), Bar(0, 0, None)])
        second = Barcode([Bar(0, 0, None), Bar(1, 0, 2), Bar(1, 0, 2)])
        third = Barcode([Bar(0, 0, None), Bar(1, 0, 2)])
        assert first == second
        assert first != third

    def test_to_list(self):
        """Test structured output."""
        assert Barcode([Bar(3, 3, None), Bar(2, 0, 1)]).to_list() == [[2, 0, 1], [3, 3, "inf"]]

    def test_bar_contains(self):
        """Test half-open intervals."""
        bar = Bar(2, 1, 3)
        assert bar.contains(1)
        assert bar.contains(2)
        assert not bar.contains(3)
        assert Bar(2, 1, None).contains(100)

    def test_rank_invariant_reproduced(self, theta):
        """Test that the bars reproduce every rank of the module."""
        module = persistence_cohomology(theta, 6)
        bars = barcode(module)
        for degree in range(7):
            for s in range(module.last_stage + 1):
                for t in range(s, module.last_stage + 1):
                    alive = sum(1 for b in bars.in_degree(degree) if b.contains(s) and b.contains(t))
                    assert alive == module.rank(degree, s, t)
