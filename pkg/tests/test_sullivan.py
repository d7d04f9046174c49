"""
Tests for relative Sullivan models and their homology.
"""

import pytest

from persistence_cdga.cdga import FreeCDGA, Morphism
from persistence_cdga.errors import CapExceededError, ModelError
from persistence_cdga.parser import parse_expression, parse_model
from persistence_cdga.sullivan import (
    cohomology,
    linear_part_homology,
    verify_isomorphism_pair,
    verify_minimality,
    verify_quasi_iso,
)

HOPF = """
[algebra]
x 2
y 3
xbar 1

[differential]
y = x^2
xbar = x

[relative]
base = x, y
fiber = xbar
"""

CP2 = """
[algebra]
x 2
z 5

[differential]
z = x^3

[relative]
base = x, z
fiber = -
"""


def element(text, algebra):
    return parse_expression(text, algebra)


class TestRelativeModel:
    """Tests for RelativeSullivanModel structure."""

    def test_default_stages(self):
        """Test that fiber generators live at their degree."""
        model = parse_model(HOPF, name="hopf")
        assert model.staging == {"x": 0, "y": 0, "xbar": 1}
        assert model.stabilization_index == 1
        assert model.fiber_degrees() == [1]

    def test_explicit_stages(self):
        """Test that [stages] overrides the degree."""
        model = parse_model(HOPF + "\n[stages]\nxbar = 4\n")
        assert model.stage("xbar") == 4
        assert model.stabilization_index == 4

    def test_empty_fiber(self):
        """Test the identity model with no fiber generators."""
        model = parse_model(CP2)
        assert model.fiber == ()
        assert model.stabilization_index == 0

    def test_base_algebra(self):
        """Test the base sub-CDGA."""
        model = parse_model(HOPF, name="hopf")
        assert model.base_algebra.names() == ("x", "y")

    def test_base_not_closed(self):
        """Test that d of a base generator may not involve the fiber."""
        text = "[algebra]\nx 2\nw 1\n[differential]\nw = x\nx = 0\n[relative]\nbase = w\nfiber = x\n"
        with pytest.raises(ModelError):
            parse_model(text)

    def test_partition(self):
        """Test that every generator is base or fiber, never both."""
        text = "[algebra]\nx 2\ny 3\n[relative]\nbase = x\nfiber = x\n"
        with pytest.raises(ModelError):
            parse_model(text)


class TestMinimality:
    """Tests for verify_minimality."""

    def test_hopf_is_minimal(self):
        """Test a minimal relative model."""
        assert verify_minimality(parse_model(HOPF))

    def test_linear_term(self):
        """Test that a linear fiber term in d(W) is rejected."""
        text = "[algebra]\nx 2\nu 4\nv 3\n[differential]\nv = u\n[relative]\nbase = x\nfiber = u, v\n"
        result = verify_minimality(parse_model(text))
        assert result.check == "minimality-linear"
        assert result.generator == "v"

    def test_cyclic_dependency(self):
        """Test that same-degree fiber generators may not depend on each other cyclically."""
        text = (
            "[algebra]\ne 1\na 3\nb 3\n"
            "[differential]\na = e*b\nb = e*a\n"
            "[relative]\nbase = e\nfiber = a, b\n"
        )
        result = verify_minimality(parse_model(text))
        assert result.check == "minimality-cycle"
        assert "->" in result.message

    def test_d_squared_first(self):
        """Test that d^2 != 0 is reported before minimality."""
        text = "[algebra]\na 2\nc 2\nb 3\n[differential]\nc = b\nb = a^2\n[relative]\nbase = a\nfiber = c, b\n"
        result = verify_minimality(parse_model(text))
        assert result.check == "d-squared"


class TestCohomology:
    """Tests for GradedCohomology."""

    def test_hopf_total_is_s3(self):
        """Test that the Hopf total algebra has the cohomology of S^3."""
        model = parse_model(HOPF)
        assert cohomology(model.algebra, 6).dims() == [1, 0, 0, 1, 0, 0, 0]

    def test_s2_base(self):
        """Test the cohomology of the minimal model of S^2."""
        model = parse_model(HOPF)
        assert cohomology(model.base_algebra, 5).dims() == [1, 0, 1, 0, 0, 0]

    def test_cp2_products(self):
        """Test that the square of the generator of H^2(CP^2) is nonzero."""
        h = cohomology(parse_model(CP2).algebra, 6)
        assert h.dims() == [1, 0, 1, 0, 1, 0, 0]
        assert any(h.product(2, 0, 2, 0))

    def test_classify_boundary(self):
        """Test that a coboundary classifies to zero."""
        model = parse_model(HOPF)
        h = cohomology(model.algebra, 6)
        assert not any(h.classify(element("x^2", model.algebra), 4))

    def test_cap_limit(self):
        """Test that the cohomology cap stays below the algebra cap."""
        algebra = parse_model(HOPF, cap=5).algebra
        with pytest.raises(CapExceededError):
            cohomology(algebra, 5)
        with pytest.raises(CapExceededError):
            cohomology(algebra, 4).dimension(5)

    def test_linear_homology(self):
        """Test homology of the indecomposables."""
        model = parse_model(HOPF)
        assert linear_part_homology(model, 4).dims() == [0, 0, 0, 1, 0]


class TestQuasiIso:
    """Tests for verify_quasi_iso and verify_isomorphism_pair."""

    @pytest.fixture
    def hopf(self):
        return parse_model(HOPF).algebra

    @pytest.fixture
    def s3(self):
        algebra = FreeCDGA([("y", 3)], cap=7, name="S3")
        algebra.set_differential({})
        return algebra

    def test_minimal_model_of_total(self, s3, hopf):
        """Test that y -> y - x*xbar is a quasi-isomorphism."""
        m = Morphism(s3, hopf, {"y": element("y - x*xbar", hopf)})
        assert verify_quasi_iso(m)

    def test_not_quasi_iso(self, s3, hopf):
        """Test that the zero map is not a quasi-isomorphism."""
        result = verify_quasi_iso(Morphism(s3, hopf, {}))
        assert not result
        assert result.details["degree"] == 3

    def test_isomorphism_pair(self, hopf):
        """Test an automorphism and its inverse."""
        f = Morphism(hopf, hopf, {"x": element("-x", hopf), "y": element("y", hopf), "xbar": element("-xbar", hopf)})
        assert verify_isomorphism_pair(f, f)

    def test_not_inverse(self, hopf):
        """Test that a non-inverse pair is rejected."""
        f = Morphism(hopf, hopf, {"x": element("-x", hopf), "y": element("y", hopf), "xbar": element("-xbar", hopf)})
        identity = Morphism(hopf, hopf, {n: hopf.gen(n) for n in hopf.names()})
        result = verify_isomorphism_pair(f, identity)
        assert not result
        assert result.generator == "x"
