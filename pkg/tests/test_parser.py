"""
Tests for the text formats.
"""

import pytest

from persistence_cdga.errors import ParseError
from persistence_cdga.interleaving import verify_certificate
from persistence_cdga.parser import (
    parse_certificate,
    parse_expression,
    parse_family,
    parse_model,
    serialize_model,
    split_sections,
    top_degree,
)
from persistence_cdga.persistence import build_theta

HOPF = """\
# Hopf map
[field]
Q

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


class TestSections:
    """Tests for the section splitter."""

    def test_comments_and_blank_lines(self):
        """Test that comments and blank lines are skipped."""
        sections = split_sections("# header\n\n[Algebra]\nx 2  # trailing\n")
        assert [s.name for s in sections] == ["algebra"]
        assert sections[0].lines == [(4, "x 2")]

    def test_content_before_section(self):
        """Test the line number of stray content."""
        with pytest.raises(ParseError) as info:
            split_sections("x 2\n[algebra]\n", "m.model")
        assert info.value.line == 1
        assert str(info.value).startswith("m.model:1:")


class TestModels:
    """Tests for parse_model."""

    def test_hopf(self):
        """Test a complete model file."""
        model = parse_model(HOPF, name="hopf")
        algebra = model.algebra
        assert algebra.names() == ("x", "y", "xbar")
        assert model.base == ("x", "y")
        assert model.fiber == ("xbar",)
        assert algebra.differential_of("y") == algebra.gen("x") ** 2
        assert model.label == "hopf"

    def test_field_override(self):
        """Test that an explicit field wins over the [field] section."""
        assert parse_model(HOPF, field="Q(i)").field.name == "Q(i)"

    def test_default_field(self):
        """Test the fallback field of a file without [field]."""
        text = HOPF.replace("[field]\nQ\n", "")
        assert parse_model(text, default_field="Q(i)").field.name == "Q(i)"
        assert parse_model(text).field.name == "Q"

    def test_cap_section(self):
        """Test the [cap] section and the explicit cap argument."""
        text = HOPF + "\n[cap]\n9\n"
        assert parse_model(text).algebra.cap == 9
        assert parse_model(text, cap=5).algebra.cap == 5

    def test_stages_and_truncation(self):
        """Test the optional [stages] and [truncated] sections."""
        text = HOPF + "\n[stages]\nxbar = 2\n\n[truncated]\n4\n"
        model = parse_model(text)
        assert model.stages == {"xbar": 2}
        assert model.truncated == 4

    def test_empty_fiber(self):
        """Test the '-' placeholder for an empty list."""
        text = "[algebra]\nx 2\ny 3\n[differential]\ny = x^2\n[relative]\nbase = x, y\nfiber = -\n"
        assert parse_model(text).fiber == ()

    def test_serialize(self):
        """Test that the canonical text parses back to the same model."""
        model = parse_model(HOPF + "\n[stages]\nxbar = 2\n")
        again = parse_model(serialize_model(model))
        assert again.algebra.names() == model.algebra.names()
        assert again.stages == model.stages
        assert again.algebra.differential_of("xbar").format() == "x"

    @pytest.mark.parametrize(
        "text,line",
        [
            ("[algebra]\nx 2\n[bogus]\n", 3),
            ("[algebra]\nx 2\n[algebra]\ny 3\n", 3),
            ("[algebra]\nx two\n", 2),
            ("[algebra]\nx 2 3\n", 2),
            ("[algebra]\nx 2\n[differential]\nz = x\n", 4),
            ("[algebra]\nx 2\ny 3\n[differential]\ny = x^2 + w\n", 5),
            ("[algebra]\nx 2\ny 3\n[differential]\ny = x^2*t\n", 5),
            ("[algebra]\nx 2\n[relative]\nbottom = x\n", 4),
        ],
    )
    def test_errors_carry_line_numbers(self, text, line):
        """Test that malformed model files report the offending line."""
        with pytest.raises(ParseError) as info:
            parse_model(text, "bad.model")
        assert info.value.line == line
        assert info.value.source == "bad.model"

    def test_missing_algebra(self):
        """Test that [algebra] is required."""
        with pytest.raises(ParseError, match="Missing \\[algebra\\]"):
            parse_model("[field]\nQ\n")

    def test_top_degree(self):
        """Test the degree scan used to pick caps."""
        assert top_degree(HOPF) == 3
        assert top_degree("[algebra]\n") == 0
        with pytest.raises(ParseError):
            top_degree("[field]\nQ\n")


class TestExpressions:
    """Tests for parse_expression."""

    @pytest.fixture
    def algebra(self):
        return parse_model(HOPF, field="Q(i)").algebra

    def test_arithmetic(self, algebra):
        """Test products, powers, fractions and parentheses."""
        x, y = algebra.gen("x"), algebra.gen("y")
        value = parse_expression("1/2*x^2 - (x + 1)*y", algebra)
        assert value == x * x * algebra.scalar(algebra.field.rational(1, 2)) - x * y - y

    def test_imaginary_unit(self, algebra):
        """Test the Gaussian unit i."""
        value = parse_expression("i*x*i", algebra)
        assert value == -algebra.gen("x")

    def test_leading_sign(self, algebra):
        """Test a leading minus."""
        assert parse_expression("-x + x", algebra) == algebra.zero()

    @pytest.mark.parametrize("text", ["x/0", "(x + y", "x +", "", "x $ y", "x^y", "A.x"])
    def test_malformed(self, algebra, text):
        """Test that malformed expressions raise ParseError."""
        with pytest.raises(ParseError):
            parse_expression(text, algebra)

    def test_namespace(self, algebra):
        """Test namespaced names."""
        assert parse_expression("B.x", algebra, "B") == algebra.gen("x")
        with pytest.raises(ParseError, match="prefix"):
            parse_expression("A.x", algebra, "B")

    def test_interval(self, algebra):
        """Test that t and dt are accepted only in interval expressions."""
        value = parse_expression("x*t + xbar*dt", algebra, interval=True)
        assert value.evaluate(1) == algebra.gen("x")
        assert value.evaluate(0) == algebra.zero()


class TestCertificates:
    """Tests for parse_certificate."""

    @pytest.fixture
    def pair(self):
        return build_theta(parse_model(HOPF, name="F")), build_theta(parse_model(HOPF, name="G"))

    def test_keywords(self, pair):
        """Test the by-name, inverse and identity shorthands."""
        F, G = pair
        text = "[certificate]\nepsilon = 0\n[phi]\nby-name\n[psi]\ninverse\n[homotopy_F]\nidentity\n"
        certificate = parse_certificate(text, F, G)
        assert certificate.phi.image("y") == G.algebra.gen("y")
        assert certificate.psi.image("xbar") == F.algebra.gen("xbar")
        assert verify_certificate(certificate, F, G).ok

    def test_explicit_maps(self, pair):
        """Test namespaced images and the zero default."""
        F, G = pair
        text = "[certificate]\nepsilon = 1/2\n[phi]\nA.x = B.x\nA.y = B.y\n[psi]\nB.x = A.x\n"
        certificate = parse_certificate(text, F, G)
        assert str(certificate.epsilon) == "1/2"
        assert certificate.phi.image("xbar") == G.algebra.zero()
        assert certificate.psi.image("y") == F.algebra.zero()

    def test_wrong_namespace(self, pair):
        """Test that phi must map A names to B names."""
        F, G = pair
        with pytest.raises(ParseError) as info:
            parse_certificate("[certificate]\nepsilon = 1\n[phi]\nB.x = B.x\n", F, G)
        assert info.value.line == 4

    def test_missing_epsilon(self, pair):
        """Test that epsilon is required."""
        F, G = pair
        with pytest.raises(ParseError, match="epsilon"):
            parse_certificate("[certificate]\nt_cap = 3\n", F, G)
        with pytest.raises(ParseError, match="rational"):
            parse_certificate("[certificate]\nepsilon = one\n", F, G)

    def test_inverse_of_singular_map(self, pair):
        """Test that 'inverse' needs an invertible phi."""
        F, G = pair
        with pytest.raises(ParseError, match="inverse"):
            parse_certificate("[certificate]\nepsilon = 0\n[phi]\nA.x = B.x\n[psi]\ninverse\n", F, G)


class TestFamilies:
    """Tests for parse_family."""

    @pytest.fixture
    def base(self):
        return parse_model("[algebra]\nx 2\ny 3\n[differential]\ny = x^2\n").algebra

    def test_parse(self, base):
        """Test parameters, choices and nonzero conditions."""
        text = "[family]\nparameters = a\nchoices = s: 1, -1\nnonzero = a\n[map]\nx = s*a*x\ny = a^2*y\n"
        family = parse_family(text, base)
        assert family.parameters == ("a",)
        assert len(family.choice_assignments()) == 2
        member = family.specialize({"a": 2, "s": -1})
        assert member.image("x") == base.gen("x") * -2
        assert not family.admissible({"a": 0, "s": 1})

    def test_parameter_clash(self, base):
        """Test that parameters may not shadow generators."""
        with pytest.raises(ParseError, match="clash"):
            parse_family("[family]\nparameters = x\n[map]\nx = x\n", base)

    def test_sections_required(self, base):
        """Test that both sections are required."""
        with pytest.raises(ParseError):
            parse_family("[family]\nparameters = a\n", base)
