"""
Tests for interleaving certificates, obstructions and H-formality.
"""

import pytest
from sympy import Rational

from persistence_cdga.corpus import CORPUS_DIR
from persistence_cdga.errors import ModelError
from persistence_cdga.interleaving import (
    AUTOMORPHISM_FAMILY,
    EXISTS_WITNESS,
    ONLY_TRIVIAL,
    ZERO_FACTOR_HQ,
    algebra_map_space,
    lower_bound_scan,
    obstruct,
    verify_certificate,
    verify_family,
    verify_h_formality_certificate,
)
from persistence_cdga.parser import (
    load_certificate,
    load_family,
    load_formality,
    load_model,
    parse_certificate,
    parse_expression,
    parse_model,
)
from persistence_cdga.persistence import build_theta
from persistence_cdga.sullivan import cohomology

CP2 = "[algebra]\nx 2\nz 5\n[differential]\nz = x^3\n[relative]\nbase = x, z\nfiber = -\n"
S2 = "[algebra]\nx 2\ny 3\n[differential]\ny = x^2\n[relative]\nbase = x, y\nfiber = -\n"


def theta(name, field=None, cap=7):
    return build_theta(load_model(CORPUS_DIR / f"{name}.model", field, cap))


@pytest.fixture
def constant_and_hopf():
    return theta("hopf_trivial"), theta("hopf")


class TestCertificates:
    """Tests for verify_certificate."""

    def test_hopf_vs_constant(self, constant_and_hopf):
        """Test the 3-interleaving between the constant map and the Hopf map."""
        F, G = constant_and_hopf
        certificate = load_certificate(CORPUS_DIR / "hopf_vs_trivial.cert", F, G)
        report = verify_certificate(certificate, F, G)
        assert report.ok, report.format_lines()
        assert report.epsilon == 3
        assert report.format_lines()[0] == "interleaving certificate at epsilon 3: verified"

    def test_smaller_epsilon_rejected(self, constant_and_hopf):
        """Test that the same maps do not shift stages by only 2."""
        F, G = constant_and_hopf
        text = (CORPUS_DIR / "hopf_vs_trivial.cert").read_text(encoding="utf-8")
        certificate = parse_certificate(text.replace("epsilon = 3", "epsilon = 2"), F, G)
        report = verify_certificate(certificate, F, G)
        assert not report.ok
        assert "stage-shift-psi" in [c.check for c in report.failures]

    def test_swapped_models_rejected(self, constant_and_hopf):
        """Test that a certificate must connect the given colimits."""
        F, G = constant_and_hopf
        certificate = load_certificate(CORPUS_DIR / "hopf_vs_trivial.cert", F, G)
        report = verify_certificate(certificate, G, F)
        assert not report.ok
        assert report.checks[0].check == "certificate-algebras"

    def test_hopf_vs_its_cohomology(self):
        """Test the 1-interleaving between Hopf and its cohomology replacement."""
        F, G = theta("hopf"), theta("hopf_cohomology")
        certificate = load_certificate(CORPUS_DIR / "hopf_vs_its_cohomology.cert", F, G)
        assert verify_certificate(certificate, F, G).ok

    def test_gaussian_isomorphism(self):
        """Test that the connected-sum models are isomorphic over Q(i)."""
        F, G = theta("connected_sum_f1", "Q(i)"), theta("connected_sum_f2", "Q(i)")
        certificate = load_certificate(CORPUS_DIR / "connected_sum_gaussian.cert", F, G)
        report = verify_certificate(certificate, F, G)
        assert report.ok, report.format_lines()
        assert report.epsilon == 0

    def test_to_dict(self, constant_and_hopf):
        """Test structured certificate reports."""
        F, G = constant_and_hopf
        certificate = load_certificate(CORPUS_DIR / "hopf_vs_trivial.cert", F, G)
        data = verify_certificate(certificate, F, G).to_dict()
        assert data["ok"] is True
        assert data["epsilon"] == "3"
        assert all(check["ok"] for check in data["checks"])


class TestAlgebraMaps:
    """Tests for algebra_map_space."""

    @pytest.fixture
    def cp2(self):
        return cohomology(parse_model(CP2).algebra, 6)

    @pytest.fixture
    def s2(self):
        return cohomology(parse_model(S2).algebra, 6)

    def test_missing_degree(self, cp2, s2):
        """Test that H^4 has nowhere to go in H(S^2)."""
        verdict = algebra_map_space(cp2, s2, [4])
        assert verdict.kind == ONLY_TRIVIAL
        assert verdict.degree == 4

    def test_nonzero_map_exists(self, cp2, s2):
        """Test that H(CP^2) -> H(S^2) can be nonzero in degree 2."""
        verdict = algebra_map_space(cp2, s2, [2])
        assert verdict.kind == EXISTS_WITNESS

    def test_nilpotent_obstruction(self, cp2, s2):
        """Test that H(S^2) -> H(CP^2) must kill degree 2 since x^2 = 0 in S^2."""
        verdict = algebra_map_space(s2, cp2, [2])
        assert verdict.only_trivial
        assert verdict.degree == 2


class TestObstructions:
    """Tests for obstruct and lower_bound_scan."""

    def test_linear_rank_obstruction(self, constant_and_hopf):
        """Test that no 5/2-interleaving exists because of linear homology ranks."""
        F, G = constant_and_hopf
        report = obstruct(F, G, "5/2", cap=6)
        assert report.obstructed
        assert report.pattern == (2, 5)
        assert ZERO_FACTOR_HQ in report.mechanisms
        assert report.inconclusive == []

    def test_lower_bound(self, constant_and_hopf):
        """Test that the scan reaches the certified value."""
        F, G = constant_and_hopf
        scan = lower_bound_scan(F, G, 6, 3)
        assert scan.bound == 3
        assert len(scan.reports) == 7
        assert not scan.saturated
        assert scan.to_dict()["lower_bound"] == "3"

    def test_nothing_at_zero_distance(self):
        """Test that a model is not obstructed from itself."""
        F = theta("hopf")
        report = obstruct(F, theta("hopf"), 0, cap=6)
        assert not report.obstructed
        assert report.verdict == "NoObstructionFound"

    def test_field_mismatch(self):
        """Test that models over different fields are not compared."""
        with pytest.raises(ModelError):
            obstruct(theta("hopf"), theta("hopf", "Q(i)"), 1)


class TestAutomorphismFamily:
    """Tests for trusted automorphism families."""

    @pytest.fixture
    def models(self):
        return theta("connected_sum_f1"), theta("connected_sum_f2")

    @pytest.fixture
    def family(self, models):
        return load_family(CORPUS_DIR / "connected_sum.family", models[0].stage(0))

    def test_family_is_valid(self, family):
        """Test the forward check of the family."""
        assert verify_family(family)

    def test_specialize(self, family):
        """Test a member of the family."""
        member = family.specialize({"lam": 1, "mu": 0, "sigma": -1})
        base = family.base
        assert member.image("x2") == parse_expression("-x2", base)
        assert not family.admissible({"lam": 1, "mu": 1, "sigma": 1})

    def test_family_obstruction(self, models, family):
        """Test that no member matches the two filtrations over Q."""
        F, G = models
        report = obstruct(F, G, 0, cap=6, family=family)
        assert AUTOMORPHISM_FAMILY in report.mechanisms

    def test_lower_bound_with_family(self, models, family):
        """Test the resulting lower bound."""
        F, G = models
        assert lower_bound_scan(F, G, 6, 0, family).bound == Rational(1, 2)


class TestFormality:
    """Tests for H-formality certificates."""

    def test_cohomology_replacement(self):
        """Test the projection of the Hopf cohomology replacement."""
        F = theta("hopf_cohomology")
        zigzag, projection = load_formality(CORPUS_DIR / "hopf_cohomology.formality", F)
        report = verify_h_formality_certificate(F, zigzag, projection, 6)
        assert report.ok, report.format_lines()
        assert report.kind == "H-formality"

    def test_projection_needs_cocycles(self):
        """Test that representatives must be cocycles."""
        F = theta("hopf_cohomology")
        algebra = F.algebra
        projection = {"x": algebra.gen("x"), "ytilde": algebra.gen("y")}
        report = verify_h_formality_certificate(F, [], projection, 6)
        assert not report.ok
        assert report.failures[0].check == "projection-cocycle"

    def test_nonzero_differential_without_projection(self):
        """Test that an empty zig-zag needs a zero differential."""
        F = theta("hopf_cohomology")
        report = verify_h_formality_certificate(F, [], None, 6)
        assert report.failures[0].check == "zero-differential"

    def test_projection_above_cap_is_bounded(self):
        """Test that d(y) beyond the cap is reported as unchecked rather than passed."""
        F = theta("hopf_cohomology")
        zigzag, projection = load_formality(CORPUS_DIR / "hopf_cohomology.formality", F)
        report = verify_h_formality_certificate(F, zigzag, projection, 3)
        names = [c.check for c in report.checks]
        assert "projection-chain" not in names
        bounded = next(c for c in report.checks if c.check == "projection-chain-bounded")
        assert bounded.details["unchecked"] == "y"
        assert "unchecked" in bounded.message

    def test_projection_within_cap_is_complete(self):
        """Test that a cap covering every d(g) gives the full chain check."""
        F = theta("hopf_cohomology")
        zigzag, projection = load_formality(CORPUS_DIR / "hopf_cohomology.formality", F)
        report = verify_h_formality_certificate(F, zigzag, projection, 6)
        assert "projection-chain" in [c.check for c in report.checks]
