"""
Tests for the worked-model corpus.
"""

import functools
import random

import pytest

from persistence_cdga import corpus
from persistence_cdga.cdga import Element, check_d_squared
from persistence_cdga.config import DEFAULT_CONFIG
from persistence_cdga.distances import d_cohi_module
from persistence_cdga.errors import UnknownEntryError
from persistence_cdga.persistence import Bar, Barcode, PersistenceModule, barcode, persistence_cohomology


class TestLookup:
    """Tests for entry names and sources."""

    def test_names(self):
        """Test that index entries come before template instances."""
        names = corpus.names()
        assert names[0] == "hopf_vs_trivial"
        assert "connected_sum_f1_vs_f2_gaussian" in names
        assert "s1_bundle(1,0,1)" in names
        assert "wedge_s3s3_collapse_vs_const(7)" in names
        assert len(names) == len(set(names))

    def test_unknown_entry(self):
        """Test that unknown names list the known ones."""
        with pytest.raises(UnknownEntryError, match="hopf_vs_trivial"):
            corpus.source("no_such_entry")

    @pytest.mark.parametrize(
        "name",
        [
            "path_fibration_odd(1)",
            "basepoint_inclusion(S4)",
            "s1_bundle(1,2)",
            "wedge_s3s3_id_vs_const(9)",
            "even_sphere_trivial_vs_id(x)",
        ],
    )
    def test_bad_template_arguments(self, name):
        """Test that template arguments are validated."""
        with pytest.raises(UnknownEntryError):
            corpus.source(name)

    def test_template_source(self):
        """Test the generated texts of a template instance."""
        src = corpus.source("s1_bundle(2,3,1)")
        assert [file_name for file_name, _ in src.models] == ["xi_2_1.model", "xi_3_1.model"]
        assert "y = u^2/4" in src.models[0][1]
        assert "y = 9/4*y" in src.certificates[0][1]
        assert src.expected == {"d_ihc": 0}

    def test_instance_name(self):
        """Test the instance name format."""
        assert corpus.instance_name("s1_bundle", (1, 0, 2)) == "s1_bundle(1,0,2)"


class TestGet:
    """Tests for parsing entries."""

    def test_index_entry(self):
        """Test an entry read from the index."""
        entry = corpus.get("hopf_vs_trivial")
        assert entry.is_pair
        assert entry.cap == 6
        assert [m.label for m in entry.models] == ["hopf_trivial", "hopf"]
        assert all(m.algebra.cap == 7 for m in entry.models)
        assert len(entry.certificates) == 1
        assert not entry.truncated

    def test_entry_field(self):
        """Test that an entry can fix its field."""
        entry = corpus.get("connected_sum_f1_vs_f2_gaussian")
        assert entry.field.name == "Q(i)"
        assert entry.family is not None

    def test_cap_margin(self):
        """Test the cap margin."""
        assert corpus.get("path_fibration_odd(2)", cap_margin=5).cap == 8

    def test_truncated_template(self):
        """Test that wedge entries are truncated."""
        assert corpus.get("wedge_s3s3_id_vs_const(3)").truncated


class TestCheckEntry:
    """Tests for reproducing expected values."""

    @pytest.mark.parametrize("name", corpus.names())
    def test_entry_reproduces(self, name):
        """Test that an entry reproduces its expected values."""
        result = corpus.check_entry(corpus.get(name), DEFAULT_CONFIG)
        assert result.ok, result.format_lines()

    def test_range(self):
        """Test the certified range of a pair entry."""
        result = corpus.check_entry(corpus.get("hopf_vs_trivial"))
        assert result.lower == 3
        assert result.upper == 3
        assert result.format_lines()[0] == "hopf_vs_trivial: ok (d_IHC in [3, 3])"

    def test_wrong_expectation(self):
        """Test that a changed expected value is reported."""
        entry = corpus.get("path_fibration_odd(2)")
        entry.expected = {"barcode": [[0, 0, "inf"]]}
        result = corpus.check_entry(entry)
        assert not result.ok
        assert [c.check for c in result.checks if not c.ok] == ["barcode"]

    def test_to_dict(self):
        """Test structured entry results."""
        data = corpus.check_entry(corpus.get("odd_sphere_trivial_vs_id(1)")).to_dict()
        assert data["ok"] is True
        assert data["lower"] == "3"
        assert data["upper"] == "3"


class TestRunCorpus:
    """Tests for run_corpus."""

    def test_selected_entries(self):
        """Test a run over a few entries with one unknown name."""
        report = corpus.run_corpus(["path_fibration_odd(2)", "no_such_entry"])
        assert not report.ok
        results = {r.name: r for r in report.results}
        assert results["path_fibration_odd(2)"].ok
        assert results["no_such_entry"].checks[0].check == "load"
        assert report.format_lines()[-1] == "1/2 entries reproduce their expected values"

    def test_truncation_series(self):
        """Test the nondecreasing lower bounds along a truncation series."""
        report = corpus.run_corpus(["wedge_s3s3_id_vs_const(3)", "wedge_s3s3_id_vs_const(5)"])
        assert [c.check for c in report.checks] == ["wedge_s3s3_id_vs_const nondecreasing"]
        assert report.checks[0].ok


@functools.lru_cache(maxsize=None)
def model_owners():
    """The first entry using each corpus model, keyed by label and field."""
    owners = {}
    for name in corpus.names():
        for model in corpus.get(name).models:
            owners.setdefault((model.label, model.field.name), name)
    return owners


def owned_thetas(name):
    entry = corpus.get(name)
    owners = model_owners()
    return entry, [
        theta
        for model, theta in zip(entry.models, entry.thetas)
        if owners[(model.label, model.field.name)] == name
    ]


def random_element(algebra, rng, degrees):
    degree = rng.choice(degrees)
    basis = algebra.basis(degree)
    terms = {}
    for _ in range(rng.randint(1, 2)):
        terms[rng.choice(basis)] = algebra.field.convert(rng.choice([-3, -2, -1, 1, 2, 3]))
    return degree, Element(algebra, terms)


class TestCorpusProperties:
    """Properties that hold for every model in the corpus."""

    @pytest.mark.parametrize("name", corpus.names())
    def test_graded_algebra_laws(self, name):
        """Test commutativity, Leibniz and d^2 = 0 on 1000 seeded random elements per algebra."""
        _, thetas = owned_thetas(name)
        for theta in thetas:
            algebra = theta.algebra
            assert check_d_squared(algebra)
            degrees = [d for d in range(1, min(algebra.cap, 8) + 1) if algebra.basis(d)]
            rng = random.Random(name)
            for _ in range(500):
                p, u = random_element(algebra, rng, degrees)
                q, v = random_element(algebra, rng, degrees)
                sign = -1 if p * q % 2 else 1
                assert u * v == sign * (v * u), (u.format(), v.format())
                leibniz = u.differential() * v + (-1 if p % 2 else 1) * (u * v.differential())
                assert (u * v).differential() == leibniz, (u.format(), v.format())
                assert not u.differential().differential()
                assert not v.differential().differential()

    @pytest.mark.parametrize("name", corpus.names())
    def test_barcode_matches_dimensions(self, name):
        """Test that bars alive at each stage count the cohomology in every degree up to the cap."""
        entry, thetas = owned_thetas(name)
        for theta in thetas:
            module = persistence_cohomology(theta, entry.cap)
            bars = barcode(module)
            for degree in range(entry.cap + 1):
                for s in range(module.last_stage + 1):
                    alive = sum(1 for bar in bars.in_degree(degree) if bar.contains(s))
                    assert alive == module.dimension(degree, s), (theta.label, degree, s)

    @pytest.mark.parametrize("name", corpus.names())
    def test_stage_truncation_restricts_barcode(self, name):
        """Test that dropping the last stages gives the restriction of the barcode."""
        entry, thetas = owned_thetas(name)
        for theta in thetas:
            module = persistence_cohomology(theta, entry.cap)
            full = barcode(module)
            for last in range(module.last_stage):
                shorter = PersistenceModule(
                    module.field,
                    module.cap,
                    last,
                    {n: dims[: last + 1] for n, dims in module.dims.items()},
                    {n: maps[:last] for n, maps in module.transitions.items()},
                    module.truncated,
                )
                restricted = [
                    Bar(bar.degree, bar.birth, None if bar.death is None or bar.death > last else bar.death)
                    for bar in full.bars
                    if bar.birth <= last
                ]
                assert barcode(shorter) == Barcode(restricted), (theta.label, last)

    @pytest.mark.parametrize("name", corpus.names())
    def test_self_distance_is_zero(self, name):
        """Test d_CohI(F, F) = 0."""
        entry, thetas = owned_thetas(name)
        for theta in thetas:
            assert d_cohi_module(theta, theta, entry.cap).value == 0
