"""
Worked models with their expected distances, barcodes and bounds.

Entries come from two places:
- corpus/index.yaml lists fixed entries built from the model, certificate,
  family and formality files next to it
- TEMPLATES generate parametrised entries such as `s1_bundle(2,3,1)` as text,
  which is parsed with the same parser as user files

check_entry reproduces every expected value of one entry; run_corpus runs the
whole corpus and the corpus-wide consistency properties.
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
import yaml
from sympy import Rational

from .cdga import DEFAULT_T_DEGREE_CAP, CheckResult, Element
from .config import DEFAULT_CONFIG
from .distances import (
    bound_basepoint,
    bound_N,
    bound_path_fibration,
    bound_wht,
    d_cohi_module,
    format_distance,
)
from .errors import PersistenceCDGAError, UnknownEntryError
from .fields import Field, get_field
from .interleaving import (
    AutomorphismFamily,
    InterleavingCertificate,
    ObstructionReport,
    ZigzagArrow,
    lower_bound_scan,
    obstruct,
    verify_certificate,
    verify_family,
    verify_h_formality_certificate,
)
from .parser import parse_certificate, parse_family, parse_formality, parse_model, top_degree
from .persistence import (
    Bar,
    Barcode,
    PersistenceCDGA,
    barcode,
    build_theta,
    persistence_cohomology,
    to_rational,
)
from .sullivan import RelativeSullivanModel, verify_minimality

logger = logging.getLogger(__name__)

CORPUS_DIR = Path(__file__).parent / "corpus"
INDEX_FILE = CORPUS_DIR / "index.yaml"

# (file name, text)
SourceFile = Tuple[str, str]


@dataclass
class EntrySource:
    """Unparsed texts and expectations of one corpus entry."""

    provenance: str
    models: List[SourceFile]
    certificates: List[SourceFile] = field(default_factory=list)
    family: Optional[SourceFile] = None
    formality: Optional[SourceFile] = None
    expected: Dict[str, Any] = field(default_factory=dict)
    field: Optional[str] = None


@dataclass
class CorpusEntry:
    """A parsed, validated corpus entry.

    Args:
        name: Registered name
        provenance: Where the models come from
        field: Coefficient field of every model
        models: F (and G for pair entries)
        thetas: The persistence CDGAs of the models
        certificates: Interleaving certificates between thetas[0] and thetas[1]
        family: Automorphism family of the common base, if any
        formality: (zigzag, projection) of an H-formality certificate for thetas[0]
        expected: Values the engine must reproduce
        cap: Cohomology degree cap used for every computation
    """

    name: str
    provenance: str
    field: Field
    models: List[RelativeSullivanModel]
    thetas: List[PersistenceCDGA]
    certificates: List[InterleavingCertificate] = field(default_factory=list)
    family: Optional[AutomorphismFamily] = None
    formality: Optional[Tuple[List[ZigzagArrow], Optional[Dict[str, Element]]]] = None
    expected: Dict[str, Any] = field(default_factory=dict)
    cap: int = 0

    @property
    def is_pair(self) -> bool:
        return len(self.thetas) == 2

    @property
    def truncated(self) -> bool:
        return any(t.truncated for t in self.thetas)


# ----------------------------------------------------------------------
# Text builders for the templates
# ----------------------------------------------------------------------


def _model_text(
    comment: str,
    generators: Sequence[Tuple[str, int]],
    differential: Mapping[str, str],
    base: Sequence[str],
    truncated: Optional[int] = None,
) -> str:
    names = [g for g, _ in generators]
    lines = [f"# {comment}", "[algebra]"]
    lines.extend(f"{g} {degree}" for g, degree in generators)
    lines += ["", "[differential]"]
    lines.extend(f"{g} = {differential[g]}" for g in names if g in differential)
    fiber = [g for g in names if g not in base]
    lines += [
        "",
        "[relative]",
        f"base = {', '.join(base) or '-'}",
        f"fiber = {', '.join(fiber) or '-'}",
    ]
    if truncated is not None:
        lines += ["", "[truncated]", str(truncated)]
    return "\n".join(lines) + "\n"


Body = Union[None, str, Mapping[str, str]]


def _certificate_text(
    comment: str,
    epsilon: Any,
    phi: Body = None,
    psi: Body = None,
    homotopy_F: Body = None,
    homotopy_G: Body = None,
) -> str:
    """Certificate text; a missing map is zero and a missing homotopy is the identity."""
    lines = [f"# {comment}", "[certificate]", f"epsilon = {epsilon}"]
    for header, body in (("phi", phi), ("psi", psi), ("homotopy_F", homotopy_F), ("homotopy_G", homotopy_G)):
        if body is None:
            continue
        lines += ["", f"[{header}]"]
        if isinstance(body, str):
            lines.append(body)
        else:
            lines.extend(f"{g} = {image}" for g, image in body.items())
    return "\n".join(lines) + "\n"


def _half(value: Any) -> str:
    return str(to_rational(value))


def _natural_arg(value: Any, name: str, template: str, least: int = 1) -> int:
    if not isinstance(value, int) or value < least:
        raise UnknownEntryError(f"{template}: {name} must be an integer ≥ {least}, got {value!r}")
    return value


# Models shared by several templates


def _even_path_fibration(n: int) -> Tuple[List[Tuple[str, int]], Dict[str, str], Dict[str, str]]:
    """Generators, differential and contracting homotopy of PS^{2n} -> S^{2n}."""
    generators = [("x", 2 * n), ("y", 4 * n - 1), ("z", 2 * n - 1), ("w", 4 * n - 2)]
    differential = {"y": "x^2", "z": "x", "w": "x*z - y"}
    contraction = {"x": "x*t - z*dt", "z": "z*t", "y": "y*t^2 - 2*w*t*dt", "w": "w*t^2"}
    return generators, differential, contraction


def _odd_path_fibration(m: int) -> Tuple[List[Tuple[str, int]], Dict[str, str], Dict[str, str]]:
    """Generators, differential and contracting homotopy of PS^m -> S^m for odd m."""
    generators = [("u", m), ("v", m - 1)]
    return generators, {"v": "u"}, {"v": "v*t", "u": "u*t + v*dt"}


_EMPTY_MODEL = "# The point\n[algebra]\n\n[relative]\nbase = -\nfiber = -\n"


# ----------------------------------------------------------------------
# Templates
# ----------------------------------------------------------------------


def _even_sphere_trivial_vs_id(n: Any) -> EntrySource:
    n = _natural_arg(n, "n", "even_sphere_trivial_vs_id")
    a, b = 2 * n, 4 * n - 1
    generators, differential, contraction = _even_path_fibration(n)
    generators = generators + [("xp", a), ("yp", b)]
    differential = dict(differential, yp="xp^2")
    trivial = _model_text(f"Constant map S^{a} -> S^{a}", generators, differential, ["x", "y"])
    identity = _model_text(f"Identity of S^{a}", [("x", a), ("y", b)], {"y": "x^2"}, ["x", "y"])
    certificate = _certificate_text(
        f"{b}-interleaving between the constant map and the identity of S^{a}",
        b,
        phi={"xp": "x", "yp": "y"},
        psi={"x": "xp", "y": "yp"},
        homotopy_F=dict(contraction, xp="xp", yp="yp"),
    )
    return EntrySource(
        provenance=f"constant self-map of S^{a} against the identity",
        models=[(f"even_sphere_trivial_{n}.model", trivial), (f"even_sphere_id_{n}.model", identity)],
        certificates=[(f"even_sphere_{n}.cert", certificate)],
        expected={
            "d_ihc": b,
            "bound_N": b,
            "obstructions": {_half(Rational(2 * b - 1, 2)): ["ZeroFactorHQ"]},
        },
    )


def _odd_sphere_trivial_vs_id(n: Any) -> EntrySource:
    n = _natural_arg(n, "n", "odd_sphere_trivial_vs_id")
    a = 2 * n + 1
    trivial = _model_text(
        f"Constant map S^{a} -> S^{a}", [("x", a), ("y", a - 1), ("z", a)], {"y": "x"}, ["x"]
    )
    identity = _model_text(f"Identity of S^{a}", [("x", a)], {}, ["x"])
    certificate = _certificate_text(
        f"{a}-interleaving between the constant map and the identity of S^{a}",
        a,
        phi={"z": "x"},
        psi={"x": "z"},
        homotopy_F={"y": "y*t", "x": "x*t + y*dt", "z": "z"},
    )
    return EntrySource(
        provenance=f"constant self-map of S^{a} against the identity",
        models=[(f"odd_sphere_trivial_{n}.model", trivial), (f"odd_sphere_id_{n}.model", identity)],
        certificates=[(f"odd_sphere_{n}.cert", certificate)],
        expected={
            "d_ihc": a,
            "bound_N": a,
            "obstructions": {_half(Rational(2 * a - 1, 2)): ["ZeroFactorH"]},
        },
    )


_BASEPOINT_SPACES = {"S2": 2, "S3": 3, "S5": 5}


def _basepoint_inclusion(space: Any) -> EntrySource:
    if space not in _BASEPOINT_SPACES:
        raise UnknownEntryError(
            f"basepoint_inclusion: unknown space {space!r}, expected one of {', '.join(_BASEPOINT_SPACES)}"
        )
    dimension = _BASEPOINT_SPACES[space]
    if dimension % 2:
        generators, differential, contraction = _odd_path_fibration(dimension)
        base = ["u"]
    else:
        generators, differential, contraction = _even_path_fibration(dimension // 2)
        base = ["x", "y"]
    top_fiber = max(d for g, d in generators if g not in base)
    bound = Rational(top_fiber, 2)
    inclusion = _model_text(f"Inclusion of the base point of {space}", generators, differential, base)
    certificate = _certificate_text(
        f"Both sides are contractible from stage {top_fiber} on",
        _half(bound),
        homotopy_F=contraction,
    )
    return EntrySource(
        provenance=f"base point inclusion * -> {space} against the identity of the point",
        models=[(f"basepoint_{space}.model", inclusion), ("point.model", _EMPTY_MODEL)],
        certificates=[(f"basepoint_{space}.cert", certificate)],
        expected={
            "d_ihc": _half(bound),
            "bound_basepoint": _half(bound),
            "bound_N": top_fiber,
            "obstructions": {_half(bound - Rational(1, 2)): ["ZeroFactorHQ"]},
        },
    )


def _path_fibration_even(n: Any) -> EntrySource:
    n = _natural_arg(n, "n", "path_fibration_even")
    generators, differential, _ = _even_path_fibration(n)
    text = _model_text(f"Path fibration over S^{2 * n}", generators, differential, ["x", "y"])
    return EntrySource(
        provenance=f"path fibration PS^{2 * n} -> S^{2 * n}",
        models=[(f"path_fibration_s{2 * n}.model", text)],
        expected={
            "barcode": [[0, 0, "inf"], [2 * n, 0, 2 * n - 1], [4 * n - 1, 2 * n - 1, 4 * n - 2]],
        },
    )


def _path_fibration_odd(n: Any) -> EntrySource:
    # at n = 1 the fiber generator would sit in degree 0
    n = _natural_arg(n, "n", "path_fibration_odd", least=2)
    m = 2 * n - 1
    generators, differential, _ = _odd_path_fibration(m)
    text = _model_text(f"Path fibration over S^{m}", generators, differential, ["u"])
    return EntrySource(
        provenance=f"path fibration PS^{m} -> S^{m}",
        models=[(f"path_fibration_s{m}.model", text)],
        expected={"barcode": [[0, 0, "inf"], [m, 0, m - 1]]},
    )


def _bundle_text(k: int, n: int) -> str:
    top = 2 * n + 1
    if k:
        return _model_text(
            f"S^1-bundle over CP^{n} with Euler class {k}",
            [("u", 2), ("y", top)],
            {"y": f"u^{n + 1}/{k ** (n + 1)}"},
            ["u"],
        )
    return _model_text(
        f"Trivial S^1-bundle over CP^{n}",
        [("u", 2), ("z", 1), ("x", 2), ("y", top)],
        {"z": "u", "y": f"x^{n + 1}"},
        ["u"],
    )


def _s1_bundle(k: Any, l: Any, n: Any) -> EntrySource:
    k = _natural_arg(k, "k", "s1_bundle")
    l = _natural_arg(l, "l", "s1_bundle", least=0)  # noqa: E741
    n = _natural_arg(n, "n", "s1_bundle")
    power = k ** (n + 1)
    models = [(f"xi_{k}_{n}.model", _bundle_text(k, n)), (f"xi_{l}_{n}.model", _bundle_text(l, n))]
    if l:
        ratio = Rational(l, k) ** (n + 1)
        scale = f"{ratio.p}*y" if ratio.q == 1 else f"{ratio.p}/{ratio.q}*y"
        certificate = _certificate_text(
            "The two models are isomorphic", 0, phi={"u": "u", "y": scale}, psi="inverse"
        )
        expected: Dict[str, Any] = {"d_ihc": 0}
    else:
        certificate = _certificate_text(
            "2-interleaving with the trivial bundle",
            2,
            phi={"u": "x", "y": f"y/{power}"},
            psi={"x": "u", "y": f"{power}*y"},
            homotopy_G={"z": "z*t", "u": "u*t - z*dt", "x": "x", "y": "y"},
        )
        expected = {"d_ihc": 2, "obstructions": {"3/2": ["ZeroFactorH"]}}
    return EntrySource(
        provenance=f"S^1-bundles over CP^{n} with Euler classes {k} and {l}",
        models=models,
        certificates=[(f"xi_{k}_{l}_{n}.cert", certificate)],
        expected=expected,
    )


_WEDGE_GENERATORS = [("x", 3), ("y", 3), ("z", 5), ("u", 7), ("w", 7)]
_WEDGE_DIFFERENTIAL = {"z": "x*y", "u": "x*z", "w": "y*z"}


def _wedge_text(comment: str, k: int, base: Sequence[str]) -> str:
    generators = [(g, d) for g, d in _WEDGE_GENERATORS if d <= k]
    names = {g for g, _ in generators}
    return _model_text(comment, generators, _WEDGE_DIFFERENTIAL, [g for g in base if g in names], k)


def _wedge_k(k: Any, template: str) -> int:
    k = _natural_arg(k, "k", template, least=3)
    if k > 7:
        raise UnknownEntryError(f"{template}: the wedge model is only written out through degree 7")
    return k


def _wedge_collapse_vs_const(k: Any) -> EntrySource:
    k = _wedge_k(k, "wedge_s3s3_collapse_vs_const")
    collapse = _wedge_text("Collapse of the second sphere of S^3 v S^3", k, ["x"])
    constant = _wedge_text("Constant map out of S^3 v S^3", k, [])
    certificate = _certificate_text("Identities interleave from 3 on", 3, "by-name", "by-name")
    return EntrySource(
        provenance=f"S^3 v S^3 -> S^3 against S^3 v S^3 -> *, minimal model through degree {k}",
        models=[(f"wedge_collapse_{k}.model", collapse), (f"wedge_const_{k}.model", constant)],
        certificates=[(f"wedge_collapse_{k}.cert", certificate)],
        expected={"d_ihc": 3, "truncated": True, "obstructions": {"5/2": ["ZeroFactorH"]}},
    )


def _wedge_id_vs_const(k: Any) -> EntrySource:
    k = _wedge_k(k, "wedge_s3s3_id_vs_const")
    names = [g for g, _ in _WEDGE_GENERATORS]
    identity = _wedge_text("Identity of S^3 v S^3", k, names)
    constant = _wedge_text("Constant map out of S^3 v S^3", k, [])
    certificate = _certificate_text(f"Identities interleave the truncations from {k} on", k, "by-name", "by-name")
    return EntrySource(
        provenance=f"identity of S^3 v S^3 against the constant map, minimal model through degree {k}",
        models=[(f"wedge_id_{k}.model", identity), (f"wedge_const_{k}.model", constant)],
        certificates=[(f"wedge_id_{k}.cert", certificate)],
        expected={"d_ihc": k, "truncated": True},
    )


Template = Callable[..., EntrySource]

TEMPLATES: Dict[str, Tuple[Template, List[Tuple[Any, ...]]]] = {
    "even_sphere_trivial_vs_id": (_even_sphere_trivial_vs_id, [(1,), (2,)]),
    "odd_sphere_trivial_vs_id": (_odd_sphere_trivial_vs_id, [(1,), (2,)]),
    "basepoint_inclusion": (_basepoint_inclusion, [("S2",), ("S3",), ("S5",)]),
    "path_fibration_even": (_path_fibration_even, [(1,), (2,)]),
    "path_fibration_odd": (_path_fibration_odd, [(2,), (3,)]),
    "s1_bundle": (
        _s1_bundle,
        [(k, l, n) for n in (1, 2) for k, l in ((1, 2), (1, 3), (2, 3), (1, 0), (2, 0), (3, 0))],
    ),
    "wedge_s3s3_collapse_vs_const": (_wedge_collapse_vs_const, [(3,), (5,), (7,)]),
    "wedge_s3s3_id_vs_const": (_wedge_id_vs_const, [(3,), (5,), (7,)]),
}

# Templates over truncations whose lower bound must not decrease as the truncation grows
TRUNCATION_SERIES = ("wedge_s3s3_id_vs_const",)

_INSTANCE = re.compile(r"^([A-Za-z0-9_]+)\((.*)\)$")


def instance_name(template: str, args: Sequence[Any]) -> str:
    return f"{template}({','.join(str(a) for a in args)})"


def _parse_argument(text: str) -> Any:
    text = text.strip()
    return int(text) if re.fullmatch(r"-?\d+", text) else text


# ----------------------------------------------------------------------
# Lookup
# ----------------------------------------------------------------------


def load_index(path: Optional[Path] = None) -> Dict[str, Dict[str, Any]]:
    path = path or INDEX_FILE
    with open(path, encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def names() -> List[str]:
    """Every registered entry: the index entries, then each template instance."""
    result = list(load_index())
    for template, (_, instances) in TEMPLATES.items():
        result.extend(instance_name(template, args) for args in instances)
    return result


def _read(file_name: str) -> SourceFile:
    return file_name, (CORPUS_DIR / file_name).read_text(encoding="utf-8")


def source(name: str) -> EntrySource:
    """The unparsed texts of an entry."""
    index = load_index()
    if name in index:
        item = index[name]
        return EntrySource(
            provenance=item.get("provenance", ""),
            models=[_read(f) for f in item["models"]],
            certificates=[_read(f) for f in item.get("certificates", [])],
            family=_read(item["family"]) if item.get("family") else None,
            formality=_read(item["formality"]) if item.get("formality") else None,
            expected=dict(item.get("expected") or {}),
            field=item.get("field"),
        )
    match = _INSTANCE.match(name.strip())
    if match and match.group(1) in TEMPLATES:
        template, _ = TEMPLATES[match.group(1)]
        args = [_parse_argument(a) for a in match.group(2).split(",") if a.strip()]
        try:
            return template(*args)
        except TypeError as e:
            raise UnknownEntryError(f"{match.group(1)}: {e}") from None
    known = ", ".join(list(index) + [f"{t}(...)" for t in TEMPLATES])
    raise UnknownEntryError(f"Unknown corpus entry '{name}'. Known entries: {known}")


def get(
    name: str,
    field: Optional[Union[str, Field]] = None,
    cap_margin: int = 3,
    t_cap: int = DEFAULT_T_DEGREE_CAP,
) -> CorpusEntry:
    """Parse and validate an entry.

    Every model of the entry shares one cap: the largest generator degree plus
    cap_margin for cohomology, one more for the algebras.
    """
    src = source(name)
    if field is None and src.field is not None:
        field = src.field
    field_ = get_field(field) if isinstance(field, str) else field
    top = max(top_degree(text, file_name) for file_name, text in src.models)
    cap = top + cap_margin
    models = [
        parse_model(text, str(CORPUS_DIR / file_name), field_, cap + 1, Path(file_name).stem)
        for file_name, text in src.models
    ]
    thetas = [build_theta(m) for m in models]
    certificates = []
    if src.certificates:
        if len(thetas) != 2:
            raise UnknownEntryError(f"Corpus entry '{name}' has certificates but not two models")
        certificates = [
            parse_certificate(text, thetas[0], thetas[1], str(CORPUS_DIR / file_name), t_cap)
            for file_name, text in src.certificates
        ]
    family = None
    if src.family is not None:
        family = parse_family(src.family[1], thetas[0].stage(0), str(CORPUS_DIR / src.family[0]))
    formality = None
    if src.formality is not None:
        formality = parse_formality(src.formality[1], thetas[0], str(CORPUS_DIR / src.formality[0]), CORPUS_DIR)
    entry = CorpusEntry(
        name,
        src.provenance,
        models[0].field,
        models,
        thetas,
        certificates,
        family,
        formality,
        src.expected,
        cap,
    )
    logger.debug(f"Loaded corpus entry {name}: {[m.label for m in models]}, cap {cap}")
    return entry


# ----------------------------------------------------------------------
# Checking
# ----------------------------------------------------------------------


@dataclass
class EntryResult:
    name: str
    checks: List[CheckResult]
    lower: Optional[sympy.Rational] = None
    upper: Optional[sympy.Rational] = None
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return all(self.checks)

    def __bool__(self) -> bool:
        return self.ok

    def format_lines(self) -> List[str]:
        header = f"{self.name}: {'ok' if self.ok else 'FAILED'}"
        if self.lower is not None or self.upper is not None:
            lower = "-" if self.lower is None else format_distance(self.lower)
            upper = "-" if self.upper is None else format_distance(self.upper)
            header += f" (d_IHC in [{lower}, {upper}])"
        if self.truncated:
            header += " truncated (bound only)"
        lines = [header]
        for check in self.checks:
            if not check.ok:
                lines.append(f"  [FAIL] {check.check}: {check.message}")
        return lines

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "ok": self.ok,
            "lower": None if self.lower is None else str(self.lower),
            "upper": None if self.upper is None else str(self.upper),
            "truncated": self.truncated,
            "checks": [c.to_dict() for c in self.checks],
        }


def _expect_equal(check: str, actual: Any, expected: Any) -> CheckResult:
    if sympy.sympify(actual) == to_rational(expected):
        return CheckResult.passed(check, f"{format_distance(actual)}")
    return CheckResult.failed(
        check, f"expected {expected}, got {format_distance(actual)}", expected=expected, actual=actual
    )


def _expected_barcode(rows: Sequence[Sequence[Any]]) -> Barcode:
    bars = []
    for degree, birth, death in rows:
        bars.append(Bar(int(degree), int(birth), None if death in ("inf", None) else int(death)))
    return Barcode(bars)


def _report_at(
    reports: Sequence[ObstructionReport], eps: sympy.Rational, entry: CorpusEntry, solver: Mapping[str, Any]
) -> ObstructionReport:
    for report in reports:
        if report.epsilon == eps:
            return report
    F, G = entry.thetas
    return obstruct(F, G, eps, entry.cap, entry.family, solver=solver)


def check_entry(entry: CorpusEntry, config: Optional[Mapping[str, Any]] = None) -> EntryResult:
    """Reproduce every expected value of an entry and the consistency properties between them."""
    config = config or DEFAULT_CONFIG
    obstruction = config.get("obstruction", {})
    solver = {
        "max_witness_variables": obstruction.get("max_witness_variables", 4),
        "witness_values": obstruction.get("witness_values", [0, 1, -1]),
    }
    expected = entry.expected
    checks: List[CheckResult] = []
    cap = entry.cap

    for model in entry.models:
        result = verify_minimality(model)
        checks.append(CheckResult(result.ok, f"minimality {model.label}", result.message, result.generator))

    if "truncated" in expected and bool(expected["truncated"]) != entry.truncated:
        checks.append(CheckResult.failed("truncated", f"expected truncated = {expected['truncated']}"))

    if "barcode" in expected:
        actual = barcode(persistence_cohomology(entry.thetas[0], cap))
        wanted = _expected_barcode(expected["barcode"])
        if actual == wanted:
            checks.append(CheckResult.passed("barcode", "; ".join(actual.format_lines())))
        else:
            checks.append(
                CheckResult.failed(
                    "barcode",
                    f"expected {'; '.join(wanted.format_lines())}, got {'; '.join(actual.format_lines())}",
                )
            )

    first = entry.models[0]
    if "bound_N" in expected:
        checks.append(_expect_equal("bound_N", bound_N(first), expected["bound_N"]))
    if "bound_basepoint" in expected:
        checks.append(_expect_equal("bound_basepoint", bound_basepoint(first, cap), expected["bound_basepoint"]))
    if "bound_wht" in expected:
        bases = [m.base_algebra for m in entry.models]
        checks.append(_expect_equal("bound_wht", bound_wht(*bases), expected["bound_wht"]))
    if "bound_path_fibration" in expected:
        bases = [m.base_algebra for m in entry.models]
        checks.append(
            _expect_equal("bound_path_fibration", bound_path_fibration(*bases), expected["bound_path_fibration"])
        )

    if entry.family is not None and expected.get("family_check"):
        checks.append(verify_family(entry.family))

    if entry.formality is not None:
        zigzag, projection = entry.formality
        report = verify_h_formality_certificate(entry.thetas[0], zigzag, projection, cap)
        wanted = bool(expected.get("formality", True))
        message = "; ".join(c.message for c in report.failures) or "all checks pass"
        checks.append(CheckResult(report.ok == wanted, "formality", message))

    upper = None
    lower = None
    if entry.is_pair:
        F, G = entry.thetas
        verified = []
        for certificate in entry.certificates:
            report = verify_certificate(certificate, F, G, cap)
            failures = "; ".join(f"{c.check}: {c.message}" for c in report.failures)
            checks.append(
                CheckResult(report.ok, f"certificate {certificate.name}", failures or f"verified at {report.epsilon}")
            )
            if report.ok:
                verified.append(report.epsilon)
        upper = min(verified) if verified else None

        distance = d_cohi_module(F, G, cap)
        if "d_cohi" in expected:
            checks.append(_expect_equal("d_cohi", distance.value, expected["d_cohi"]))
        if upper is not None:
            ok = bool(distance.value <= upper)
            checks.append(
                CheckResult(
                    ok,
                    "d_cohi-below-upper",
                    f"d_CohI {format_distance(distance.value)} against upper bound {upper}",
                )
            )

        wants_scan = "lower_bound" in expected or "d_ihc" in expected or "obstructions" in expected
        if wants_scan:
            default_max = upper if upper is not None else obstruction.get("eps_max", 4)
            eps_max = to_rational(expected.get("eps_max", default_max))
            scan = lower_bound_scan(F, G, cap, eps_max, entry.family, solver)
            lower = scan.bound
            if "lower_bound" in expected:
                checks.append(_expect_equal("lower_bound", lower, expected["lower_bound"]))
            for eps, mechanisms in (expected.get("obstructions") or {}).items():
                report = _report_at(scan.reports, to_rational(eps), entry, solver)
                missing = sorted(set(mechanisms) - set(report.mechanisms))
                if missing:
                    checks.append(
                        CheckResult.failed(
                            f"obstruction at {eps}",
                            f"expected {missing} to fire, got {report.mechanisms or 'no obstruction'}",
                        )
                    )
                else:
                    checks.append(CheckResult.passed(f"obstruction at {eps}", ", ".join(report.mechanisms)))
            if upper is not None:
                checks.append(
                    CheckResult(bool(lower <= upper), "lower-below-upper", f"lower {lower}, upper {upper}")
                )
                for eps in verified:
                    report = _report_at(scan.reports, eps, entry, solver)
                    checks.append(
                        CheckResult(
                            not report.obstructed,
                            f"no-obstruction-at-certificate {eps}",
                            f"mechanisms {report.mechanisms}" if report.obstructed else "none fire",
                        )
                    )

        if "d_ihc" in expected:
            value = to_rational(expected["d_ihc"])
            ok = upper == value and lower == value
            checks.append(
                CheckResult(ok, "d_ihc", f"expected {value}, certified range [{lower}, {upper}]")
            )

    result = EntryResult(entry.name, checks, lower, upper, entry.truncated)
    logger.info(f"Corpus entry {entry.name}: {'ok' if result.ok else 'FAILED'}")
    return result


@dataclass
class CorpusReport:
    results: List[EntryResult]
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.results) and all(self.checks)

    def format_lines(self) -> List[str]:
        lines = []
        for result in self.results:
            lines.extend(result.format_lines())
        for check in self.checks:
            lines.append(f"{check.check}: {'ok' if check.ok else 'FAILED'} {check.message}")
        passed = sum(1 for r in self.results if r.ok)
        lines.append(f"{passed}/{len(self.results)} entries reproduce their expected values")
        return lines

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "entries": [r.to_dict() for r in self.results],
            "checks": [c.to_dict() for c in self.checks],
        }


def _truncation_checks(results: Mapping[str, EntryResult]) -> List[CheckResult]:
    checks = []
    for template in TRUNCATION_SERIES:
        _, instances = TEMPLATES[template]
        series = [(args, results.get(instance_name(template, args))) for args in instances]
        bounds = [(args, r.lower) for args, r in series if r is not None and r.lower is not None]
        if len(bounds) < 2:
            continue
        values = [b for _, b in bounds]
        ok = all(a <= b for a, b in zip(values, values[1:]))
        listing = ", ".join(f"{instance_name(template, args)}: {b}" for args, b in bounds)
        checks.append(CheckResult(ok, f"{template} nondecreasing", listing))
    return checks


def run_corpus(
    selected: Optional[Sequence[str]] = None,
    config: Optional[Mapping[str, Any]] = None,
    field: Optional[str] = None,
) -> CorpusReport:
    """Check the selected entries (all by default) and the truncation series among them."""
    config = config or DEFAULT_CONFIG
    engine = config.get("engine", {})
    results: Dict[str, EntryResult] = {}
    for name in selected or names():
        try:
            entry = get(name, field, engine.get("cap_margin", 3), engine.get("t_degree_cap", DEFAULT_T_DEGREE_CAP))
            results[name] = check_entry(entry, config)
        except PersistenceCDGAError as e:
            logger.error(f"Corpus entry {name} could not be loaded: {e}")
            results[name] = EntryResult(name, [CheckResult.failed("load", str(e))])
    return CorpusReport(list(results.values()), _truncation_checks(results))
