"""
Text formats for models, certificates, automorphism families and formality certificates.

All files share one layout:
- Sections start with a header line `[name]` or `[name argument]`
- `#` starts a comment; blank lines are ignored
- Assignments are written `name = expression`

Element expressions are sums of products of generators, scalars, powers and
parenthesised sub-expressions, e.g. `x*v*(1 - t) - w*dt` or `1/2*x^2 + i*y`.
In certificate files a name may carry the namespace of its file (`A.` for the
first model, `B.` for the second); `t` and `dt` are only allowed in homotopies.
"""

import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .cdga import (
    DEFAULT_T_DEGREE_CAP,
    UNIT,
    Element,
    FreeCDGA,
    Homotopy,
    IntervalElement,
    Morphism,
    identity_morphism,
    inverse_morphism,
)
from .errors import ParseError, PersistenceCDGAError
from .fields import Field, get_field
from .interleaving import (
    BACKWARD,
    FORWARD,
    AutomorphismFamily,
    InterleavingCertificate,
    ZigzagArrow,
)
from .persistence import PersistenceCDGA, build_theta, to_rational
from .sullivan import RelativeSullivanModel

logger = logging.getLogger(__name__)

Value = Union[Element, IntervalElement]
SectionLine = Tuple[int, str]

FIRST = "A"
SECOND = "B"

_SECTION = re.compile(r"^\[\s*([A-Za-z_]+)(?:\s+([^\]]*?))?\s*\]$")
_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_']*(?:\.[A-Za-z_][A-Za-z0-9_']*)?)"
    r"|(?P<op>[-+*/^()]))"
)

MODEL_SECTIONS = ("field", "algebra", "differential", "relative", "stages", "cap", "truncated")


# ----------------------------------------------------------------------
# Sections
# ----------------------------------------------------------------------


class Section:
    """One `[name argument]` block with its numbered content lines."""

    def __init__(self, name: str, argument: str, line: int):
        self.name = name
        self.argument = argument
        self.line = line
        self.lines: List[SectionLine] = []

    def __repr__(self) -> str:
        return f"Section({self.name} {self.argument}, {len(self.lines)} lines)"

    def single(self, source: str) -> SectionLine:
        if len(self.lines) != 1:
            raise ParseError(f"Section [{self.name}] takes exactly one line", self.line, source)
        return self.lines[0]

    def assignments(self, source: str) -> List[Tuple[int, str, str]]:
        """`left = right` lines as (line, left, right)."""
        result = []
        for number, text in self.lines:
            left, sep, right = text.partition("=")
            if not sep or not left.strip() or not right.strip():
                raise ParseError(f"Expected 'name = value' in [{self.name}]", number, source)
            result.append((number, left.strip(), right.strip()))
        return result

    def keyword(self) -> Optional[str]:
        """The body when it is a single bare word such as `identity`."""
        if len(self.lines) == 1 and "=" not in self.lines[0][1]:
            return self.lines[0][1].strip()
        return None


def split_sections(text: str, source: str = "<text>") -> List[Section]:
    sections: List[Section] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _SECTION.match(line)
        if match:
            sections.append(Section(match.group(1).lower(), (match.group(2) or "").strip(), number))
            continue
        if not sections:
            raise ParseError(f"Content before the first section: '{line}'", number, source)
        sections[-1].lines.append((number, line))
    return sections


def _unique_sections(
    sections: Sequence[Section], allowed: Sequence[str], source: str
) -> Dict[str, Section]:
    result: Dict[str, Section] = {}
    for section in sections:
        if section.name not in allowed:
            raise ParseError(
                f"Unknown section [{section.name}], expected one of {', '.join(allowed)}",
                section.line,
                source,
            )
        if section.name in result:
            raise ParseError(f"Duplicate section [{section.name}]", section.line, source)
        result[section.name] = section
    return result


def _natural(text: str, line: int, source: str, what: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f"{what} must be a natural number, got '{text}'", line, source) from None
    if value < 0:
        raise ParseError(f"{what} must be a natural number, got '{text}'", line, source)
    return value


def _name_list(text: str) -> List[str]:
    return [name.strip() for name in text.split(",") if name.strip()]


# ----------------------------------------------------------------------
# Element expressions
# ----------------------------------------------------------------------


def _tokenize(text: str, line: Optional[int], source: str) -> List[Tuple[str, str]]:
    tokens = []
    position = 0
    while position < len(text):
        if text[position:].strip() == "":
            break
        match = _TOKEN.match(text, position)
        if not match or match.end() == position:
            bad = text[position:].strip()[0]
            raise ParseError(f"Unexpected character '{bad}' in '{text}'", line, source)
        kind = match.lastgroup or ""
        tokens.append((kind, match.group(kind)))
        position = match.end()
    return tokens


class _ExpressionParser:
    """Recursive descent over

    element := ['+'|'-'] term (('+'|'-') term)*
    term    := factor (('*' factor) | ('/' nat))*
    factor  := atom ['^' nat]
    atom    := name | nat | '(' element ')'
    """

    def __init__(
        self,
        text: str,
        algebra: FreeCDGA,
        namespace: Optional[str],
        parameters: Sequence[str],
        interval: bool,
        t_cap: int,
        line: Optional[int],
        source: str,
    ):
        self.text = text
        self.algebra = algebra
        self.namespace = namespace
        self.parameters = set(parameters)
        self.interval = interval
        self.t_cap = t_cap
        self.line = line
        self.source = source
        self.tokens = _tokenize(text, line, source)
        self.position = 0

    def error(self, message: str) -> ParseError:
        return ParseError(f"{message} in '{self.text}'", self.line, self.source)

    def peek(self) -> Optional[str]:
        if self.position < len(self.tokens):
            return self.tokens[self.position][1]
        return None

    def take(self) -> Tuple[str, str]:
        if self.position >= len(self.tokens):
            raise self.error("Unexpected end of expression")
        token = self.tokens[self.position]
        self.position += 1
        return token

    def parse(self) -> Value:
        if not self.tokens:
            raise self.error("Empty expression")
        value = self.element()
        if self.position < len(self.tokens):
            raise self.error(f"Unexpected '{self.tokens[self.position][1]}'")
        return value

    def element(self) -> Value:
        negative = False
        if self.peek() in ("+", "-"):
            negative = self.take()[1] == "-"
        value = self.term()
        if negative:
            value = -value
        while self.peek() in ("+", "-"):
            op = self.take()[1]
            right = self.term()
            value = value + right if op == "+" else value - right
        return value

    def term(self) -> Value:
        value = self.factor()
        while self.peek() in ("*", "/"):
            op = self.take()[1]
            if op == "*":
                value = value * self.factor()
            else:
                denominator = self.natural()
                if denominator == 0:
                    raise self.error("Division by zero")
                value = value.scale(self.algebra.field.rational(1, denominator))
        return value

    def factor(self) -> Value:
        value = self.atom()
        if self.peek() == "^":
            self.take()
            value = value ** self.natural()
        return value

    def natural(self) -> int:
        kind, text = self.take()
        if kind != "number":
            raise self.error(f"Expected a natural number, got '{text}'")
        return int(text)

    def atom(self) -> Value:
        kind, text = self.take()
        if text == "(":
            value = self.element()
            if self.peek() != ")":
                raise self.error("Missing ')'")
            self.take()
            return value
        if kind == "number":
            return self.algebra.scalar(int(text))
        if kind == "name":
            return self.resolve(text)
        raise self.error(f"Unexpected '{text}'")

    def resolve(self, token: str) -> Value:
        name = token
        if "." in token:
            prefix, name = token.split(".", 1)
            if prefix != self.namespace:
                expected = f"'{self.namespace}.'" if self.namespace else "no prefix"
                raise self.error(f"Name '{token}' has prefix '{prefix}.', expected {expected}")
        if name in ("t", "dt"):
            if not self.interval:
                raise self.error(f"'{name}' is only allowed in homotopy images")
            if name == "t":
                return IntervalElement.t(self.algebra, self.t_cap)
            return IntervalElement.dt(self.algebra, self.t_cap)
        if name == "i":
            return self.algebra.scalar(self.algebra.field.imaginary_unit)
        if name in self.parameters:
            return self.algebra.scalar(self.algebra.field.parameter(name))
        if not self.algebra.has_generator(name):
            raise self.error(f"Unknown generator '{name}' of {self.algebra.label}")
        return self.algebra.gen(name)


def parse_expression(
    text: str,
    algebra: FreeCDGA,
    namespace: Optional[str] = None,
    parameters: Sequence[str] = (),
    interval: bool = False,
    t_cap: int = DEFAULT_T_DEGREE_CAP,
    line: Optional[int] = None,
    source: str = "<expression>",
) -> Value:
    """Parse an element of algebra (or of algebra ⊗ ∧(t, dt) when interval is set)."""
    parser = _ExpressionParser(text, algebra, namespace, parameters, interval, t_cap, line, source)
    try:
        value = parser.parse()
    except ParseError:
        raise
    except PersistenceCDGAError as e:
        raise ParseError(f"{e} in '{text}'", line, source) from e
    if interval and isinstance(value, Element):
        return IntervalElement.constant(value, t_cap)
    return value


def _scalar_value(element: Value, line: int, source: str) -> Any:
    if not isinstance(element, Element) or set(element.terms) - {UNIT}:
        raise ParseError(f"Expected a scalar, got '{element}'", line, source)
    return element.coefficient(UNIT)


# ----------------------------------------------------------------------
# Model files
# ----------------------------------------------------------------------


def parse_model(
    text: str,
    source: str = "<model>",
    field: Optional[Union[str, Field]] = None,
    cap: Optional[int] = None,
    name: str = "",
    default_field: str = "Q",
) -> RelativeSullivanModel:
    """Parse a model file.

    Args:
        text: File contents
        source: File name used in error messages
        field: Overrides the [field] section
        cap: Algebra degree cap; overrides the [cap] section
        name: Model label (defaults to the file name)
        default_field: Field used when neither field nor a [field] section is given
    """
    sections = _unique_sections(split_sections(text, source), MODEL_SECTIONS, source)
    if "algebra" not in sections:
        raise ParseError("Missing [algebra] section", source=source)

    if field is None and "field" in sections:
        line, value = sections["field"].single(source)
        try:
            field_ = get_field(value)
        except PersistenceCDGAError as e:
            raise ParseError(str(e), line, source) from e
    elif isinstance(field, Field):
        field_ = field
    else:
        field_ = get_field(field or default_field)

    generators: List[Tuple[str, int]] = []
    for line, content in sections["algebra"].lines:
        parts = content.split()
        if len(parts) != 2:
            raise ParseError(f"Expected 'name degree', got '{content}'", line, source)
        generators.append((parts[0], _natural(parts[1], line, source, "Degree")))

    if cap is None and "cap" in sections:
        line, value = sections["cap"].single(source)
        cap = _natural(value, line, source, "Cap")

    label = name or Path(source).stem
    try:
        algebra = FreeCDGA(generators, field_, cap, label)
    except PersistenceCDGAError as e:
        raise ParseError(str(e), sections["algebra"].line, source) from e

    differential: Dict[str, Element] = {}
    if "differential" in sections:
        for line, left, right in sections["differential"].assignments(source):
            if not algebra.has_generator(left):
                raise ParseError(f"d of unknown generator '{left}'", line, source)
            if left in differential:
                raise ParseError(f"Differential of '{left}' given twice", line, source)
            differential[left] = parse_expression(right, algebra, line=line, source=source)  # type: ignore[assignment]
    algebra.set_differential(differential)

    base: List[str] = list(algebra.names())
    fiber: List[str] = []
    if "relative" in sections:
        given = {}
        for line, left, right in sections["relative"].assignments(source):
            if left not in ("base", "fiber"):
                raise ParseError(f"Expected 'base' or 'fiber', got '{left}'", line, source)
            given[left] = _name_list(right) if right != "-" else []
        base = given.get("base", [])
        fiber = given.get("fiber", [n for n in algebra.names() if n not in base])

    stages: Dict[str, int] = {}
    if "stages" in sections:
        for line, left, right in sections["stages"].assignments(source):
            stages[left] = _natural(right, line, source, "Stage")

    truncated = None
    if "truncated" in sections:
        line, value = sections["truncated"].single(source)
        truncated = _natural(value, line, source, "Truncation stage")

    model = RelativeSullivanModel(algebra, tuple(base), tuple(fiber), stages, truncated, label)
    logger.debug(f"Parsed {source}: {algebra!r}")
    return model


def top_degree(text: str, source: str = "<model>") -> int:
    """Largest generator degree declared in the [algebra] section (0 when empty)."""
    for section in split_sections(text, source):
        if section.name != "algebra":
            continue
        degrees = [0]
        for line, content in section.lines:
            parts = content.split()
            if len(parts) != 2:
                raise ParseError(f"Expected 'name degree', got '{content}'", line, source)
            degrees.append(_natural(parts[1], line, source, "Degree"))
        return max(degrees)
    raise ParseError("Missing [algebra] section", source=source)


def read_source(path: Union[str, Path]) -> str:
    """Text of an input file; undecodable bytes are a ParseError."""
    path = Path(path)
    try:
        return path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"Not valid UTF-8 text (byte {e.start})", source=str(path)) from e


def load_model(
    path: Union[str, Path],
    field: Optional[Union[str, Field]] = None,
    cap: Optional[int] = None,
    name: str = "",
    default_field: str = "Q",
) -> RelativeSullivanModel:
    path = Path(path)
    text = read_source(path)
    return parse_model(text, str(path), field, cap, name or path.stem, default_field)


def serialize_model(model: RelativeSullivanModel) -> str:
    """Canonical text of a model; parse_model(serialize_model(m)) rebuilds m."""
    algebra = model.algebra
    lines = ["[field]", algebra.field.name, "", "[algebra]"]
    lines.extend(f"{g.name} {g.degree}" for g in algebra.generators)
    lines += ["", "[differential]"]
    for g in algebra.generators:
        dg = algebra.differential_of(g.name)
        if dg:
            lines.append(f"{g.name} = {dg.format()}")
    lines += [
        "",
        "[relative]",
        f"base = {', '.join(model.base) or '-'}",
        f"fiber = {', '.join(model.fiber) or '-'}",
    ]
    if model.stages:
        lines += ["", "[stages]"]
        lines.extend(f"{w} = {model.stages[w]}" for w in model.fiber if w in model.stages)
    if algebra.cap != algebra.top_degree + 4:
        lines += ["", "[cap]", str(algebra.cap)]
    if model.truncated is not None:
        lines += ["", "[truncated]", str(model.truncated)]
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# Interleaving certificates
# ----------------------------------------------------------------------


def _morphism_section(
    section: Optional[Section],
    source_algebra: FreeCDGA,
    target_algebra: FreeCDGA,
    names: Tuple[str, str],
    label: str,
    source: str,
) -> Morphism:
    images: Dict[str, Element] = {}
    if section is None:
        return Morphism(source_algebra, target_algebra, images, label)
    if section.keyword() == "by-name":
        for g in source_algebra.generators:
            if target_algebra.has_generator(g.name):
                images[g.name] = target_algebra.gen(g.name)
        return Morphism(source_algebra, target_algebra, images, label)
    for line, left, right in section.assignments(source):
        gen_name = _strip_namespace(left, names[0], line, source)
        if not source_algebra.has_generator(gen_name):
            raise ParseError(f"'{left}' is not a generator of {source_algebra.label}", line, source)
        if gen_name in images:
            raise ParseError(f"Image of '{left}' given twice", line, source)
        images[gen_name] = parse_expression(  # type: ignore[assignment]
            right, target_algebra, names[1], line=line, source=source
        )
    return Morphism(source_algebra, target_algebra, images, label)


def _homotopy_section(
    section: Optional[Section],
    algebra: FreeCDGA,
    namespace: str,
    t_cap: int,
    label: str,
    source: str,
) -> Homotopy:
    if section is None or section.keyword() == "identity":
        return Homotopy.constant(identity_morphism(algebra), t_cap, label)
    images: Dict[str, IntervalElement] = {}
    for line, left, right in section.assignments(source):
        gen_name = _strip_namespace(left, namespace, line, source)
        if not algebra.has_generator(gen_name):
            raise ParseError(f"'{left}' is not a generator of {algebra.label}", line, source)
        images[gen_name] = parse_expression(  # type: ignore[assignment]
            right, algebra, namespace, interval=True, t_cap=t_cap, line=line, source=source
        )
    return Homotopy(algebra, algebra, images, t_cap, label)


def _strip_namespace(name: str, namespace: str, line: int, source: str) -> str:
    if "." not in name:
        return name
    prefix, rest = name.split(".", 1)
    if prefix != namespace:
        raise ParseError(f"'{name}' should carry the prefix '{namespace}.'", line, source)
    return rest


def parse_certificate(
    text: str,
    F: PersistenceCDGA,
    G: PersistenceCDGA,
    source: str = "<certificate>",
    t_cap: int = DEFAULT_T_DEGREE_CAP,
) -> InterleavingCertificate:
    """Parse an interleaving certificate between F (namespace A) and G (namespace B).

    Sections: [certificate] with `epsilon` and optional `t_cap`; [phi] A → B; [psi] B → A
    (or the single word `inverse`); [homotopy_F] and [homotopy_G] (or `identity`).
    Generators without a line map to zero.
    """
    sections = _unique_sections(
        split_sections(text, source), ("certificate", "phi", "psi", "homotopy_f", "homotopy_g"), source
    )
    header = sections.get("certificate")
    if header is None:
        raise ParseError("Missing [certificate] section", source=source)
    settings = {left: (line, right) for line, left, right in header.assignments(source)}
    if "epsilon" not in settings:
        raise ParseError("The [certificate] section needs 'epsilon = q'", header.line, source)
    line, value = settings["epsilon"]
    try:
        epsilon = to_rational(value)
    except (TypeError, ValueError, SyntaxError):
        raise ParseError(f"epsilon must be rational, got '{value}'", line, source) from None
    if "t_cap" in settings:
        t_cap = _natural(settings["t_cap"][1], settings["t_cap"][0], source, "t_cap")

    A, B = F.algebra, G.algebra
    phi = _morphism_section(sections.get("phi"), A, B, (FIRST, SECOND), "phi", source)
    psi_section = sections.get("psi")
    if psi_section is not None and psi_section.keyword() == "inverse":
        try:
            psi = inverse_morphism(phi)
        except PersistenceCDGAError as e:
            raise ParseError(f"psi = inverse: {e}", psi_section.line, source) from e
        psi.name = "psi"
    else:
        psi = _morphism_section(psi_section, B, A, (SECOND, FIRST), "psi", source)
    h_f = _homotopy_section(sections.get("homotopy_f"), A, FIRST, t_cap, "H_F", source)
    h_g = _homotopy_section(sections.get("homotopy_g"), B, SECOND, t_cap, "H_G", source)
    return InterleavingCertificate(epsilon, phi, psi, h_f, h_g, Path(source).stem)


def load_certificate(
    path: Union[str, Path], F: PersistenceCDGA, G: PersistenceCDGA, t_cap: int = DEFAULT_T_DEGREE_CAP
) -> InterleavingCertificate:
    path = Path(path)
    return parse_certificate(read_source(path), F, G, str(path), t_cap)


# ----------------------------------------------------------------------
# Automorphism families
# ----------------------------------------------------------------------


def parse_family(text: str, base: FreeCDGA, source: str = "<family>") -> AutomorphismFamily:
    """Parse an automorphism family of a base algebra.

    [family] holds `parameters = a, b`, optional `choices = s: 1, -1; r: 0, 1` and
    `nonzero = <polynomial>` lines; [map] assigns each generator its image.
    """
    sections = _unique_sections(split_sections(text, source), ("family", "map"), source)
    if "family" not in sections or "map" not in sections:
        raise ParseError("A family file needs [family] and [map] sections", source=source)
    parameters: List[str] = []
    choices: Dict[str, List[Any]] = {}
    nonzero: List[Tuple[int, str]] = []
    for line, left, right in sections["family"].assignments(source):
        if left == "parameters":
            parameters = _name_list(right)
        elif left == "choices":
            for group in right.split(";"):
                key, sep, values = group.partition(":")
                if not sep or not key.strip():
                    raise ParseError(f"Expected 'name: v1, v2' in choices, got '{group}'", line, source)
                try:
                    choices[key.strip()] = [base.field.parse_scalar(v) for v in _name_list(values)]
                except PersistenceCDGAError as e:
                    raise ParseError(str(e), line, source) from e
        elif left == "nonzero":
            nonzero.append((line, right))
        else:
            raise ParseError(f"Unknown family setting '{left}'", line, source)
    clash = (set(parameters) | set(choices)) & set(base.names())
    if clash:
        raise ParseError(f"Parameters {sorted(clash)} clash with generator names", sections["family"].line, source)

    family = AutomorphismFamily(base, parameters, choices, Path(source).stem)
    names = tuple(parameters) + tuple(choices)
    images: Dict[str, Element] = {}
    for line, left, right in sections["map"].assignments(source):
        if not base.has_generator(left):
            raise ParseError(f"'{left}' is not a generator of {base.label}", line, source)
        images[left] = parse_expression(  # type: ignore[assignment]
            right, family.algebra, parameters=names, line=line, source=source
        )
    family.set_images(images)
    for line, expression in nonzero:
        value = parse_expression(expression, family.algebra, parameters=names, line=line, source=source)
        family.add_nonzero(_scalar_value(value, line, source))
    return family


def load_family(path: Union[str, Path], base: FreeCDGA) -> AutomorphismFamily:
    path = Path(path)
    return parse_family(read_source(path), base, str(path))


# ----------------------------------------------------------------------
# H-formality certificates
# ----------------------------------------------------------------------


def _assignment_images(
    section: Section, source_algebra: FreeCDGA, target_algebra: FreeCDGA, source: str
) -> Dict[str, Element]:
    images: Dict[str, Element] = {}
    for line, left, right in section.assignments(source):
        if not source_algebra.has_generator(left):
            raise ParseError(f"'{left}' is not a generator of {source_algebra.label}", line, source)
        images[left] = parse_expression(right, target_algebra, line=line, source=source)  # type: ignore[assignment]
    return images


def parse_formality(
    text: str,
    F: PersistenceCDGA,
    source: str = "<formality>",
    base_dir: Optional[Union[str, Path]] = None,
) -> Tuple[List[ZigzagArrow], Optional[Dict[str, Element]]]:
    """Parse an H-formality certificate for F.

    [zigzag] lists arrows `forward FILE` or `backward FILE`; the k-th arrow's map is
    given in section [arrow k] (forward: previous object → FILE, backward: the
    reverse). An optional [projection] assigns each generator of the last object a
    cocycle representative of its class.
    """
    sections = split_sections(text, source)
    known = {"zigzag", "arrow", "projection"}
    for section in sections:
        if section.name not in known:
            raise ParseError(f"Unknown section [{section.name}]", section.line, source)
    root = Path(base_dir) if base_dir is not None else Path(source).parent
    arrows = {s.argument: s for s in sections if s.name == "arrow"}
    listing = [s for s in sections if s.name == "zigzag"]
    zigzag: List[ZigzagArrow] = []
    current = F
    for line, content in listing[0].lines if listing else []:
        parts = content.split()
        if len(parts) != 2 or parts[0] not in (FORWARD, BACKWARD):
            raise ParseError(f"Expected 'forward FILE' or 'backward FILE', got '{content}'", line, source)
        direction, file_name = parts
        target_model = load_model(root / file_name, F.field, F.algebra.cap)
        target = build_theta(target_model)
        section = arrows.get(str(len(zigzag)))
        if section is None:
            raise ParseError(f"Missing section [arrow {len(zigzag)}]", line, source)
        if direction == FORWARD:
            images = _assignment_images(section, current.algebra, target.algebra, source)
            morphism = Morphism(current.algebra, target.algebra, images, f"arrow{len(zigzag)}")
        else:
            images = _assignment_images(section, target.algebra, current.algebra, source)
            morphism = Morphism(target.algebra, current.algebra, images, f"arrow{len(zigzag)}")
        zigzag.append(ZigzagArrow(direction, morphism, target))
        current = target
    projection = None
    projections = [s for s in sections if s.name == "projection"]
    if projections:
        projection = _assignment_images(projections[0], current.algebra, current.algebra, source)
    return zigzag, projection


def load_formality(
    path: Union[str, Path], F: PersistenceCDGA
) -> Tuple[List[ZigzagArrow], Optional[Dict[str, Element]]]:
    path = Path(path)
    return parse_formality(read_source(path), F, str(path), path.parent)

