"""
Free commutative differential graded algebras over an exact field.

- Generator / Monomial / Element: graded-commutative polynomials whose monomials
  are sorted by generator insertion order, with Koszul signs applied on sorting
- FreeCDGA: generators, differential table, degree cap and monomial bases
- Morphism: algebra maps given on generators, plus composition and inversion
- IntervalElement / Homotopy: the path object A ⊗ ∧(t, dt) with t of degree 0,
  dt of degree 1, d(t) = dt, and right homotopies into it
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from .errors import AlgebraMismatchError, CapExceededError, DegreeError, FieldError, ModelError
from .fields import Field, get_field
from .linalg import LinearMap

logger = logging.getLogger(__name__)

Monomial = Tuple[Tuple[int, int], ...]
UNIT: Monomial = ()
MIXED = "mixed"
DEFAULT_T_DEGREE_CAP = 8
RESERVED_NAMES = frozenset({"t", "dt", "i"})

_GENERATOR_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


@dataclass
class CheckResult:
    """Outcome of a verification routine; falsy when the check failed."""

    ok: bool
    check: str
    message: str = ""
    generator: Optional[str] = None
    residue: Optional[str] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def passed(cls, check: str, message: str = "", **details: Any) -> "CheckResult":
        return cls(True, check, message, details=details)

    @classmethod
    def failed(
        cls,
        check: str,
        message: str,
        generator: Optional[str] = None,
        residue: Optional[str] = None,
        **details: Any,
    ) -> "CheckResult":
        return cls(False, check, message, generator, residue, details)

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {"ok": self.ok, "check": self.check, "message": self.message}
        if self.generator is not None:
            result["generator"] = self.generator
        if self.residue is not None:
            result["residue"] = self.residue
        if self.details:
            result["details"] = {k: str(v) for k, v in sorted(self.details.items())}
        return result


@dataclass(frozen=True)
class Generator:
    """A free generator of positive degree.

    Args:
        name: Unique name within its algebra
        degree: Positive integer degree
        index: Insertion index; monomials are sorted by it
    """

    name: str
    degree: int
    index: int

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


class FreeCDGA:
    """Free graded-commutative algebra on named generators with a differential.

    Args:
        generators: (name, degree) pairs in insertion order
        field: Coefficient field (defaults to Q)
        cap: Degree bound for every validity claim (defaults to max degree + 4)
        name: Label used in reports
    """

    def __init__(
        self,
        generators: Sequence[Tuple[str, int]],
        field: Optional[Field] = None,
        cap: Optional[int] = None,
        name: str = "",
    ):
        self.field = field or get_field("Q")
        self.name = name
        gens = []
        seen: Set[str] = set()
        for index, (gen_name, degree) in enumerate(generators):
            if not _GENERATOR_NAME.match(gen_name) or gen_name in RESERVED_NAMES:
                raise ModelError(f"Invalid generator name '{gen_name}'")
            if gen_name in seen:
                raise ModelError(f"Duplicate generator '{gen_name}'")
            if int(degree) < 1:
                raise DegreeError(f"Generator '{gen_name}' has degree {degree}; degrees must be >= 1")
            seen.add(gen_name)
            gens.append(Generator(gen_name, int(degree), index))
        self.generators: Tuple[Generator, ...] = tuple(gens)
        self._index = {g.name: g.index for g in self.generators}
        self._odd = tuple(g.odd for g in self.generators)
        self._degrees = tuple(g.degree for g in self.generators)
        top = max(self._degrees, default=0)
        self.cap = cap if cap is not None else top + 4
        if self.cap < 1:
            raise DegreeError(f"Degree cap must be positive, got {self.cap}")
        self._differential: Dict[int, Element] = {}
        self._frozen = False
        self._basis_cache: Dict[int, List[Monomial]] = {}
        self._basis_index: Dict[int, Dict[Monomial, int]] = {}
        self._d_cache: Dict[Monomial, Element] = {}

    def __repr__(self) -> str:
        gens = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"FreeCDGA({self.label}; {gens})"

    @property
    def label(self) -> str:
        return self.name or "algebra"

    @property
    def top_degree(self) -> int:
        return max(self._degrees, default=0)

    # ------------------------------------------------------------------
    # Generators and differential
    # ------------------------------------------------------------------

    def set_differential(self, images: Mapping[str, "Element"]) -> None:
        """Install the differential on generators; allowed once."""
        if self._frozen:
            raise ModelError(f"Differential of {self.label} is already fixed")
        for gen_name, image in images.items():
            g = self.generator(gen_name)
            if image.algebra is not self:
                raise AlgebraMismatchError(f"d({gen_name}) is not an element of {self.label}")
            if image:
                self._differential[g.index] = image
        self._frozen = True
        self._d_cache.clear()

    def has_generator(self, name: str) -> bool:
        return name in self._index

    def generator(self, name: str) -> Generator:
        try:
            return self.generators[self._index[name]]
        except KeyError:
            raise AlgebraMismatchError(f"'{name}' is not a generator of {self.label}") from None

    def names(self) -> Tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    def gen(self, name: str) -> "Element":
        g = self.generator(name)
        return Element(self, {((g.index, 1),): self.field.one})

    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return self.scalar(self.field.one)

    def scalar(self, value: Any) -> "Element":
        coefficient = self.field.convert(value)
        if not coefficient:
            return self.zero()
        return Element(self, {UNIT: coefficient})

    def monomial(self, monomial: Monomial, coefficient: Any = None) -> "Element":
        c = self.field.one if coefficient is None else self.field.convert(coefficient)
        if not c:
            return self.zero()
        return Element(self, {monomial: c})

    def differential_of(self, name: str) -> "Element":
        g = self.generator(name)
        return self._differential.get(g.index) or self.zero()

    def degree_of(self, monomial: Monomial) -> int:
        return sum(self._degrees[index] * exponent for index, exponent in monomial)

    def format_monomial(self, monomial: Monomial) -> str:
        factors = []
        for index, exponent in monomial:
            gen_name = self.generators[index].name
            factors.append(gen_name if exponent == 1 else f"{gen_name}^{exponent}")
        return "*".join(factors)

    # ------------------------------------------------------------------
    # Monomial bases
    # ------------------------------------------------------------------

    def basis(self, degree: int) -> List[Monomial]:
        """All monomials of the given degree, sorted."""
        if degree < 0:
            return []
        cached = self._basis_cache.get(degree)
        if cached is not None:
            return cached
        result: List[Monomial] = []
        gens = self.generators
        prefix: List[Tuple[int, int]] = []

        def extend(position: int, remaining: int) -> None:
            if remaining == 0:
                result.append(tuple(prefix))
                return
            if position == len(gens):
                return
            g = gens[position]
            top = remaining // g.degree
            if g.odd:
                top = min(top, 1)
            for exponent in range(top, -1, -1):
                if exponent:
                    prefix.append((g.index, exponent))
                extend(position + 1, remaining - exponent * g.degree)
                if exponent:
                    prefix.pop()

        extend(0, degree)
        result.sort()
        self._basis_cache[degree] = result
        self._basis_index[degree] = {m: i for i, m in enumerate(result)}
        logger.debug(f"{self.label}: {len(result)} monomials in degree {degree}")
        return result

    def basis_index(self, degree: int) -> Dict[Monomial, int]:
        self.basis(degree)
        return self._basis_index.get(degree, {})

    # ------------------------------------------------------------------
    # Sub-algebras
    # ------------------------------------------------------------------

    def subalgebra(self, names: Iterable[str], name: str = "") -> "FreeCDGA":
        """The sub-CDGA generated by the given generators (must be closed under d)."""
        wanted = set(names)
        for gen_name in wanted:
            self.generator(gen_name)
        kept = [(g.name, g.degree) for g in self.generators if g.name in wanted]
        sub = FreeCDGA(kept, self.field, self.cap, name or self.name)
        images = {}
        for gen_name, _ in kept:
            dg = self.differential_of(gen_name)
            outside = {self.generators[i].name for i in dg.generator_indices()} - wanted
            if outside:
                raise ModelError(
                    f"Generators {sorted(wanted)} are not closed under d: "
                    f"d({gen_name}) involves {sorted(outside)}"
                )
            images[gen_name] = transfer(dg, sub)
        sub.set_differential(images)
        return sub


def _monomial_product(
    algebra: FreeCDGA, left: Monomial, right: Monomial
) -> Optional[Tuple[int, Monomial]]:
    """Sign and canonical monomial of left*right, or None when an odd square appears."""
    odd = algebra._odd
    exponents = dict(left)
    left_odd = [index for index, _ in left if odd[index]]
    sign = 1
    for index, exponent in right:
        if odd[index]:
            if index in exponents:
                return None
            inversions = sum(1 for other in left_odd if other > index)
            if inversions % 2:
                sign = -sign
        exponents[index] = exponents.get(index, 0) + exponent
    return sign, tuple(sorted(exponents.items()))


def _accumulate(terms: Dict[Monomial, Any], monomial: Monomial, coefficient: Any) -> None:
    total = terms.get(monomial)
    total = coefficient if total is None else total + coefficient
    if total:
        terms[monomial] = total
    else:
        terms.pop(monomial, None)


class Element:
    """An element of a FreeCDGA in canonical form.

    Terms map canonical monomials to nonzero coefficients; the empty dict is zero.
    """

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: FreeCDGA, terms: Optional[Dict[Monomial, Any]] = None):
        self.algebra = algebra
        self.terms: Dict[Monomial, Any] = terms if terms is not None else {}

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Element({self.format()})"

    def __str__(self) -> str:
        return self.format()

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _coerce(self, other: Any) -> Optional["Element"]:
        if isinstance(other, Element):
            if other.algebra is not self.algebra:
                raise AlgebraMismatchError(
                    f"Cannot combine elements of {self.algebra.label} and {other.algebra.label}"
                )
            return other
        if isinstance(other, IntervalElement):
            return None
        try:
            return self.algebra.scalar(other)
        except FieldError:
            return None

    def __eq__(self, other: object) -> bool:
        if isinstance(other, IntervalElement):
            return NotImplemented
        try:
            coerced = self._coerce(other)
        except AlgebraMismatchError:
            return False
        if coerced is None:
            return NotImplemented
        return self.terms == coerced.terms

    def __add__(self, other: Any) -> "Element":
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        terms = dict(self.terms)
        for monomial, coefficient in coerced.terms.items():
            _accumulate(terms, monomial, coefficient)
        return Element(self.algebra, terms)

    __radd__ = __add__

    def __neg__(self) -> "Element":
        return Element(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Any) -> "Element":
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return self + (-coerced)

    def __rsub__(self, other: Any) -> "Element":
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return coerced + (-self)

    def __mul__(self, other: Any) -> "Element":
        if isinstance(other, Element):
            return multiply(self, other)
        if isinstance(other, IntervalElement):
            return NotImplemented
        try:
            return self.scale(other)
        except FieldError:
            return NotImplemented

    def __rmul__(self, other: Any) -> "Element":
        try:
            return self.scale(other)
        except FieldError:
            return NotImplemented

    def __pow__(self, exponent: int) -> "Element":
        if exponent < 0:
            raise ValueError("Negative powers are not defined")
        result = self.algebra.one()
        for _ in range(exponent):
            result = multiply(result, self)
        return result

    def scale(self, value: Any) -> "Element":
        c = self.algebra.field.convert(value)
        if not c:
            return self.algebra.zero()
        return Element(self.algebra, {m: coefficient * c for m, coefficient in self.terms.items()})

    def coefficient(self, monomial: Monomial) -> Any:
        return self.terms.get(monomial, self.algebra.field.zero)

    def homogeneous_degree(self) -> Union[int, str, None]:
        """Common degree of all terms, None for zero, MIXED otherwise."""
        degrees = {self.algebra.degree_of(m) for m in self.terms}
        if not degrees:
            return None
        if len(degrees) == 1:
            return degrees.pop()
        return MIXED

    def components(self) -> Dict[int, "Element"]:
        parts: Dict[int, Dict[Monomial, Any]] = {}
        for monomial, coefficient in self.terms.items():
            parts.setdefault(self.algebra.degree_of(monomial), {})[monomial] = coefficient
        return {degree: Element(self.algebra, terms) for degree, terms in parts.items()}

    def generator_indices(self) -> Set[int]:
        return {index for monomial in self.terms for index, _ in monomial}

    def generator_names(self) -> Set[str]:
        return {self.algebra.generators[i].name for i in self.generator_indices()}

    def linear_part(self) -> "Element":
        """Projection onto the span of the generators."""
        return Element(
            self.algebra,
            {m: c for m, c in self.terms.items() if len(m) == 1 and m[0][1] == 1},
        )

    def parity_twist(self) -> "Element":
        """sum (-1)^|m| c m; multiplying by dt from the left picks up this sign."""
        return Element(
            self.algebra,
            {
                m: (-c if self.algebra.degree_of(m) % 2 else c)
                for m, c in self.terms.items()
            },
        )

    def differential(self) -> "Element":
        return apply_differential(self)

    def to_vector(self, degree: int) -> List[Any]:
        index = self.algebra.basis_index(degree)
        vector = [self.algebra.field.zero] * len(index)
        for monomial, coefficient in self.terms.items():
            position = index.get(monomial)
            if position is None:
                raise DegreeError(
                    f"{self.algebra.format_monomial(monomial)} is not of degree {degree}"
                )
            vector[position] = coefficient
        return vector

    @classmethod
    def from_vector(cls, algebra: FreeCDGA, degree: int, vector: Sequence[Any]) -> "Element":
        basis = algebra.basis(degree)
        if len(vector) != len(basis):
            raise DegreeError(f"Vector of length {len(vector)} for degree {degree} basis of {len(basis)}")
        return cls(algebra, {m: c for m, c in zip(basis, vector) if c})

    def format(self) -> str:
        if not self.terms:
            return "0"
        algebra = self.algebra
        ordered = sorted(self.terms, key=lambda m: (algebra.degree_of(m), m))
        text = ""
        for position, monomial in enumerate(ordered):
            negative, body = _format_term(
                algebra.field, self.terms[monomial], algebra.format_monomial(monomial)
            )
            if position == 0:
                text = f"-{body}" if negative else body
            else:
                text += f" - {body}" if negative else f" + {body}"
        return text


def _format_term(field_: Field, coefficient: Any, monomial_text: str) -> Tuple[bool, str]:
    sign = field_.sign(coefficient)
    if sign is None:
        scalar = f"({field_.format_scalar(coefficient)})"
        return False, f"{scalar}*{monomial_text}" if monomial_text else scalar
    magnitude = -coefficient if sign < 0 else coefficient
    if not monomial_text:
        return sign < 0, field_.format_scalar(magnitude)
    if magnitude == field_.one:
        return sign < 0, monomial_text
    return sign < 0, f"{field_.format_scalar(magnitude)}*{monomial_text}"


# ----------------------------------------------------------------------
# Canonical forms, products and the differential
# ----------------------------------------------------------------------


def normalize(algebra: FreeCDGA, raw_terms: Iterable[Tuple[Any, Sequence[int]]]) -> Element:
    """Build an Element from (coefficient, factor list) pairs.

    Factors are generator indices in product order; they are sorted with the
    Koszul sign, odd squares annihilate the term and like terms are merged.
    """
    field_ = algebra.field
    terms: Dict[Monomial, Any] = {}
    for coefficient, factors in raw_terms:
        c = field_.convert(coefficient)
        if not c:
            continue
        monomial: Monomial = UNIT
        sign = 1
        for index in factors:
            if not 0 <= index < len(algebra.generators):
                raise AlgebraMismatchError(f"Unknown generator id {index} in {algebra.label}")
            product = _monomial_product(algebra, monomial, ((index, 1),))
            if product is None:
                break
            step_sign, monomial = product
            sign *= step_sign
        else:
            _accumulate(terms, monomial, -c if sign < 0 else c)
    return Element(algebra, terms)


def multiply(a: Element, b: Element) -> Element:
    """Graded-commutative product in canonical form."""
    if a.algebra is not b.algebra:
        raise AlgebraMismatchError(
            f"Cannot multiply elements of {a.algebra.label} and {b.algebra.label}"
        )
    algebra = a.algebra
    terms: Dict[Monomial, Any] = {}
    for left, c1 in a.terms.items():
        for right, c2 in b.terms.items():
            product = _monomial_product(algebra, left, right)
            if product is None:
                continue
            sign, monomial = product
            c = c1 * c2
            _accumulate(terms, monomial, -c if sign < 0 else c)
    return Element(algebra, terms)


def _differential_of_monomial(algebra: FreeCDGA, monomial: Monomial) -> Element:
    cached = algebra._d_cache.get(monomial)
    if cached is not None:
        return cached
    field_ = algebra.field
    result = algebra.zero()
    prefix_degree = 0
    for position, (index, exponent) in enumerate(monomial):
        dg = algebra._differential.get(index)
        if dg:
            prefix = algebra.monomial(monomial[:position])
            power = algebra.monomial(((index, exponent - 1),) if exponent > 1 else UNIT)
            suffix = algebra.monomial(monomial[position + 1 :])
            term = multiply(multiply(multiply(prefix, power), dg), suffix)
            scalar = field_.convert(-exponent if prefix_degree % 2 else exponent)
            result = result + term.scale(scalar)
        prefix_degree += algebra._degrees[index] * exponent
    algebra._d_cache[monomial] = result
    return result


def apply_differential(a: Element) -> Element:
    """Extend the differential table to a by linearity and the Leibniz rule."""
    algebra = a.algebra
    terms: Dict[Monomial, Any] = {}
    for monomial, coefficient in a.terms.items():
        for m, c in _differential_of_monomial(algebra, monomial).terms.items():
            _accumulate(terms, m, c * coefficient)
    return Element(algebra, terms)


def transfer(element: Element, target: FreeCDGA) -> Element:
    """Rewrite an element in another algebra whose generators include the same names."""
    source = element.algebra
    if source is target:
        return element
    raw = []
    for monomial, coefficient in element.terms.items():
        factors = []
        for index, exponent in monomial:
            target_index = target.generator(source.generators[index].name).index
            factors.extend([target_index] * exponent)
        raw.append((coefficient, factors))
    return normalize(target, raw)


def check_d_squared(algebra: FreeCDGA, cap: Optional[int] = None) -> CheckResult:
    """Check that d raises degree by one and squares to zero on every generator."""
    cap = algebra.cap if cap is None else cap
    for g in algebra.generators:
        dg = algebra.differential_of(g.name)
        degree = dg.homogeneous_degree()
        if degree is not None and degree != g.degree + 1:
            return CheckResult.failed(
                "differential-degree",
                f"d({g.name}) has degree {degree}, expected {g.degree + 1}",
                generator=g.name,
                residue=dg.format(),
            )
        if g.degree + 2 <= cap:
            ddg = dg.differential()
            if ddg:
                return CheckResult.failed(
                    "d-squared", f"d(d({g.name})) is not zero", generator=g.name, residue=ddg.format()
                )
    return CheckResult.passed("d-squared", f"d^2 = 0 on {algebra.label} through degree {cap}")


# ----------------------------------------------------------------------
# Morphisms
# ----------------------------------------------------------------------


class Morphism:
    """An algebra map given by its values on generators (missing generators map to 0).

    Args:
        source: Domain algebra
        target: Codomain algebra
        images: Generator name -> Element of target
        name: Label used in reports
    """

    def __init__(
        self, source: FreeCDGA, target: FreeCDGA, images: Mapping[str, Element], name: str = ""
    ):
        self.source = source
        self.target = target
        self.name = name
        self._images: Dict[int, Element] = {}
        for gen_name, image in images.items():
            g = source.generator(gen_name)
            if image.algebra is not target:
                raise AlgebraMismatchError(
                    f"Image of {gen_name} is not an element of {target.label}"
                )
            if image:
                self._images[g.index] = image
        self._powers: Dict[Tuple[int, int], Element] = {}

    def __repr__(self) -> str:
        return f"Morphism({self.label}: {self.source.label} -> {self.target.label})"

    @property
    def label(self) -> str:
        return self.name or "map"

    def image(self, name: str) -> Element:
        return self.image_of(self.source.generator(name).index)

    def image_of(self, index: int) -> Element:
        return self._images.get(index) or self.target.zero()

    def images(self) -> Dict[str, Element]:
        return {g.name: self.image_of(g.index) for g in self.source.generators}

    def _power(self, index: int, exponent: int) -> Element:
        key = (index, exponent)
        cached = self._powers.get(key)
        if cached is None:
            cached = self.image_of(index) ** exponent
            self._powers[key] = cached
        return cached

    def apply(self, element: Element) -> Element:
        if element.algebra is not self.source:
            raise AlgebraMismatchError(f"{self.label} is defined on {self.source.label}")
        terms: Dict[Monomial, Any] = {}
        for monomial, coefficient in element.terms.items():
            product = self.target.one()
            for index, exponent in monomial:
                product = multiply(product, self._power(index, exponent))
                if not product:
                    break
            for m, c in product.terms.items():
                _accumulate(terms, m, c * coefficient)
        return Element(self.target, terms)

    __call__ = apply

    def linear_matrix(self, degree: int) -> LinearMap:
        """Matrix of the linear part between the degree-n generator spaces."""
        sources = [g for g in self.source.generators if g.degree == degree]
        targets = [g for g in self.target.generators if g.degree == degree]
        columns = []
        for g in sources:
            image = self.image_of(g.index)
            columns.append([image.coefficient(((h.index, 1),)) for h in targets])
        return LinearMap.from_columns(columns, len(targets), self.target.field)


def compose(second: Morphism, first: Morphism) -> Morphism:
    """second after first."""
    if first.target is not second.source:
        raise AlgebraMismatchError(
            f"Cannot compose {second.label} after {first.label}: "
            f"{first.target.label} is not {second.source.label}"
        )
    images = {g.name: second.apply(first.image_of(g.index)) for g in first.source.generators}
    return Morphism(first.source, second.target, images, f"{second.label}.{first.label}")


def identity_morphism(algebra: FreeCDGA) -> Morphism:
    return Morphism(algebra, algebra, {g.name: algebra.gen(g.name) for g in algebra.generators}, "id")


def inclusion(sub: FreeCDGA, full: FreeCDGA) -> Morphism:
    """The map sending each generator of sub to the generator of full with the same name."""
    return Morphism(sub, full, {g.name: full.gen(g.name) for g in sub.generators}, "incl")


def zero_morphism(source: FreeCDGA, target: FreeCDGA) -> Morphism:
    return Morphism(source, target, {}, "0")


def verify_morphism(m: Morphism, cap: Optional[int] = None) -> CheckResult:
    """Degree preservation and the chain condition d(m(g)) = m(d(g)) on generators."""
    cap = min(m.source.cap, m.target.cap) if cap is None else cap
    for g in m.source.generators:
        if g.degree > cap:
            continue
        image = m.image_of(g.index)
        degree = image.homogeneous_degree()
        if degree is not None and degree != g.degree:
            return CheckResult.failed(
                "morphism-degree",
                f"{m.label}({g.name}) has degree {degree}, expected {g.degree}",
                generator=g.name,
                residue=image.format(),
            )
        lhs = image.differential()
        rhs = m.apply(m.source.differential_of(g.name))
        if lhs != rhs:
            return CheckResult.failed(
                "morphism-chain",
                f"d({m.label}({g.name})) differs from {m.label}(d({g.name}))",
                generator=g.name,
                residue=(lhs - rhs).format(),
            )
    return CheckResult.passed("morphism", f"{m.label} is a chain algebra map through degree {cap}")


def inverse_morphism(m: Morphism) -> Morphism:
    """Inverse of an isomorphism of free CDGAs, built degree by degree.

    On degree-n generators m(g) = (linear part) + (decomposables in lower
    generators); the inverse is solved from the invertible linear part.
    """
    source, target = m.source, m.target
    degrees = sorted({g.degree for g in source.generators} | {g.degree for g in target.generators})
    inverse_images: Dict[str, Element] = {}
    for degree in degrees:
        sources = [g for g in source.generators if g.degree == degree]
        targets = [g for g in target.generators if g.degree == degree]
        matrix = m.linear_matrix(degree)
        if not matrix.is_isomorphism():
            raise ModelError(f"{m.label} is not invertible: linear part singular in degree {degree}")
        partial = Morphism(target, source, inverse_images)
        inverted = matrix.inverse()
        remainders = []
        for g in sources:
            image = m.image_of(g.index)
            decomposable = image - image.linear_part()
            remainders.append(source.gen(g.name) - partial.apply(decomposable))
        for column, h in enumerate(targets):
            value = source.zero()
            for row, remainder in enumerate(remainders):
                coefficient = inverted.rows[row][column]
                if coefficient:
                    value = value + remainder.scale(coefficient)
            inverse_images[h.name] = value
    return Morphism(target, source, inverse_images, f"{m.label}^-1")


def stage_support(element: Union[Element, "IntervalElement"], staging: Mapping[str, int]) -> int:
    """Largest stage of a generator occurring in element (0 when none occurs)."""
    names = element.generator_names()
    try:
        return max((staging[name] for name in names), default=0)
    except KeyError as e:
        raise ModelError(f"Generator {e.args[0]} has no stage") from None


# ----------------------------------------------------------------------
# The path object A ⊗ ∧(t, dt)
# ----------------------------------------------------------------------

PartKey = Tuple[int, int]


class IntervalElement:
    """An element of A ⊗ ∧(t, dt).

    Parts are keyed by (power of t, exponent of dt in {0, 1}); each part is an
    Element of A. Powers of t above t_cap raise CapExceededError.
    """

    __slots__ = ("algebra", "parts", "t_cap")

    def __init__(
        self,
        algebra: FreeCDGA,
        parts: Optional[Dict[PartKey, Element]] = None,
        t_cap: int = DEFAULT_T_DEGREE_CAP,
    ):
        self.algebra = algebra
        self.t_cap = t_cap
        self.parts: Dict[PartKey, Element] = {}
        for key, part in (parts or {}).items():
            if key[0] > t_cap:
                raise CapExceededError(f"t^{key[0]} exceeds the t-degree cap {t_cap}")
            if part:
                self.parts[key] = part

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def constant(cls, element: Element, t_cap: int = DEFAULT_T_DEGREE_CAP) -> "IntervalElement":
        return cls(element.algebra, {(0, 0): element}, t_cap)

    @classmethod
    def t(cls, algebra: FreeCDGA, t_cap: int = DEFAULT_T_DEGREE_CAP) -> "IntervalElement":
        return cls(algebra, {(1, 0): algebra.one()}, t_cap)

    @classmethod
    def dt(cls, algebra: FreeCDGA, t_cap: int = DEFAULT_T_DEGREE_CAP) -> "IntervalElement":
        return cls(algebra, {(0, 1): algebra.one()}, t_cap)

    def __repr__(self) -> str:
        return f"IntervalElement({self.format()})"

    def __str__(self) -> str:
        return self.format()

    def __bool__(self) -> bool:
        return bool(self.parts)

    def _coerce(self, other: Any) -> Optional["IntervalElement"]:
        if isinstance(other, IntervalElement):
            if other.algebra is not self.algebra:
                raise AlgebraMismatchError("Interval elements over different algebras")
            return other
        if isinstance(other, Element):
            if other.algebra is not self.algebra:
                raise AlgebraMismatchError("Interval element combined with a foreign element")
            return IntervalElement.constant(other, self.t_cap)
        try:
            return IntervalElement.constant(self.algebra.scalar(other), self.t_cap)
        except FieldError:
            return None

    def __eq__(self, other: object) -> bool:
        try:
            coerced = self._coerce(other)
        except AlgebraMismatchError:
            return False
        if coerced is None:
            return NotImplemented
        if self.parts.keys() != coerced.parts.keys():
            return False
        return all(self.parts[k] == coerced.parts[k] for k in self.parts)

    def __add__(self, other: Any) -> "IntervalElement":
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        parts = dict(self.parts)
        for key, part in coerced.parts.items():
            parts[key] = parts[key] + part if key in parts else part
        return IntervalElement(self.algebra, parts, self.t_cap)

    __radd__ = __add__

    def __neg__(self) -> "IntervalElement":
        return IntervalElement(self.algebra, {k: -p for k, p in self.parts.items()}, self.t_cap)

    def __sub__(self, other: Any) -> "IntervalElement":
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return self + (-coerced)

    def __rsub__(self, other: Any) -> "IntervalElement":
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return coerced + (-self)

    def __mul__(self, other: Any) -> "IntervalElement":
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        parts: Dict[PartKey, Element] = {}
        for (k, e), a in self.parts.items():
            for (l, f), b in coerced.parts.items():
                if e and f:
                    continue
                power = k + l
                if power > self.t_cap:
                    raise CapExceededError(f"t^{power} exceeds the t-degree cap {self.t_cap}")
                # a t^k dt^e * b t^l dt^f = (-1)^(e|b|) ab t^(k+l) dt^(e+f)
                product = multiply(a, b.parity_twist() if e else b)
                key = (power, e + f)
                parts[key] = parts[key] + product if key in parts else product
        return IntervalElement(self.algebra, parts, self.t_cap)

    def __rmul__(self, other: Any) -> "IntervalElement":
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return coerced * self

    def __pow__(self, exponent: int) -> "IntervalElement":
        if exponent < 0:
            raise ValueError("Negative powers are not defined")
        result = IntervalElement.constant(self.algebra.one(), self.t_cap)
        for _ in range(exponent):
            result = result * self
        return result

    def scale(self, value: Any) -> "IntervalElement":
        return IntervalElement(
            self.algebra, {k: p.scale(value) for k, p in self.parts.items()}, self.t_cap
        )

    def differential(self) -> "IntervalElement":
        """d(a t^k) = da t^k + (-1)^|a| k a t^(k-1) dt and d(a t^k dt) = da t^k dt."""
        parts: Dict[PartKey, Element] = {}

        def add(key: PartKey, value: Element) -> None:
            if value:
                parts[key] = parts[key] + value if key in parts else value

        for (k, e), a in self.parts.items():
            add((k, e), a.differential())
            if not e and k:
                add((k - 1, 1), a.parity_twist().scale(k))
        return IntervalElement(self.algebra, parts, self.t_cap)

    def evaluate(self, at: int) -> Element:
        """Set t to 0 or 1 and dt to 0."""
        if at == 0:
            return self.parts.get((0, 0)) or self.algebra.zero()
        if at == 1:
            result = self.algebra.zero()
            for (_, e), part in self.parts.items():
                if not e:
                    result = result + part
            return result
        raise ValueError("Interval elements are evaluated at t = 0 or t = 1")

    def homogeneous_degree(self) -> Union[int, str, None]:
        degrees = set()
        for (_, e), part in self.parts.items():
            degree = part.homogeneous_degree()
            if degree == MIXED:
                return MIXED
            degrees.add(degree + e)
        if not degrees:
            return None
        if len(degrees) == 1:
            return degrees.pop()
        return MIXED

    def generator_names(self) -> Set[str]:
        names: Set[str] = set()
        for part in self.parts.values():
            names |= part.generator_names()
        return names

    def max_t_power(self) -> int:
        return max((k for k, _ in self.parts), default=0)

    def format(self) -> str:
        if not self.parts:
            return "0"
        pieces = []
        for (k, e) in sorted(self.parts):
            symbol = "*".join(
                s for s in (("t" if k == 1 else f"t^{k}") if k else "", "dt" if e else "") if s
            )
            part = self.parts[(k, e)].format()
            if not symbol:
                pieces.append(part)
            else:
                pieces.append(f"({part})*{symbol}")
        return " + ".join(pieces)


class Homotopy:
    """A right homotopy H: source -> target ⊗ ∧(t, dt) given on generators.

    Args:
        source: Domain algebra
        target: Algebra under the path object
        images: Generator name -> IntervalElement over target (missing generators map to 0)
        t_cap: Largest power of t allowed
        name: Label used in reports
    """

    def __init__(
        self,
        source: FreeCDGA,
        target: FreeCDGA,
        images: Mapping[str, IntervalElement],
        t_cap: int = DEFAULT_T_DEGREE_CAP,
        name: str = "",
    ):
        self.source = source
        self.target = target
        self.t_cap = t_cap
        self.name = name
        self._images: Dict[int, IntervalElement] = {}
        for gen_name, image in images.items():
            g = source.generator(gen_name)
            if image.algebra is not target:
                raise AlgebraMismatchError(f"H({gen_name}) does not live over {target.label}")
            if image:
                self._images[g.index] = image

    @classmethod
    def constant(cls, m: Morphism, t_cap: int = DEFAULT_T_DEGREE_CAP, name: str = "") -> "Homotopy":
        images = {
            g.name: IntervalElement.constant(m.image_of(g.index), t_cap)
            for g in m.source.generators
        }
        return cls(m.source, m.target, images, t_cap, name or f"const({m.label})")

    @property
    def label(self) -> str:
        return self.name or "H"

    def image(self, name: str) -> IntervalElement:
        return self.image_of(self.source.generator(name).index)

    def image_of(self, index: int) -> IntervalElement:
        image = self._images.get(index)
        if image is None:
            return IntervalElement(self.target, {}, self.t_cap)
        return image

    def apply(self, element: Element) -> IntervalElement:
        if element.algebra is not self.source:
            raise AlgebraMismatchError(f"{self.label} is defined on {self.source.label}")
        result = IntervalElement(self.target, {}, self.t_cap)
        for monomial, coefficient in element.terms.items():
            product = IntervalElement.constant(self.target.one(), self.t_cap)
            for index, exponent in monomial:
                product = product * (self.image_of(index) ** exponent)
                if not product:
                    break
            result = result + product.scale(coefficient)
        return result

    def endpoint(self, at: int) -> Morphism:
        images = {g.name: self.image_of(g.index).evaluate(at) for g in self.source.generators}
        return Morphism(self.source, self.target, images, f"ev{at}.{self.label}")

    def stage_shift(self, staging: Mapping[str, int]) -> Dict[str, int]:
        """stage_support(H(g)) for every generator g."""
        return {
            g.name: stage_support(self.image_of(g.index), staging) for g in self.source.generators
        }


def verify_homotopy(
    h: Homotopy, start: Morphism, end: Morphism, cap: Optional[int] = None
) -> CheckResult:
    """Check that h is a chain algebra map with ev0.h = start and ev1.h = end."""
    if start.source is not h.source or end.source is not h.source:
        return CheckResult.failed("homotopy-endpoints", f"Endpoints of {h.label} have the wrong source")
    if start.target is not h.target or end.target is not h.target:
        return CheckResult.failed("homotopy-endpoints", f"Endpoints of {h.label} have the wrong target")
    cap = min(h.source.cap, h.target.cap) if cap is None else cap
    for g in h.source.generators:
        if g.degree > cap:
            continue
        image = h.image_of(g.index)
        degree = image.homogeneous_degree()
        if degree is not None and degree != g.degree:
            return CheckResult.failed(
                "homotopy-degree",
                f"{h.label}({g.name}) has total degree {degree}, expected {g.degree}",
                generator=g.name,
                residue=image.format(),
            )
        lhs = image.differential()
        rhs = h.apply(h.source.differential_of(g.name))
        if lhs != rhs:
            return CheckResult.failed(
                "homotopy-chain",
                f"d({h.label}({g.name})) differs from {h.label}(d({g.name}))",
                generator=g.name,
                residue=(lhs - rhs).format(),
            )
        at_zero = image.evaluate(0)
        if at_zero != start.image_of(g.index):
            return CheckResult.failed(
                "homotopy-endpoint-0",
                f"ev0({h.label}({g.name})) = {at_zero} but {start.label}({g.name}) = "
                f"{start.image_of(g.index)}",
                generator=g.name,
                residue=(at_zero - start.image_of(g.index)).format(),
            )
        at_one = image.evaluate(1)
        if at_one != end.image_of(g.index):
            return CheckResult.failed(
                "homotopy-endpoint-1",
                f"ev1({h.label}({g.name})) = {at_one} but {end.label}({g.name}) = "
                f"{end.image_of(g.index)}",
                generator=g.name,
                residue=(at_one - end.image_of(g.index)).format(),
            )
    return CheckResult.passed(
        "homotopy", f"{h.label} is a homotopy from {start.label} to {end.label} through degree {cap}"
    )
