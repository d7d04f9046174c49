"""
Exact coefficient fields for persistence-cdga.

Supported fields:
- Q: rationals (sympy QQ)
- Q(i): Gaussian rationals (sympy QQ_I)

A field can be extended by polynomial parameters; the resulting coefficient
ring carries parametrised morphism families through the algebra layer.
"""

import logging
import re
from functools import lru_cache
from typing import Any, Dict, Optional, Sequence, Tuple

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.polyerrors import CoercionFailed
from sympy.polys.rings import ring

from .errors import FieldError

logger = logging.getLogger(__name__)

FIELD_NAMES = ("Q", "Q(i)")

_ALIASES = {
    "Q": "Q",
    "QQ": "Q",
    "Q(i)": "Q(i)",
    "Q(I)": "Q(i)",
    "QQ_I": "Q(i)",
}

_RATIONAL = re.compile(r"^([+-]?)(\d+)(?:/(\d+))?$")


class Field:
    """An exact coefficient field, optionally with adjoined polynomial parameters.

    Args:
        name: "Q" or "Q(i)"
        parameters: Names of polynomial parameters (e.g. ["lam", "mu"])
    """

    def __init__(self, name: str = "Q", parameters: Sequence[str] = ()):
        canonical = _ALIASES.get(name.strip())
        if canonical is None:
            raise FieldError(f"Unknown field '{name}', expected one of {', '.join(FIELD_NAMES)}")
        self.name = canonical
        self.base = QQ if canonical == "Q" else QQ_I
        self.parameters: Tuple[str, ...] = tuple(parameters)
        self._parameter_elements: Dict[str, Any] = {}
        self.ring = None
        if self.parameters:
            poly_ring, *gens = ring(",".join(self.parameters), self.base)
            self.ring = poly_ring
            self.domain = poly_ring.to_domain()
            self._parameter_elements = dict(zip(self.parameters, gens))
        else:
            self.domain = self.base
        self.zero = self.domain.zero
        self.one = self.domain.one

    def __repr__(self) -> str:
        if self.parameters:
            return f"Field({self.name}[{', '.join(self.parameters)}])"
        return f"Field({self.name})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Field):
            return NotImplemented
        return self.name == other.name and self.parameters == other.parameters

    def __hash__(self) -> int:
        return hash((self.name, self.parameters))

    @property
    def definite(self) -> bool:
        """Whether a sum of squares of nonzero scalars is never zero."""
        return self.name == "Q"

    @property
    def is_parametric(self) -> bool:
        return bool(self.parameters)

    @property
    def ground(self) -> "Field":
        """The field without parameters."""
        return get_field(self.name)

    def with_parameters(self, names: Sequence[str]) -> "Field":
        """Return this field with polynomial parameters adjoined."""
        return Field(self.name, tuple(self.parameters) + tuple(names))

    def parameter(self, name: str) -> Any:
        try:
            return self._parameter_elements[name]
        except KeyError:
            raise FieldError(f"'{name}' is not a parameter of {self!r}") from None

    # ------------------------------------------------------------------
    # Conversion and construction
    # ------------------------------------------------------------------

    def convert(self, value: Any) -> Any:
        """Coerce an int, rational, Gaussian rational or domain element into this field."""
        domain = self.domain
        if domain.of_type(value):
            return value
        try:
            if isinstance(value, bool):
                raise FieldError(f"Cannot use boolean {value!r} as a scalar")
            if isinstance(value, int):
                return domain.convert(value)
            if self.base is not QQ and QQ.of_type(value):
                return domain.convert_from(value, QQ)
            if self.base.of_type(value):
                return domain.convert_from(value, self.base)
            if QQ_I.of_type(value):
                if self.base is QQ:
                    if value.y:
                        raise FieldError(f"{value} is not a rational number; use field Q(i)")
                    return domain.convert_from(value.x, QQ)
                return domain.convert_from(value, QQ_I)
            return domain.convert(value)
        except CoercionFailed as e:
            raise FieldError(f"Cannot convert {value!r} into {self!r}: {e}") from e

    def rational(self, numerator: int, denominator: int = 1) -> Any:
        if denominator == 0:
            raise FieldError("Zero denominator in rational literal")
        return self.convert(QQ(numerator, denominator))

    def gaussian(self, real: Any, imaginary: Any) -> Any:
        if self.name != "Q(i)":
            if imaginary:
                raise FieldError("The imaginary unit requires field Q(i)")
            return self.convert(real)
        return self.convert(QQ_I(real, imaginary))

    @property
    def imaginary_unit(self) -> Any:
        return self.gaussian(0, 1)

    def is_zero(self, value: Any) -> bool:
        return not value

    def is_real(self, value: Any) -> bool:
        if self.base is QQ:
            return True
        if self.is_parametric:
            return all(not c.y for _, c in value.terms())
        return not value.y

    def sign(self, value: Any) -> Optional[int]:
        """Sign of a real scalar, None when the scalar is not real."""
        if self.is_parametric:
            return None
        if self.base is QQ_I:
            if value.y:
                return None
            value = value.x
        if value > 0:
            return 1
        if value < 0:
            return -1
        return 0

    # ------------------------------------------------------------------
    # Literal syntax: p/q and a/b+c/d*i
    # ------------------------------------------------------------------

    def parse_scalar(self, text: str) -> Any:
        """Parse a scalar literal: ``p``, ``p/q``, ``i``, ``a/b+c/d*i``."""
        s = text.replace(" ", "")
        if not s:
            raise FieldError("Empty scalar literal")
        if s.endswith("i"):
            body = s[:-1]
            if body.endswith("*"):
                body = body[:-1]
            split = max(body.rfind("+"), body.rfind("-"))
            if split > 0:
                real_text, imaginary_text = body[:split], body[split:]
            else:
                real_text, imaginary_text = "", body
            if imaginary_text in ("", "+"):
                imaginary = QQ(1)
            elif imaginary_text == "-":
                imaginary = QQ(-1)
            else:
                imaginary = _parse_rational(imaginary_text)
            real = _parse_rational(real_text) if real_text else QQ(0)
            return self.gaussian(real, imaginary)
        return self.convert(_parse_rational(s))

    def format_scalar(self, value: Any) -> str:
        if self.is_parametric:
            return str(value)
        if self.base is QQ:
            return _format_rational(value)
        real, imaginary = value.x, value.y
        if not imaginary:
            return _format_rational(real)
        if imaginary == 1:
            imaginary_text = "i"
        elif imaginary == -1:
            imaginary_text = "-i"
        else:
            imaginary_text = f"{_format_rational(imaginary)}*i"
        if not real:
            return imaginary_text
        if imaginary_text.startswith("-"):
            return f"{_format_rational(real)}{imaginary_text}"
        return f"{_format_rational(real)}+{imaginary_text}"


def _parse_rational(text: str) -> Any:
    match = _RATIONAL.match(text)
    if not match:
        raise FieldError(f"Invalid scalar literal '{text}'")
    sign, numerator, denominator = match.groups()
    den = int(denominator) if denominator else 1
    if den == 0:
        raise FieldError(f"Zero denominator in '{text}'")
    num = int(numerator)
    return QQ(-num if sign == "-" else num, den)


def _format_rational(value: Any) -> str:
    numerator, denominator = int(QQ.numer(value)), int(QQ.denom(value))
    if denominator == 1:
        return str(numerator)
    return f"{numerator}/{denominator}"


@lru_cache(maxsize=None)
def get_field(name: str = "Q") -> Field:
    """Return the shared Field instance for a field name."""
    return Field(name)
