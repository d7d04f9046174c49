"""
Exceptions raised by persistence-cdga.

Verification routines report failed checks through CheckResult values; the
exceptions below are reserved for malformed input and violated preconditions.
"""

from typing import Optional


class PersistenceCDGAError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PersistenceCDGAError, ValueError):
    """Malformed model, certificate, family or expression text.

    Args:
        message: What went wrong
        line: 1-based line number in the source text, if known
        source: File name or label of the source text
    """

    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None):
        self.line = line
        self.source = source
        location = ""
        if source:
            location = f"{source}:"
        if line is not None:
            location = f"{location}{line}:"
        super().__init__(f"{location} {message}".strip() if location else message)


class FieldError(PersistenceCDGAError, ValueError):
    """Unknown field name or a scalar that does not live in the selected field."""


class AlgebraMismatchError(PersistenceCDGAError, ValueError):
    """Elements or morphisms from different algebras were combined."""


class DegreeError(PersistenceCDGAError, ValueError):
    """A generator or element has an impossible degree."""


class CapExceededError(PersistenceCDGAError, ValueError):
    """A computation needs degrees (or powers of t) beyond the configured cap."""


class ModelError(PersistenceCDGAError, ValueError):
    """A relative Sullivan model violates a structural requirement."""


class StageEscapeError(ModelError):
    """The differential of a fiber generator involves a generator of a later stage."""

    def __init__(self, generator: str, stage: int, escaped_to: int):
        self.generator = generator
        self.stage = stage
        self.escaped_to = escaped_to
        super().__init__(
            f"d({generator}) involves stage {escaped_to} but {generator} lives at stage {stage}"
        )


class DimensionMismatchError(PersistenceCDGAError, ValueError):
    """Vectors or matrices of incompatible sizes."""


class UnknownEntryError(PersistenceCDGAError, KeyError):
    """A corpus entry name that is not registered."""
