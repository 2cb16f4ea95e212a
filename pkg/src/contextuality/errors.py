"""Exception types and the violation record shared by the validators."""

from __future__ import annotations

from dataclasses import dataclass


class ContextualityError(Exception):
    """Base class for every error raised by this package."""


class ModelError(ContextualityError, ValueError):
    """A scenario, model or file is malformed or breaks an invariant."""


class SizeLimitError(ContextualityError, ValueError):
    """An exhaustive search would exceed its configured cap."""


class NumericalError(ContextualityError, ArithmeticError):
    """A floating-point quantity left its declared tolerance band."""


class CommensurabilityError(ContextualityError, ValueError):
    """Operators that were required to commute do not."""


class GluingError(ContextualityError, ValueError):
    """Local valuations disagree on an overlap."""

    def __init__(self, message: str, element=None, values: tuple = ()):
        super().__init__(message)
        self.element = element
        self.values = values


class UnsupportedShapeError(ContextualityError, ValueError):
    """The input is valid but outside what an operation can render."""


@dataclass(frozen=True)
class Violation:
    kind: str
    location: tuple
    message: str

    def __str__(self) -> str:
        where = "/".join(str(part) for part in self.location)
        return f"[{self.kind}] {where}: {self.message}" if where else f"[{self.kind}] {self.message}"
