"""Exception types shared across the package."""

from __future__ import annotations


class TrustQuantError(Exception):
    """Base class for all package errors."""


class ValidationError(TrustQuantError, ValueError):
    """An input field violates its documented domain.

    ``field`` is a dotted/indexed path such as ``cycles[0].p`` so the CLI can
    point at the offending value.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")

    def prefixed(self, prefix: str) -> "ValidationError":
        """Return a copy whose field path is nested under ``prefix``."""
        sep = "" if self.field.startswith("[") else "."
        return ValidationError(f"{prefix}{sep}{self.field}", self.message)


class DomainError(TrustQuantError, ValueError):
    """A computation is undefined for otherwise well-formed inputs."""


class DegeneracyError(DomainError):
    """Repeated eigenvalue; no unique dominant direction exists."""


class OrderingError(TrustQuantError, ValueError):
    """A time-ordered sequence received an out-of-order element."""


class InsufficientDataError(TrustQuantError, ValueError):
    """Not enough observations for the requested statistic."""


class FormatError(TrustQuantError, ValueError):
    """A file is readable but not in the expected format."""
