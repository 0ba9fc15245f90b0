"""
Error hierarchy for the coherent-state position-verification lab.

Every precondition violation raised by the library is a ``DomainError`` (and
therefore a ``ValueError``), so callers that only care about bad input can keep
catching ``ValueError``.
"""

from typing import Optional


class QPVError(Exception):
    """Base class for all errors raised by coherent_qpv."""


class DomainError(QPVError, ValueError):
    """An argument lies outside the domain of the operation."""


class CausalityError(DomainError):
    """A message was recorded as received before it was sent."""


class CapacityError(QPVError):
    """A requested structure does not fit in memory."""


class ConfigError(QPVError, ValueError):
    """
    A run configuration is malformed or violates a constraint.

    Args:
        message: Human readable description
        key: Offending ``section.key`` when known
        line: 1-based line number in the configuration document when known
    """

    def __init__(
        self, message: str, key: Optional[str] = None, line: Optional[int] = None
    ):
        self.key = key
        self.line = line
        prefix = ""
        if key:
            prefix += f"[{key}] "
        if line is not None:
            prefix += f"(line {line}) "
        super().__init__(prefix + message)


class OutputError(QPVError, OSError):
    """A report could not be written to its destination."""
