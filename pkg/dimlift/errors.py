"""
Exception hierarchy for dimlift.

Every error carries the process exit code the CLI reports for it, so library
code raises precise exceptions and the command layer only has to map them.
"""

from __future__ import annotations

from typing import Any, Optional, Sequence


class DimliftError(Exception):
    """Base class for all dimlift errors."""

    exit_code = 1


class InputError(DimliftError):
    """Malformed or inconsistent input content."""

    exit_code = 2


class ParseError(InputError):
    """Syntax or schema failure while reading an input document."""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        source: Optional[str] = None,
    ):
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if source:
            where = f"{source}: "
        if line is not None:
            where += f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(f"{where}{message}")


class ShapeError(InputError, ValueError):
    """Dimension or arity mismatch."""


class PosetError(InputError):
    """The given relation is not a partial order."""


class CoherenceError(InputError):
    """Two cover paths of a diagram disagree."""

    def __init__(self, pair: tuple[Any, Any], message: Optional[str] = None):
        self.pair = pair
        super().__init__(message or f"diagram is not coherent on {pair[0]} <= {pair[1]}")


class PositivityError(InputError):
    """A matrix block does not map the positive cone into the positive cone."""

    def __init__(
        self,
        message: str,
        block: Optional[tuple[int, int]] = None,
        row: Optional[int] = None,
        witness: Optional[Sequence[Any]] = None,
    ):
        self.block = block
        self.row = row
        self.witness = tuple(witness) if witness is not None else None
        super().__init__(message)


class UnsupportedInputError(DimliftError):
    """Input is well formed but outside what the constructions handle."""

    exit_code = 3


class PreconditionError(DimliftError):
    """A hypothesis of a construction does not hold."""

    exit_code = 3


class InfeasibleError(DimliftError):
    """No interpolant exists for the given bounds."""

    exit_code = 3


class ResourceError(DimliftError):
    """A configured size cap was exceeded."""

    exit_code = 4

    def __init__(self, message: str, cap_name: Optional[str] = None, limit: Optional[int] = None):
        self.cap_name = cap_name
        self.limit = limit
        super().__init__(message)


class InvariantViolation(DimliftError):
    """An internal re-verification failed. Always a bug."""

    exit_code = 5
