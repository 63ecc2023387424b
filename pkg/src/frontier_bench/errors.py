"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`FrontierBenchError`. The CLI maps the three families onto exit codes:
input/validation problems (2), solver invariant violations (3); usage errors
are handled by the argument parser (1).
"""

from __future__ import annotations


class FrontierBenchError(Exception):
    """Base class for all package errors."""

    kind = "error"


class InputError(FrontierBenchError, ValueError):
    """Invalid data or arguments supplied by the caller."""

    kind = "input"


class DimensionError(InputError):
    """Inconsistent array shapes when building a problem."""

    kind = "dimension-mismatch"


class NonFiniteError(InputError):
    kind = "non-finite"


class DomainError(InputError):
    """Data is well-formed but outside the domain of the requested model."""

    kind = "domain"


class EmptySelectionError(InputError):
    kind = "empty-selection"


class EmptyPanelError(EmptySelectionError):
    kind = "empty-panel"


class LookupFailure(FrontierBenchError, KeyError):
    """Unknown DMU or period."""

    kind = "lookup"

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class SolverInvariantError(FrontierBenchError, RuntimeError):
    """An LP that must be solvable was not; indicates a bug or corrupt data."""

    kind = "solver-invariant"


class ParseError(InputError):
    """CSV ingestion failure with a location.

    ``line`` is 1-based (the header is line 1); ``column`` is the 1-based
    column number or ``None`` when the whole row is at fault.
    """

    kind = "parse"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(self._format())

    def _format(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.column is not None:
            where.append(f"column {self.column}")
        return f"{self.message} ({', '.join(where)})" if where else self.message


class EmptyFileError(ParseError):
    kind = "empty-file"


class HeaderError(ParseError):
    kind = "header"


class RaggedRowError(ParseError):
    kind = "ragged-row"


class NonNumericError(ParseError):
    kind = "non-numeric"


class NegativeValueError(ParseError):
    kind = "negative-value"


class DuplicateKeyError(ParseError):
    kind = "duplicate-key"

    def __init__(self, message: str, lines: tuple[int, ...]):
        self.lines = lines
        super().__init__(message, line=lines[-1])


class PeriodOrderError(InputError):
    kind = "period-order"
