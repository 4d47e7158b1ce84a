"""Exception types shared across the package."""
from __future__ import annotations


class ValidationError(ValueError):
    """A circuit or instruction violates a structural invariant."""


class ParseError(ValueError):
    """Base for submission-format parse failures (QASM text, Quirk JSON)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}: {message}" if column is None else f"line {line}, col {column}: {message}"
        super().__init__(message)


class QasmSyntaxError(ParseError):
    """Malformed QASM text."""


class UnsupportedGateError(QasmSyntaxError):
    """QASM gate outside the supported set."""


class RegisterIndexError(ParseError, IndexError):
    """Register reference out of declared range."""


class UnsupportedCellError(ParseError):
    """Quirk column cell outside the supported token set."""


class UnsupportedLayoutError(ParseError):
    """Quirk column arrangement we cannot translate (e.g. >2 controls)."""


class TooWideError(ValueError):
    """Job is wider than the configured backend capacity."""

    def __init__(self, width: int, capacity: int):
        self.width = width
        self.capacity = capacity
        super().__init__(f"circuit uses {width} qubits but capacity is {capacity}")


class EmptyBatchError(RuntimeError):
    """No queued job fits the available capacity this cycle."""


class BackendError(RuntimeError):
    """Execution failed on the backend."""


class CapacityExceededError(BackendError):
    """Circuit is wider than the simulator can hold in memory."""


class InvalidShotsError(ValueError):
    """Shot count below 1."""


class LengthMismatchError(ValueError):
    """Measured bitstring length does not match the expected bit count."""


class WidthMismatchError(ValueError):
    """Two distributions with different bit widths were compared."""


class EmptyDistributionError(ValueError):
    """A distribution with no shots where one was required."""


class JournalError(RuntimeError):
    """Job journal is corrupt or unreadable."""
