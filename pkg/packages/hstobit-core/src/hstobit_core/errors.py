"""Exception types shared by the core library and the engine."""

from __future__ import annotations


class HstobitError(Exception):
    """Base exception for hstobit operations."""


class DomainError(HstobitError, ValueError):
    """Raised when an argument lies outside an operation's domain.

    Covers non-finite inputs, dimension mismatches, out-of-range indices
    and degenerate (empty or constant) data.
    """


class IngestionError(DomainError):
    """Raised when a CSV file cannot be turned into numeric data.

    Attributes:
        row: 1-based data row (header excluded), or None for file-level problems
        column: Column name, or None when the problem is not column specific
    """

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        self.row = row
        self.column = column
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class SchemaError(DomainError):
    """Raised when column or coefficient names do not line up."""


class ConfigError(HstobitError):
    """Raised when a configuration file is invalid.

    Attributes:
        unknown_keys: Keys present in the file that the config type does not define
    """

    def __init__(self, message: str, unknown_keys: list[str] | None = None):
        self.unknown_keys = sorted(unknown_keys or [])
        if self.unknown_keys:
            message = f"{message}; unknown keys: {', '.join(self.unknown_keys)}"
        super().__init__(message)


class NumericError(HstobitError, ArithmeticError):
    """Raised when a matrix factorization fails during sampling.

    Carries whatever context was available at the failure point so the
    message can be used for debugging a chain without re-running it.

    Attributes:
        pivot: 0-based index of the failing pivot in a Cholesky factorization
        iteration: 1-based sweep index inside a chain
        tau2: Global scale at the time of failure
        min_lambda2: Smallest local scale at the time of failure
    """

    def __init__(
        self,
        reason: str,
        pivot: int | None = None,
        iteration: int | None = None,
        tau2: float | None = None,
        min_lambda2: float | None = None,
    ):
        self.reason = reason
        self.pivot = pivot
        self.iteration = iteration
        self.tau2 = tau2
        self.min_lambda2 = min_lambda2
        super().__init__(self._build_message())

    def _build_message(self) -> str:
        parts = [self.reason]
        if self.pivot is not None:
            parts.append(f"pivot={self.pivot}")
        if self.iteration is not None:
            parts.append(f"iteration={self.iteration}")
        if self.tau2 is not None:
            parts.append(f"tau2={self.tau2:.6g}")
        if self.min_lambda2 is not None:
            parts.append(f"min_lambda2={self.min_lambda2:.6g}")
        return "; ".join(parts)

    def at_iteration(self, iteration: int) -> NumericError:
        """Return a copy of this error tagged with the sweep index."""
        return NumericError(
            self.reason,
            pivot=self.pivot,
            iteration=iteration,
            tau2=self.tau2,
            min_lambda2=self.min_lambda2,
        )
