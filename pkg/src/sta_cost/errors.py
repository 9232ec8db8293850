"""Exception types shared across the package.

The CLI maps these onto stable exit codes: ConfigurationError -> 1,
ValidityError -> 2, AccuracyError -> 3.
"""

from __future__ import annotations


class StaCostError(Exception):
    """Base class for all package errors."""


class ConfigurationError(StaCostError):
    """Malformed or inconsistent configuration (bad JSON, missing field, bad enum)."""


class DomainError(StaCostError, ValueError):
    """Evaluation requested outside the valid domain (e.g. t outside the window)."""


class ValidityError(StaCostError):
    """A physics validity condition is violated.

    Carries ``offending_t`` when the violation is localized in time and
    ``value`` with the offending quantity.
    """

    def __init__(self, message: str, offending_t: float | None = None, value: float | None = None):
        super().__init__(message)
        self.offending_t = offending_t
        self.value = value


class AccuracyError(StaCostError):
    """Requested accuracy not attainable; carries the best value and an error bound."""

    def __init__(self, message: str, best_value=None, error_bound: float | None = None):
        super().__init__(message)
        self.best_value = best_value
        self.error_bound = error_bound


class IntegrationError(StaCostError):
    """ODE integration failed; ``last_t`` is the last successfully reached time."""

    def __init__(self, message: str, last_t: float | None = None):
        super().__init__(message)
        self.last_t = last_t


class DecompositionError(StaCostError):
    """Projection onto the expected basis left a residual above tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual
