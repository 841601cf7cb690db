"""
Exception hierarchy.

Every error carries the process exit code the CLI reports for it.
"""
from __future__ import annotations

from typing import Optional


class LatsumError(Exception):
    exit_code = 2


class UsageError(LatsumError):
    """Malformed command-line input."""
    exit_code = 1


class DomainError(LatsumError, ValueError):
    """Parameter outside the mathematical domain of an operation."""
    exit_code = 1


class TableMismatchError(DomainError):
    """Shell table does not match the request (dimension or length)."""


class SingularPointError(DomainError):
    """Evaluation point sits on the 2πZ³ lattice."""


class ResourceLimitError(LatsumError):
    """Memory or enumeration ceiling exceeded."""


class BudgetExceededError(ResourceLimitError):
    """Requested tolerance is unreachable within the radius budget."""

    def __init__(
        self,
        message: str,
        best_value: float,
        tail_bound: float,
        radius: Optional[int] = None,
    ) -> None:
        super().__init__(message)
        self.best_value = best_value
        self.tail_bound = tail_bound
        self.radius = radius


class AccuracyError(LatsumError):
    """Quadrature refinement did not converge."""


class ComparisonMismatch(LatsumError):
    exit_code = 3
