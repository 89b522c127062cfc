"""Exception types raised by the library.

All argument-validation failures derive from ``ValueError`` so that callers
using plain ``except ValueError`` keep working.
"""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class RankDeficientError(InvalidArgumentError):
    """The Gram matrix is singular or too ill-conditioned to factor."""

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class QuboFormatError(ValueError):
    """A serialized QUBO document does not conform to the schema."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class BudgetExceededError(RuntimeError):
    """A solver was asked for more work than its budget allows."""
