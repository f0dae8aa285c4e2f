"""Exception hierarchy shared by every evtinfo module."""
from __future__ import annotations


class EvtInfoError(Exception):
    """Base class for all library errors."""


class DomainError(EvtInfoError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class UnsupportedError(EvtInfoError):
    """The requested operation needs data the distribution does not carry."""


class DivergenceError(EvtInfoError):
    """An adaptive computation failed to converge within its budget.

    ``partial`` holds the best value reached before giving up, ``error_estimate``
    the corresponding error bound.
    """

    def __init__(self, message: str, partial: float = float("nan"),
                 error_estimate: float = float("inf")):
        super().__init__(message)
        self.partial = partial
        self.error_estimate = error_estimate


class EvaluationError(EvtInfoError):
    """The integrand or target function produced NaN."""


class BracketError(EvtInfoError, ValueError):
    """A root bracket does not straddle a sign change."""


class BudgetError(EvtInfoError):
    """An iterative solver ran out of iterations before reaching tolerance."""


class EstimationError(EvtInfoError):
    """A Monte Carlo summand was not finite."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index
