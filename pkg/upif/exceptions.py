"""
Error hierarchy for the UPIF simulator.
"""


class UPIFError(Exception):
    """Base class for all simulator errors."""


class DimensionError(UPIFError, ValueError):
    """Raised when matrix or vector shapes do not fit together."""


class DomainError(UPIFError, ValueError):
    """Raised when an argument lies outside its admissible range."""


class DegeneracyError(UPIFError, ArithmeticError):
    """Raised when a basis or matrix is singular or rank deficient."""


class ContractViolationError(UPIFError, ValueError):
    """Raised when an input breaks a documented precondition (e.g. non-unimodular A)."""


class InternalSearchError(UPIFError, RuntimeError):
    """Raised when a search that should always succeed comes back empty."""


class EnumerationBudgetError(UPIFError, RuntimeError):
    """Raised when lattice enumeration visits more nodes than allowed."""

    def __init__(self, budget, message=None):
        self.budget = budget
        super().__init__(message or f"Enumeration budget of {budget} nodes exceeded")
