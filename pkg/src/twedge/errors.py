"""Exception types shared across the package."""


class TwedgeError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TwedgeError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """An evaluation point sits at or beyond a pole of a moment integral.

    Carries the (non-positive) distance to the pole in ``margin``.
    """

    def __init__(self, message: str, margin: float):
        super().__init__(message)
        self.margin = margin


class SolverError(TwedgeError, RuntimeError):
    """A numerical routine failed to reach its accuracy contract."""
