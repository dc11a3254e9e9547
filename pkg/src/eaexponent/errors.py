"""Exception types raised across the package."""


class InvariantError(ValueError):
    """An input violates a structural invariant (Hermiticity, trace, CPTP)."""


class ShapeError(ValueError):
    """Dimensions of operands do not match."""


class DomainError(ValueError):
    """A spectral function is undefined on part of the spectrum."""


class SizeLimitError(ValueError):
    """A construction exceeds the desk-scale size bound."""


class ConvergenceError(RuntimeError):
    """An iterative solver stopped without meeting its tolerance.

    ``best`` holds the best iterate found, ``details`` whatever diagnostics
    the solver collected (iteration count, residual, sequence values).
    """

    def __init__(self, message, best=None, details=None):
        super().__init__(message)
        self.best = best
        self.details = details or {}
