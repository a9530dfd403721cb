"""Exception types raised across the package."""


class DomainError(ValueError):
    """A matrix violates the structure required by a landscape domain."""


class DimensionError(ValueError):
    """Operand sizes are incompatible (odd size for a dual, mismatched pair)."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to meet its residual target.

    The offending residual is kept on ``residual`` for diagnostics.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InconsistencyError(RuntimeError):
    """A point has a small gradient but its phases are not near multiples of pi."""
