"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when an argument violates a precondition (shape, range, sign)."""


class NotInBallError(ValueError):
    """Raised when a vector does not project to an interior point of the ball."""


class IsometryValidationError(ValueError):
    """Raised when a matrix fails the SU(n,1) checks.

    ``residuals`` maps the name of each failed invariant to the size of the
    violation so callers can report it.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})


class NumericalError(ArithmeticError):
    """Raised when a LAPACK routine fails to converge."""


class ResourceLimitError(RuntimeError):
    """Raised when an enumeration would exceed its configured work guard."""
