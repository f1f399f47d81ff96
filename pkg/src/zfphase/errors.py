"""Exception hierarchy.

Two families: ``ValidationError`` for inputs that violate a stated
invariant (the CLI maps these to exit code 2) and ``NumericalError`` for
computations that cannot be completed (exit code 1).
"""


class ValidationError(ValueError):
    pass


class DomainError(ValidationError):
    """Argument outside the domain of the function (t <= 0, n == 0, unstable plant...)."""


class DegenerateIntervalError(ValidationError):
    pass


class ConstructionError(ValidationError):
    """Multiplier weights incompatible with the requested class."""


class NumericalError(ArithmeticError):
    pass


class PoleOnBoundaryError(NumericalError):
    """Denominator vanishes on the imaginary axis / unit circle."""


class UndefinedPhaseError(NumericalError):
    pass


class DegeneratePhaseError(NumericalError):
    """1 + kG vanishes at a grid point, so its phase is undefined."""


class NonPositiveMassError(NumericalError):
    pass


class SearchIncompleteError(NumericalError):
    """Raised when a sup-search cannot certify its stopping point.

    The best value found so far is attached as ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
