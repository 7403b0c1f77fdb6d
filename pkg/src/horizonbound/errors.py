"""Exception hierarchy shared by all modules."""


class HorizonBoundError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(HorizonBoundError, ValueError):
    pass


class NotHermitianError(HorizonBoundError, ValueError):
    pass


class NegativeEigenvalueError(HorizonBoundError, ValueError):
    pass


class DensityError(HorizonBoundError, ValueError):
    """A matrix failed density-operator validation.

    ``invariant`` is one of ``"hermiticity"``, ``"trace"``, ``"positivity"``;
    ``magnitude`` is the size of the violation.
    """

    def __init__(self, invariant: str, magnitude: float):
        self.invariant = invariant
        self.magnitude = float(magnitude)
        super().__init__(f"{invariant} violation {self.magnitude:.3g}")


class TruncationError(HorizonBoundError, ValueError):
    pass


class CompletenessError(HorizonBoundError, ValueError):
    def __init__(self, residual: float):
        self.residual = float(residual)
        super().__init__(f"Kraus completeness violated, residual norm {self.residual:.3g}")


class DilationError(HorizonBoundError, ValueError):
    def __init__(self, column: int, message: str = "unitary completion failed"):
        self.column = column
        super().__init__(f"{message} at column {column}")


class QuadratureError(HorizonBoundError, ArithmeticError):
    pass
