"""Exception hierarchy shared by every module of the package."""


class MQShapeError(Exception):
    """Base class for all package errors."""


class DomainError(MQShapeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CoverageError(DomainError):
    """The (n, beta) pair is not covered by the band-limited theory."""

    def __init__(self, message="outside theory coverage"):
        super().__init__(message)


class FillDistanceError(DomainError):
    """The fill distance is too large for the advisor's preconditions.

    ``admissible_max`` carries the largest fill distance the active case
    accepts.
    """

    def __init__(self, message, admissible_max):
        super().__init__(message)
        self.admissible_max = admissible_max


class NumericalError(MQShapeError, ArithmeticError):
    """Base for failures of a numerical procedure."""


class IllConditionedError(NumericalError):
    def __init__(self, condition):
        super().__init__(f"ill-conditioned: condition ≈ {condition:.3e}")
        self.condition = condition


class RankDeficiencyError(NumericalError):
    """The polynomial block is rank deficient (centers not unisolvent)."""


class QuadratureError(NumericalError):
    """Adaptive quadrature failed to converge.

    ``estimate`` and ``error`` hold the best result reached.
    """

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
