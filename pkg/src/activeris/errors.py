"""Exception hierarchy shared by all modules."""


class ActiveRISError(Exception):
    """Base class for every error raised by this package."""


class InvalidGeometryError(ActiveRISError, ValueError):
    pass


class OutOfModelRangeError(ActiveRISError, ValueError):
    pass


class DegenerateDistributionError(ActiveRISError, ValueError):
    pass


class DomainError(ActiveRISError, ValueError):
    pass


class QuadratureError(ActiveRISError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance.

    The achieved error estimate is kept in ``abserr``.
    """

    def __init__(self, message, abserr=None):
        super().__init__(message)
        self.abserr = abserr


class ConstraintViolationError(ActiveRISError, ValueError):
    pass


class ResonanceSingularityError(ActiveRISError, ArithmeticError):
    pass


class InstabilityError(ActiveRISError, ArithmeticError):
    pass


class PeakSingularityError(ActiveRISError, ArithmeticError):
    pass


class InfeasibleResistanceError(ActiveRISError, ValueError):
    pass


class InfeasiblePhaseError(ActiveRISError, ValueError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InfeasibleBudgetError(ActiveRISError, ValueError):
    def __init__(self, message, minimum_budget=None):
        super().__init__(message)
        self.minimum_budget = minimum_budget


class ModelInversionError(ActiveRISError, ValueError):
    pass


class ConfigError(ActiveRISError, ValueError):
    pass
