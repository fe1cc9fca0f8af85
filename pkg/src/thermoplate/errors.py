"""Exception hierarchy shared by every module of the package."""


class ThermoplateError(Exception):
    """Base class for all package errors."""


class DegenerateFrequency(ThermoplateError, ValueError):
    """The cubic has a triple root (r = 0 with sigma = 0)."""


class OutsideZone(ThermoplateError, ValueError):
    """An asymptotic expansion was requested outside its frequency zone."""


class BranchJump(ThermoplateError):
    """Nearest-neighbour root matching became ambiguous along a grid."""


class DegenerateRoots(ThermoplateError, ZeroDivisionError):
    """Two characteristic roots coincide, so the representation breaks down."""


class StepFailure(ThermoplateError, RuntimeError):
    """The adaptive integrator hit its minimum step size."""


class ToleranceNotMet(ThermoplateError, RuntimeError):
    """Quadrature could not reach the requested relative tolerance."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DomainError(ThermoplateError, ValueError):
    """Argument outside the mathematical domain of a function."""


class BadFit(ThermoplateError, RuntimeError):
    """A rate regression fell below the required goodness of fit."""

    def __init__(self, message, fit=None):
        super().__init__(message)
        self.fit = fit


class UnboundedRatio(ThermoplateError, RuntimeError):
    """A pointwise bound ratio grew under grid refinement."""

    def __init__(self, message, check=None):
        super().__init__(message)
        self.check = check
