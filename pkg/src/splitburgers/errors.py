"""Exception types raised by the solvers and the CLI."""


class SplitBurgersError(Exception):
    """Base class for all errors raised by this package."""


class UnknownNameError(SplitBurgersError):
    """A scheme or extrapolation rule name is not in the registry."""


class DimensionMismatchError(SplitBurgersError):
    """Array length does not match the grid or stencil it is used with."""


class InadmissibleStepError(SplitBurgersError):
    """A diffusion flow was requested for a step outside the semigroup
    (negative real part), which the heat flow cannot run backwards."""


class BlowUpError(SplitBurgersError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class BackendCompatibilityError(SplitBurgersError):
    """State or step type not supported by the selected spatial backend."""


class StabilityGuardError(SplitBurgersError):
    """Complex-coefficient composition requested on the Dirichlet
    (finite-difference/WENO) backend, where it is unstable."""


class ConfigurationError(SplitBurgersError):
    """Invalid run configuration (bad key, indivisible step, empty report...)."""


class PrecisionError(SplitBurgersError):
    """A requested tolerance could not be certified."""

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class EvaluationError(SplitBurgersError):
    """Closed-form solution evaluated outside its certified domain."""
