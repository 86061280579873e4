"""Exception types shared across the package."""


class SplineFlowError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(SplineFlowError, ValueError):
    """Invalid parameters, sizes, or option combinations."""


class OutOfDomainError(SplineFlowError, ValueError):
    """Parameter value outside the evaluable range of a curve."""


class KnotMultiplicityError(SplineFlowError, ValueError):
    """Knot insertion would exceed the allowed interior multiplicity."""


class DegenerateInputError(SplineFlowError, ValueError):
    """Geometrically degenerate input: duplicate points, vanishing
    tangents, coincident mesh nodes, or parameter sets without a valid
    homogeneous state."""


class FitError(SplineFlowError, RuntimeError):
    """Interpolation system was singular or did not meet the residual bound."""


class OptimizationError(SplineFlowError, RuntimeError):
    """Control-point optimization stalled: the step size underflowed
    without reaching the requested tolerance."""


class TimeStepError(SplineFlowError, RuntimeError):
    """Implicit field solve produced a non-finite result."""


class BlowupError(SplineFlowError, RuntimeError):
    """Non-finite values appeared during evolution.

    ``frames`` holds the frame records captured before the failure so a
    caller can persist the last good state.
    """

    def __init__(self, message, frames=None):
        super().__init__(message)
        self.frames = frames if frames is not None else []
