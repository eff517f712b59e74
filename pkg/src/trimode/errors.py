"""Exception hierarchy.

Two families are kept apart so the command line can map them to exit codes:
``ValidationError`` subclasses mean the inputs were rejected, while
``NumericalError`` subclasses mean a well-posed computation failed.
"""


class TrimodeError(Exception):
    """Base class for all package errors."""


class ValidationError(TrimodeError, ValueError):
    """Invalid input parameters.

    Parameters
    ----------
    key : str
        Name of the offending parameter.
    message : str, optional
        Human-readable explanation.
    """

    def __init__(self, key, message=None):
        self.key = key
        super().__init__(message if message is not None else key)


class UnitError(ValidationError):
    """Nonpositive physical frequency handed to a unit conversion."""


class NumericalError(TrimodeError):
    """A computation failed on valid inputs."""


class DivergenceError(NumericalError):
    """Integrated state exceeded the configured magnitude bound."""


class StepSizeUnderflow(NumericalError):
    """Adaptive step shrank below the representable resolution."""


class BackwardThresholdUndefined(NumericalError):
    """The backward saddle-node power is not positive.

    The forward threshold is still available as ``P_forward``.
    """

    def __init__(self, message, P_forward=None):
        self.P_forward = P_forward
        super().__init__(message)


class NotApplicable(NumericalError):
    """The requested quantity does not exist for these parameters."""


class SingularResponse(NumericalError):
    """Response matrix too ill-conditioned to invert reliably."""


class NoInteriorMaximum(NumericalError):
    """Optimum sits on the boundary of the search interval."""


class NoContrastPeak(NumericalError):
    """Forward/backward contrast is numerically zero everywhere."""


class InsufficientData(NumericalError):
    """Time series too short to classify."""


class NoSignChange(NumericalError):
    """Root is not bracketed by the supplied interval."""
