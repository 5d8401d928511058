"""Exception hierarchy shared by every module."""


class ImpoisError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(ImpoisError, ValueError):
    """A numeric parameter is out of its admissible range."""


class UnsupportedFunctionError(ImpoisError):
    """The function lacks the metadata required by the requested computation."""


class ContractViolationError(ImpoisError):
    """Declared function metadata disagrees with the evaluator."""


class DimensionError(ImpoisError, ValueError):
    """Operands have incompatible lengths."""


class StepTooLargeError(ImpoisError):
    """An Euler step would leave the set of valid lower transition operators."""


class ToleranceError(ImpoisError):
    """The requested tolerance needs more grid steps than allowed.

    ``achievable_eps`` is the smallest tolerance reachable under the cap.
    """

    def __init__(self, message, achievable_eps=None):
        super().__init__(message)
        self.achievable_eps = achievable_eps


class OracleBudgetError(ImpoisError):
    """A brute-force enumeration would exceed its budget."""
