"""Error kinds raised by the toolkit"""


class ToolkitError(Exception):
    """Base class; the job loop turns these into failed reports"""


class ConfigError(ToolkitError, ValueError):
    """Scenario or argument does not describe a runnable job"""


class HypothesisViolatedError(ToolkitError, ValueError):
    """A lemma's precondition fails on the verification grid"""


class UnboundedWitnessError(ToolkitError):
    """Witness expression still grows through the last tenth of the grid"""


class NoDecayError(ToolkitError):
    """xy - g(y) keeps increasing up to the bracket cap"""


class ConvexityRequiredError(ToolkitError, ValueError):
    pass


class OverflowGuardError(ToolkitError, OverflowError):
    pass


class CoefficientOverflowError(ToolkitError, OverflowError):
    pass


class QuadratureUnconvergedError(ToolkitError):
    pass


class NotConvergedError(ToolkitError):
    pass


class WeightTooWeakError(ToolkitError):
    """Seminorm objective grows through consecutive box expansions"""


class BoxTooSmallError(ToolkitError):
    pass


class ExtensionMismatchError(ToolkitError):
    pass


class BoundViolatedError(ToolkitError):
    pass


class NoStableShiftError(ToolkitError):
    pass
