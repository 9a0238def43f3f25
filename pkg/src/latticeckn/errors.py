"""Exception hierarchy shared by all modules."""


class LatticeCknError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(LatticeCknError, ValueError):
    pass


class NegativeValues(LatticeCknError, ValueError):
    pass


class SupportOutsideBox(LatticeCknError, ValueError):
    pass


class NonConvergence(LatticeCknError, RuntimeError):
    """Raised when the rearrangement sweeps hit ``max_sweeps``.

    ``previous`` and ``last`` hold the outputs of the final two sweeps.
    """

    def __init__(self, message, previous=None, last=None):
        super().__init__(message)
        self.previous = previous
        self.last = last


class ParameterError(LatticeCknError, ValueError):
    """A hypothesis on the inequality parameters is violated.

    ``hypothesis`` names the violated condition, e.g. ``"Subcritical"``.
    """

    def __init__(self, hypothesis, message):
        super().__init__(f"{hypothesis}: {message}")
        self.hypothesis = hypothesis


class InfeasibleBalance(ParameterError):
    def __init__(self, message):
        super().__init__("InfeasibleBalance", message)


class Subcritical(ParameterError):
    def __init__(self, message):
        super().__init__("Subcritical", message)


class ZeroFunction(LatticeCknError, ValueError):
    pass


class StepStall(LatticeCknError, RuntimeError):
    pass


class ScalingDegenerate(LatticeCknError, ValueError):
    pass


class DegenerateTheta(LatticeCknError, ValueError):
    pass


class NotConverged(LatticeCknError, ValueError):
    pass


class BoxTooSmall(LatticeCknError, ValueError):
    pass


class InsufficientSamples(LatticeCknError, ValueError):
    pass


class FormatError(LatticeCknError, ValueError):
    pass


class DuplicateOrZero(FormatError):
    pass
