"""Exception hierarchy shared by every module."""


class TraceLabError(Exception):
    """Base class for all errors raised by toeplitz_trace_lab."""


class SingularPoint(TraceLabError, ValueError):
    pass


class NonIntegrable(TraceLabError, ValueError):
    pass


class ToleranceNotMet(TraceLabError, ArithmeticError):
    pass


class InsufficientLags(TraceLabError, ValueError):
    pass


class DimensionMismatch(TraceLabError, ValueError):
    pass


class DegenerateFit(TraceLabError, ValueError):
    pass


class StochasticFloor(TraceLabError, ArithmeticError):
    """Monte Carlo noise is too large relative to the quantity being measured."""


class RejectionStarved(TraceLabError, RuntimeError):
    """Rejection sampler accepted too small a fraction of proposals."""


class UnsupportedScale(TraceLabError, ValueError):
    pass


class ValidationError(TraceLabError, ValueError):
    pass


class ParseError(TraceLabError, ValueError):
    def __init__(self, message, line=None, field=None):
        super().__init__(message)
        self.line = line
        self.field = field
