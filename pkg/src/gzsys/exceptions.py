"""Exception hierarchy shared by all modules."""


class GZError(Exception):
    """Base class for errors raised by gzsys."""


class ValidationError(GZError, ValueError):
    """Input violates a type invariant (hermiticity, interlacing, ...)."""


class NumericalError(GZError, ArithmeticError):
    """A function evaluation produced a non-finite value."""


class DegeneracyError(GZError, ArithmeticError):
    """An eigenvalue gap collapsed below the smoothness guard.

    ``time`` is set when the failure happened along a flow.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ConsistencyError(GZError, RuntimeError):
    """Internal cross-check failed (e.g. negative squared border modulus)."""


class FiberInconsistencyError(GZError, RuntimeError):
    """Fiber dimension and rank oracle disagree after all reseeds."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
