# utils/exceptions.py


class QuermassError(Exception):
    """Base class for every error raised by the quermass apps."""


class ArgumentError(QuermassError, ValueError):
    """An argument is outside the range an operation accepts."""


class DomainError(ArgumentError):
    """A chart node lies where the chart is singular (the poles for n = 2)."""


class GeometryError(QuermassError):
    """The radial graph is degenerate or a functional has the wrong sign."""


class AccuracyError(QuermassError):
    """A numerical post-check missed its tolerance."""


class IterationError(QuermassError):
    """An iterative procedure did not converge.

    ``best`` holds the best-so-far result when one exists.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class VerificationFailure(QuermassError):
    """A verification check failed; ``seeds`` lists the offending samples."""

    def __init__(self, message, seeds=None, report=None):
        super().__init__(message)
        self.seeds = list(seeds or [])
        self.report = report
