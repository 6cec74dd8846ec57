"""Exception hierarchy shared by all isingqsp modules."""

from __future__ import annotations


class QSPError(Exception):
    """Base class for every error raised deliberately by this package."""


class DomainError(QSPError, ValueError):
    """An input lies outside the domain where an operation is defined."""


class DegenerateAxisError(DomainError):
    """A composite rotation is +/- identity, so its axis is undefined."""


class GaplessPointError(DomainError):
    """The dispersion vanishes, so the Bloch direction is undefined."""


class SingularParameterError(DomainError):
    """A parameter hits a pole of the map being evaluated."""


class BranchError(DomainError):
    """A logarithm argument leaves the principal domain."""


class InfeasibleTargetError(DomainError):
    """A polynomial target cannot be realised by a QSP sequence.

    Attributes
    ----------
    x : complex or float or None
        Sample point at which the violation was detected.
    value : float or None
        Size of the violation at ``x``.
    """

    def __init__(self, message: str, x=None, value=None):
        super().__init__(message)
        self.x = x
        self.value = value


class ConvergenceError(QSPError, RuntimeError):
    """An iterative routine stopped without meeting its tolerance.

    Attributes
    ----------
    residual : float
        Best residual reached before giving up.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual
