"""Exception types shared across the package.

ValueError subclasses indicate a misconfigured request (bad statistics,
bad parameters).  RuntimeError subclasses indicate numerical guards that
tripped on otherwise valid input (no bound state at this momentum,
contaminated time window, ...); the CLI maps the two families onto
distinct exit codes.
"""


class StatisticsError(ValueError):
    """Operation is undefined for the requested exchange statistics."""


class NoBoundStateError(RuntimeError):
    """No bound state exists at this total quasi-momentum (|V| <= |J_K|)."""


class InvalidRegimeError(RuntimeError):
    """Closed-form bound-state expression is outside its validity region."""


class DegenerateDenominatorError(RuntimeError):
    """Quantization-condition denominator vanished; the residual is undefined."""


class BoundaryContaminationError(RuntimeError):
    """The correlation front reached the lattice edge inside the fit window."""


class InsufficientPointsError(RuntimeError):
    """Too few arrival times were detected to fit a front speed."""


class BoundBandGapError(RuntimeError):
    """The spectrum does not split into a separated bound band."""
