"""Exception hierarchy shared by every module of the package.

Each class maps onto one failure mode that a caller may want to handle
separately.  The command line front end translates them into exit codes:
configuration problems give 2, numerical failures give 3 and failed
assumption audits give 4.
"""

from __future__ import annotations


class CanardError(Exception):
    """Base class for all errors raised by :mod:`canard`."""


class ConfigError(CanardError, ValueError):
    """Malformed input file, invalid flag or inconsistent parameters."""


class SeriesMismatchError(CanardError, ValueError):
    """Two truncated series with different centers were combined."""


class NonUnitSeriesError(CanardError, ZeroDivisionError):
    """Division by a series whose constant term vanishes."""


class NonInvertibleJetError(CanardError, ValueError):
    """Series reversion of a jet whose linear coefficient vanishes."""


class QuadratureError(CanardError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance.

    Attributes
    ----------
    estimate : mpf
        Best value obtained before giving up.
    achieved : mpf
        Error estimate attached to ``estimate``.
    """

    def __init__(self, message, estimate=None, achieved=None):
        super().__init__(message)
        self.estimate = estimate
        self.achieved = achieved


class BeyondQuadraticTangencyError(CanardError, ArithmeticError):
    """A tangency whose second Lie derivative also vanishes."""


class NotSlidingError(CanardError, ValueError):
    """A Filippov quantity was requested at a crossing point."""


class NoReturnError(CanardError, ArithmeticError):
    """An orbit failed to come back to the requested section."""


class NonMonotoneError(CanardError, ArithmeticError):
    """A regularization function lost strict monotonicity."""


class InsufficientDerivativesError(CanardError, ValueError):
    """A jet does not carry enough derivatives for the requested order."""


class StiffSegmentError(CanardError, ArithmeticError):
    """The step size collapsed; the scaled chart should be used instead."""


class AuditFailure(CanardError):
    """An assumption audit reported at least one failed item."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SynthesisError(CanardError, ArithmeticError):
    """Synthesis of a regularization function failed its own checks.

    Attributes
    ----------
    reason : str
        ``"upsilon too large"`` when the blended function is not monotone,
        ``"delta too large"`` when fewer than ``k - 1`` simple roots survive.
    result : object or None
        The partially checked synthesis result, for diagnostics.
    """

    def __init__(self, message, reason, result=None):
        super().__init__(message)
        self.reason = reason
        self.result = result


class SeriesTruncationError(CanardError, ArithmeticError):
    """A truncated expansion is too short for the requested accuracy."""
