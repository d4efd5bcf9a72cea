"""Exception types shared across the package.

Everything derives from :class:`SusyFpError` so callers can catch the
package's failures with a single except clause.  Parameter-validation
errors additionally derive from :class:`ValueError` because that is what
most numpy-flavoured code expects to see for bad scalar arguments.
"""

from __future__ import annotations


class SusyFpError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SusyFpError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(SusyFpError):
    """An iterative evaluation failed to meet its stopping rule."""


class OverflowRangeError(SusyFpError, OverflowError):
    """An intermediate quantity left the representable floating range."""


class BoundViolation(SusyFpError, ValueError):
    """A model parameter violates a solvability bound.

    Attributes
    ----------
    reason : str
        Machine-readable statement of the violated bound, e.g.
        ``"b <= -4*gamma-2"``.
    limit : float
        The bound value.
    given : float
        The offending parameter value.
    """

    def __init__(self, reason: str, limit: float, given: float):
        self.reason = reason
        self.limit = limit
        self.given = given
        super().__init__(f"{reason} (limit={limit!r}, given={given!r})")


class PositivityLoss(SusyFpError):
    """The auxiliary function u crossed zero inside the working window."""

    def __init__(self, x: float, value: float):
        self.x = x
        self.value = value
        super().__init__(f"u({x!r}) = {value!r} <= 0; parameter bound violated "
                         "or numerical fault")


class GridMismatchError(SusyFpError, ValueError):
    """Two grid quantities do not share the same domain and spacing."""


class InconclusiveWindowError(SusyFpError):
    """The working window is too small to classify normalizability."""


class NotStationaryError(SusyFpError):
    """No normalizable stationary density exists for these parameters."""


class BrokenSusyError(SusyFpError):
    """An operation requiring an unbroken system was called on a broken one."""


class TruncationFailure(SusyFpError):
    """The spectral sum cannot reach the requested tolerance.

    Carries the smallest tail bound reachable within the mode cap so a
    caller can report what accuracy *would* have been possible.
    """

    def __init__(self, requested_tol: float, reachable: float, n_cap: int):
        self.requested_tol = requested_tol
        self.reachable = reachable
        self.n_cap = n_cap
        super().__init__(
            f"cannot reach tolerance {requested_tol:g} with {n_cap} modes; "
            f"smallest reachable tail bound is {reachable:g}")


class MassLossError(SusyFpError):
    """Discrete mass bookkeeping failed beyond tolerance.

    Signals a grid or time-step misconfiguration in the PDE evolver, not
    physical absorption (which is tracked separately).
    """


class BlowUpError(SusyFpError):
    """A sampled path left the admissible region."""
