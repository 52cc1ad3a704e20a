"""Exception hierarchy shared by all builders and campaign drivers."""


class GeotreeError(Exception):
    """Base class for all library errors."""


class InvalidInputError(GeotreeError, ValueError):
    """A precondition on user-supplied arguments does not hold."""


class BoundaryExhaustedError(GeotreeError, RuntimeError):
    """A construction needed sample points outside the sampled window.

    The caller is expected to enlarge the window and retry; silent
    truncation is never performed.
    """


class InvariantViolationError(GeotreeError, RuntimeError):
    """An internal structural invariant failed on a built object."""
