"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`EPHError`,
so the CLI can map domain failures to exit code 1 without swallowing bugs.
"""


class EPHError(Exception):
    """Base class for library errors."""


class BoundsError(EPHError, ValueError):
    """A size argument is outside the supported range."""


class ArgumentError(EPHError, ValueError):
    """Arguments are individually valid but mutually inconsistent."""


class OrderError(EPHError, ValueError):
    """A requested conversion violates the dominance order."""


class NumericalError(EPHError, ArithmeticError):
    """A decomposition failed or a numerical decision is not trustworthy."""


class SingularMetricError(ArgumentError):
    """The pseudometric has an eigenvalue too close to zero."""


class DegenerateRestrictionError(NumericalError):
    """The pseudometric restricted to a spectral subspace is singular."""


class InconsistencyError(NumericalError):
    """No signed type is compatible with the measured invariants."""
