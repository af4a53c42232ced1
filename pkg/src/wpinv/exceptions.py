"""Exception hierarchy.

Every error raised on purpose by this package derives from
:class:`WpinvError`, so callers can catch the whole family at once.
"""


class WpinvError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(WpinvError, ValueError):
    pass


class NotHermitian(WpinvError, ValueError):
    pass


class NotPositiveDefinite(WpinvError, ValueError):
    pass


class ConvergenceFailure(WpinvError, ArithmeticError):
    pass


class CriterionMismatch(WpinvError):
    """The exp-grid test and the exact spectral-norm criterion disagree."""


class VerificationFailure(WpinvError, ArithmeticError):
    """A computed inverse failed its defining identities within tolerance."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class InconsistentProjectors(WpinvError, ValueError):
    pass


class SingularCore(WpinvError, ArithmeticError):
    pass


class PreconditionUnmet(WpinvError):
    pass


class WitnessFailure(WpinvError, ArithmeticError):
    pass


class Defective(WpinvError):
    """Matrix is not numerically diagonalizable; no spectral witness."""


class NotInvariant(WpinvError, ValueError):
    pass


class NoSolution(WpinvError, ArithmeticError):
    pass
