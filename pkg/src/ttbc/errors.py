"""Exception hierarchy shared by the derivation pipeline, model builders and harness."""


class TtbcError(Exception):
    """Base class for all package errors."""


class NotSymmetric(TtbcError, ValueError):
    pass


class NotPositiveDefinite(TtbcError, ValueError):
    """Raised when a matrix that must be SPD has a non-positive eigenvalue.

    The offending eigenvalue is kept on ``eigenvalue`` for diagnostics.
    """

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class NonPositiveSpectrum(NotPositiveDefinite):
    """A weighted pencil ``j^{-1} s`` lost strict positivity (no longer hyperbolic)."""


class ConvergenceFailure(TtbcError, RuntimeError):
    pass


class SpectraOverlap(TtbcError, ValueError):
    pass


class SingularMatrix(TtbcError, ValueError):
    pass


class MissingRadius(TtbcError, ValueError):
    pass


class InvalidStiffness(TtbcError, ValueError):
    pass


class InvalidModuli(TtbcError, ValueError):
    pass


class UnstableRun(TtbcError, RuntimeError):
    pass


class FitFailure(TtbcError, RuntimeError):
    pass


class PoleSingularity(TtbcError, RuntimeError):
    pass


class EmptyWindow(TtbcError, ValueError):
    pass
