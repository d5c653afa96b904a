"""Exception hierarchy shared by every permascale module."""


class PermascaleError(Exception):
    """Base class for all library errors."""


class DimensionError(PermascaleError, ValueError):
    """Input has the wrong shape (e.g. a non-square matrix)."""


class CapExceeded(PermascaleError):
    """Matrix order exceeds the configured permanent cap."""


class InternalError(PermascaleError):
    """A numerical invariant the library relies on was violated."""


class NonPositiveEntry(PermascaleError, ValueError):
    pass


class NegativeEntry(PermascaleError, ValueError):
    pass


class NotInPn(PermascaleError):
    """Matrix has a positive entry lying on no positive diagonal.

    Such matrices admit no Sinkhorn decomposition; apply
    :func:`permascale.pattern.pi_projection` first.
    """


class MaxIterExceeded(PermascaleError):
    """Iteration budget exhausted before reaching the tolerance.

    The best iterate is kept on ``partial`` so callers can inspect it.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class BracketFailure(PermascaleError):
    pass


class BoundsViolated(PermascaleError, ValueError):
    pass


class DomainError(PermascaleError, ValueError):
    pass


class AllZeroAlpha(PermascaleError, ValueError):
    pass


class ZeroMeanExponent(PermascaleError, ValueError):
    pass
