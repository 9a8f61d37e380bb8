# tools/errors.py - Exception types raised by the numerical tools
"""
Hard failures raise one of these. Soft numerical outcomes (rank deficiency,
non-convergence, dropped quadrature nodes) are reported as flags on results.
"""


class HullscopeError(ValueError):
    """Base class for all hullscope validation errors."""


class InvalidInputError(HullscopeError):
    pass


class DimensionMismatchError(HullscopeError):
    pass


class NotLiftableError(HullscopeError):
    """The component polynomials share a zero on the closed unit disc."""


class BoundaryContactError(HullscopeError):
    """A hyperplane intersection lies within delta_boundary of the unit circle."""


class DiscInHyperplaneError(HullscopeError):
    pass


class InfiniteJError(HullscopeError):
    """The disc center lies on the hyperplane, so J is infinite."""


class NumericalCancellationError(HullscopeError):
    pass
