"""Exception hierarchy shared by all modules."""


class OpConvexError(Exception):
    """Base class for library errors."""


class NonSquareError(OpConvexError, ValueError):
    pass


class ExcessAsymmetryError(OpConvexError, ValueError):
    pass


class NotPositiveDefiniteError(OpConvexError, ValueError):
    pass


class DimensionMismatchError(OpConvexError, ValueError):
    pass


class EigensolverFailure(OpConvexError, ArithmeticError):
    pass


class DomainViolationError(OpConvexError, ValueError):
    """A scalar function was evaluated outside (0, inf)."""


class ClassViolationError(OpConvexError, ValueError):
    """A function lacks the operator-monotonicity class a check requires."""


class NotStrictlyPositiveError(OpConvexError, ValueError):
    pass


class UnknownMeanError(OpConvexError, ValueError):
    pass


class InvalidConfigError(OpConvexError, ValueError):
    pass


class SelfCheckError(OpConvexError, ArithmeticError):
    """Two independent routes to the same quantity disagreed."""


class ParseError(OpConvexError, ValueError):
    pass
