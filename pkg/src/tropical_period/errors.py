"""Exception types raised across the package."""


class TropicalPeriodError(Exception):
    """Base class for all errors raised by this package."""


class ZeroVector(TropicalPeriodError, ValueError):
    pass


class MalformedFan(TropicalPeriodError, ValueError):
    pass


class OriginNotInterior(TropicalPeriodError, ValueError):
    pass


class NonIntegralVertex(TropicalPeriodError, ValueError):
    pass


class NotUnimodular(TropicalPeriodError, ValueError):
    pass


class DegenerateFacet(TropicalPeriodError, ValueError):
    pass


class InvalidLoop(TropicalPeriodError, ValueError):
    pass


class UnexpectedCellDim(TropicalPeriodError, RuntimeError):
    pass


class DegreeOverflow(TropicalPeriodError, ValueError):
    pass


class OutOfRange(TropicalPeriodError, IndexError):
    pass


class NonIntegralMonodromy(TropicalPeriodError, ArithmeticError):
    pass


class SubspaceDimMismatch(TropicalPeriodError, ArithmeticError):
    pass


class SpanFailure(TropicalPeriodError, RuntimeError):
    pass


class InvalidInstance(TropicalPeriodError, ValueError):
    """Raised by the CLI loader when an instance document cannot be parsed."""
