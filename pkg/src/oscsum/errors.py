"""Exception and warning types shared across the package."""


class OscsumError(Exception):
    """Base class for all package errors."""


class NonInvertible(OscsumError, ValueError):
    """Raised when a residue has no inverse modulo q."""


class UnsupportedWeight(OscsumError, ValueError):
    """Raised for weights whose cusp space is not one-dimensional."""


class RangeExceeded(OscsumError, IndexError):
    """Raised when a request reaches beyond a coefficient table."""


class DegenerateSupport(OscsumError, ValueError):
    """Raised when a window has no room for its two transitions."""


class BudgetExceeded(OscsumError, RuntimeError):
    """Raised when quadrature would need more panels than allowed."""


class Pole(OscsumError, ValueError):
    """Raised when the Gamma function is evaluated at a pole."""


class HypothesisViolated(OscsumError, ValueError):
    """Raised when sampled data break the assumptions of an estimate."""


class NoStationaryPoint(OscsumError, ValueError):
    """Raised when the phase derivative has no sign change."""


class MultipleStationaryPoints(OscsumError, ValueError):
    """Raised when the phase derivative changes sign more than once."""


class RegimeViolated(OscsumError, ValueError):
    """Raised when parameters fall outside the regime of an asymptotic."""


class StationaryOutsideSupport(OscsumError, ValueError):
    """Raised when a stationary point lies outside the amplitude support."""


class NotConverged(OscsumError, RuntimeError):
    """Raised when an extrapolation fails its stability certificate."""


class DenominatorVanishes(OscsumError, ZeroDivisionError):
    """Raised when a rational objective has a zero denominator."""


class TruncationWarning(UserWarning):
    """Emitted when a truncated tail is estimated above tolerance."""
