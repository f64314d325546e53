"""Typed errors raised across the library."""


class LinsepError(Exception):
    """Base class for all library errors."""


class InversionOfZero(LinsepError):
    """Multiplicative inverse of 0 requested."""


class SingularMatrix(LinsepError):
    """Matrix inversion attempted on a singular matrix."""


class UseGeneralAssignment(LinsepError):
    """Cyclic assignment requires the worker count to divide the dataset count."""


class UnsupportedGroupedParams(LinsepError):
    """Grouped assignment/scheme requested outside the supported parameter family."""


class DegenerateDemand(LinsepError):
    """Demand matrix is rank-deficient where the construction expects full rank.

    Scheme construction does not raise this: degenerate schemes are built and
    flagged, and the decodability verifier reports the consequences.  It is
    raised only by entry points that cannot proceed at all.
    """


class GroupedSolveFailed(LinsepError):
    """Coefficient propagation for the grouped scheme hit an unsolvable step."""


class BadMessageLength(LinsepError):
    """Message length is not divisible by the required split count."""


class ShapeMismatch(LinsepError):
    """Operands have inconsistent shapes or fields."""


class WrongResponderCount(LinsepError):
    """Decoder called with a number of answers different from the threshold."""


class RankDeficientDemand(LinsepError):
    """Full-recovery fallback requires a demand matrix of full row rank."""


class NotCovered(LinsepError):
    """Closed-form cost requested outside the parameter range it covers."""


class Unsupported(LinsepError):
    """Operation stated only for parameters it was not called with."""
