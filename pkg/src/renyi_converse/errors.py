"""Exception types shared across the library."""


class RenyiConverseError(Exception):
    """Base class for all library errors."""


class ValidationError(RenyiConverseError):
    """A state, channel or instrument failed a structural invariant."""


class NotHermitian(ValidationError):
    pass


class NotPSD(ValidationError):
    pass


class NotUnitTrace(ValidationError):
    pass


class NotTracePreserving(ValidationError):
    pass


class UnknownLabel(RenyiConverseError):
    pass


class DimensionMismatch(RenyiConverseError):
    pass


class NegativeEigenvalue(RenyiConverseError):
    pass


class InvalidRank(RenyiConverseError):
    pass


class AlphaOutOfRange(RenyiConverseError):
    pass


class MissingRegister(RenyiConverseError):
    pass


class RateOutOfRange(RenyiConverseError):
    pass


class TooLarge(RenyiConverseError):
    pass


class OptimizerDiverged(RenyiConverseError):
    pass


class SupportIncompatible(RenyiConverseError):
    pass


class FidelityPreconditionFailed(RenyiConverseError):
    pass


class BoundViolation(RenyiConverseError):
    pass
