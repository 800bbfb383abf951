"""Exception hierarchy shared by every harmshear module."""


class HarmshearError(Exception):
    """Base class for all errors raised by harmshear."""


class UsageError(HarmshearError, ValueError):
    """Caller violated a documented precondition (shape, order, range)."""


class SingularInputError(HarmshearError, ZeroDivisionError):
    """A reciprocal or quotient was requested of a series with zero constant term."""


class AccuracyError(HarmshearError):
    """Evaluation point too close to the unit circle for the stored truncation."""


class InvalidDilatationError(HarmshearError, ValueError):
    pass


class InvalidBlendError(HarmshearError, ValueError):
    pass


class DegenerateError(HarmshearError):
    pass


class SingularCombinationError(HarmshearError, ZeroDivisionError):
    pass
