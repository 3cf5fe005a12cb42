"""Exception hierarchy shared by every sigeval module."""


class SigEvalError(ValueError):
    """Base class for all sigeval errors."""


# --- scene / answer parsing -------------------------------------------------

class MalformedSigError(SigEvalError):
    """The document is not valid JSON or does not have the SIG shape."""


class UnknownKeyError(MalformedSigError):
    pass


class UnknownColorError(MalformedSigError):
    pass


class UnknownKindError(MalformedSigError):
    pass


class DuplicateOrderError(MalformedSigError):
    pass


class OutOfRangeCoordinateError(MalformedSigError):
    pass


class MissingSelfError(MalformedSigError):
    pass


class LengthMismatchError(SigEvalError):
    pass


class IndexOutOfRangeError(SigEvalError):
    pass


class NonIntegerError(SigEvalError):
    pass


# --- assignment / graphs ----------------------------------------------------

class NonFiniteCostError(SigEvalError):
    pass


class TooLargeError(SigEvalError):
    pass


class DegenerateDMaxError(SigEvalError):
    pass


# --- attention pipeline -----------------------------------------------------

class InvalidSpecError(SigEvalError):
    pass


class TooFewPointsError(SigEvalError):
    pass


class DegenerateConfigurationError(SigEvalError):
    pass


class SingularHomographyError(SigEvalError):
    pass


class SizeMismatchError(SigEvalError):
    pass


class ZeroGtError(SigEvalError):
    pass


class MalformedMapError(SigEvalError):
    pass


class ConfigError(SigEvalError):
    pass
