"""Exception hierarchy shared by every module of the package."""


class RlncInterceptError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgs(RlncInterceptError, ValueError):
    pass


class NotPrimePowerOfTwo(InvalidArgs):
    """Field order is not 2**m with 1 <= m <= 8."""


class ReduciblePolynomial(InvalidArgs):
    pass


class ElementOutOfRange(InvalidArgs):
    pass


class ZeroInverse(RlncInterceptError, ZeroDivisionError):
    pass


class LengthMismatch(InvalidArgs):
    pass


class TooLarge(RlncInterceptError):
    """Exact enumeration was requested beyond its size guard."""


class ConfigError(RlncInterceptError):
    """Bad command-line or config-file input; ``field`` names the culprit."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
