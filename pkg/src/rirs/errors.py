"""Exception types raised across the package."""


class RIRSError(Exception):
    """Base class for every error raised by :mod:`rirs`."""


class InvalidArgument(RIRSError, ValueError):
    pass


class InvalidVariant(InvalidArgument):
    """A statistic was requested on data that cannot support it."""


class NumericalFailure(RIRSError, ArithmeticError):
    pass


class DegenerateDenominator(NumericalFailure):
    """The normalising sum of squares is exactly zero."""


class ParseError(RIRSError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnsupportedFormat(ParseError):
    pass
