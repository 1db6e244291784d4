"""Exception hierarchy shared by all modules."""


class PgsorError(Exception):
    """Base class for errors raised by this package."""


class InvalidDimensionError(PgsorError, ValueError):
    pass


class InvalidInputError(PgsorError, ValueError):
    pass


class DimensionMismatchError(PgsorError, ValueError):
    pass


class NotPositiveDefiniteError(PgsorError, ArithmeticError):
    """A matrix that must be SPD produced a non-positive pivot."""


class MatrixMarketParseError(PgsorError, ValueError):
    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class ProblemGenerationError(PgsorError):
    pass


class ScalingError(PgsorError, ValueError):
    """Complex scaling produced a real part that is not SPD."""


class DegenerateSpectrumError(PgsorError, ValueError):
    pass


class InsufficientDataError(PgsorError, ValueError):
    pass


class ZeroRightHandSideError(PgsorError, ZeroDivisionError):
    pass
