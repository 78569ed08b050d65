"""Exception types raised across the package."""


class AmidsError(Exception):
    """Base class for all package errors."""


class ParseError(AmidsError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class EmptyDatasetError(AmidsError, ValueError):
    pass


class UnknownSymbolError(AmidsError, KeyError):
    def __init__(self, field, symbol):
        self.field = field
        self.symbol = str(symbol)
        super().__init__(f"unknown {field} symbol {str(symbol)!r}")

    def __str__(self):
        return self.args[0]


class InsufficientDataError(AmidsError, ValueError):
    pass


class StratificationError(AmidsError, ValueError):
    pass


class BoundsError(AmidsError, ValueError):
    pass


class ShapeError(AmidsError, ValueError):
    pass


class ConfigError(AmidsError, ValueError):
    pass


class TrainingError(AmidsError, ValueError):
    pass


class FormatError(AmidsError, ValueError):
    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)
