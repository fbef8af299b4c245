"""Exception and warning types.

``NumericalError`` subclasses signal a failure of the mathematics at a
particular parameter point (the CLI maps them to exit code 3). Everything
else deriving from ``QgtError`` is an input/validation problem (exit 2).
"""


class QgtError(Exception):
    pass


class NumericalError(QgtError):
    pass


class NotHermitian(NumericalError):
    pass


class TraceNotOne(NumericalError):
    pass


class NotFullRank(NumericalError):
    pass


class ConvergenceFailure(NumericalError):
    pass


class AmbiguousMatching(NumericalError):
    pass


class DegenerateSpectrum(NumericalError):
    pass


class LevelCrossing(NumericalError):
    pass


class TruncationTooSmall(NumericalError):
    pass


class DimensionMismatch(QgtError):
    pass


class DomainExceeded(QgtError):
    pass


class NotPure(QgtError):
    pass


class AxisOutOfRange(QgtError):
    pass


class NotTwoParameter(QgtError):
    pass


class ConfigError(QgtError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class UnknownModel(ConfigError):
    pass


class IncompatibleTaskRegion(ConfigError):
    pass


class NearDegenerateWarning(UserWarning):
    pass


class TruncationWarning(UserWarning):
    pass
