"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`OSEError`.
The CLI maps :class:`DataError` subclasses to exit code 2 and everything
else (I/O, environment) to exit code 1.
"""


class OSEError(Exception):
    """Base class for library errors."""


class DataError(OSEError):
    """Bad input data or an unsolvable mathematical problem."""


class ZeroVector(DataError, ValueError):
    pass


class DimMismatch(DataError, ValueError):
    pass


class NonFiniteVector(DataError, ValueError):
    pass


class SingularGram(DataError):
    pass


class DependentRows(DataError):
    pass


class Infeasible(DataError):
    pass


class TargetOutOfRange(Infeasible, ValueError):
    """A prescribed cosine distance lies outside [0, 2]; no vector attains it."""


class AntipodalPair(DataError):
    pass


class InconsistentSystem(DataError):
    pass


class NullspaceEmpty(Infeasible):
    """``N == n`` and the unique solution of ``Vx = w`` is not a unit vector."""


class DegenerateDirection(DataError):
    pass


class UnsupportedCase(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class EmptyFile(DataError):
    pass


class InconsistentDim(ParseError):
    pass


class EmptyTable(DataError):
    pass


class EmptyInput(DataError, ValueError):
    pass


class EmptyAfterFiltering(DataError):
    pass


class OOVToken(DataError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ClassTooSmall(DataError):
    def __init__(self, label, size=None, required=None):
        self.label = label
        msg = f"class {label!r} is too small"
        if size is not None and required is not None:
            msg += f" ({size} records, need {required})"
        super().__init__(msg)


class ExhaustedSubsets(DataError):
    pass


class SynthesisFailed(DataError):
    def __init__(self, label, index, cause=None):
        self.label = label
        self.index = index
        msg = f"synthesis failed for class {label!r}, draw {index}"
        if cause is not None:
            msg += f": {cause}"
        super().__init__(msg)


class EmptyTrainSet(DataError):
    pass
