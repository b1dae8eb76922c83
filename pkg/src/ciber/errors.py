"""Exception hierarchy shared by every ciber module."""


class CiberError(Exception):
    """Base class for all errors raised by ciber."""


class DataError(CiberError, ValueError):
    """Input data violates a precondition."""


class MissingTarget(DataError):
    pass


class NonRectangular(DataError):
    pass


class EmptyData(DataError):
    pass


class MissingValue(DataError):
    pass


class ClassTooSmall(DataError):
    pass


class TooFewRows(DataError):
    pass


class SingleClass(DataError):
    pass


class ConstantColumn(DataError):
    pass


class ZeroVariance(DataError):
    pass


class UnknownClass(DataError, IndexError):
    pass


class DimensionMismatch(DataError):
    pass


class TooFewRepeats(DataError):
    pass


class CorruptModel(CiberError):
    pass


class VersionMismatch(CiberError):
    pass
