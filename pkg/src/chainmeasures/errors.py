"""Exception hierarchy. Every error is a ``ValueError`` subclass so callers can catch broadly."""


class ChainError(ValueError):
    pass


class NonSquare(ChainError):
    pass


class NegativeEntry(ChainError):
    def __init__(self, x, y):
        super().__init__(f"negative transition probability at ({x}, {y})")
        self.x, self.y = x, y


class RowSumExceedsOne(ChainError):
    def __init__(self, x, total):
        super().__init__(f"row {x} sums to {total} > 1")
        self.x, self.total = x, total


class DimensionMismatch(ChainError):
    pass


class InvalidMeasure(ChainError):
    pass


class NegativeDensity(ChainError):
    pass


class ZeroTotalMass(ChainError):
    pass


class BaseMeasureNotInG(ChainError):
    """Raised when an operation needs a conservative reversible base measure."""


HypothesisViolated = BaseMeasureNotInG


class NotAMember(ChainError):
    pass


class EnumerationCapExceeded(ChainError):
    pass


class BadParameter(ChainError):
    pass


class NonConservativeKernel(ChainError):
    pass


class EmptySample(ChainError):
    pass


class ParseError(ChainError):
    """Malformed input file. ``where`` names the field or line at fault."""

    def __init__(self, where, message):
        super().__init__(f"{where}: {message}")
        self.where = where
