"""Exception hierarchy shared by every module."""


class PixelArrayError(ValueError):
    """Base class for all errors raised by this package."""


class DuplicatePort(PixelArrayError):
    pass


class BadBounds(PixelArrayError):
    pass


class BadResolution(PixelArrayError):
    pass


class UnknownVariable(PixelArrayError):
    pass


class ExposedNotUsed(PixelArrayError):
    pass


class InvalidDiagram(PixelArrayError):
    pass


class IndexOutOfRange(PixelArrayError, IndexError):
    pass


class PackMismatch(PixelArrayError):
    pass


class SemiringMismatch(PixelArrayError):
    pass


class CostOverflow(PixelArrayError):
    """A contraction step would iterate more link entries than the budget allows."""

    def __init__(self, cost, budget, what="contraction"):
        self.cost = cost
        self.budget = budget
        super().__init__(
            f"{what} needs {cost} link entries, budget is {budget}; "
            "re-cluster or lower the resolution"
        )


class EmptyCluster(PixelArrayError):
    pass


class FullCluster(PixelArrayError):
    pass


class TooManyPacks(PixelArrayError):
    pass


class InvalidTree(PixelArrayError):
    pass


class RelationSyntaxError(PixelArrayError):
    """Malformed relation text; ``position`` is the 0-based character offset."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class UnknownFunction(RelationSyntaxError):
    pass


class MissingVariable(PixelArrayError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class NotTwoDimensional(PixelArrayError):
    pass


class SystemFileError(PixelArrayError):
    """Problem in a system file; ``line`` is 1-based, or None for whole-file issues."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
