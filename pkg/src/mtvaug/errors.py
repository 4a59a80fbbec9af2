"""Exception types raised across the package."""


class MtvError(Exception):
    """Base class for all package errors."""


class EmptyInput(MtvError, ValueError):
    pass


class MalformedLine(MtvError, ValueError):
    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class DimensionMismatch(MtvError, ValueError):
    pass


class EmptyDataset(MtvError, ValueError):
    pass


class SingleClassDataset(MtvError, ValueError):
    pass


class InvalidGrid(MtvError, ValueError):
    pass


class SchemaError(MtvError, ValueError):
    pass


class MissingBaseline(MtvError, ValueError):
    pass


class MissingLexicon(MtvError, ValueError):
    pass
