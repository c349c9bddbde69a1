"""Exception types raised across the package."""


class PomcpError(Exception):
    """Base class for all package errors."""


class DimensionError(PomcpError, ValueError):
    """Operands live on ground sets (or shapes) of different size."""


class ArgumentError(PomcpError, ValueError):
    pass


class DomainError(PomcpError, ValueError):
    """Input is outside the mathematical domain of the operation (e.g. not a P-matrix)."""


class DegeneracyError(PomcpError, ValueError):
    """A sign that must be nonzero turned out to be zero."""


class GenerationError(PomcpError, RuntimeError):
    pass


class ParseError(PomcpError, ValueError):
    def __init__(self, message, line=None, offset=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)
        self.line = line
        self.offset = offset


class CheckpointError(PomcpError, RuntimeError):
    def __init__(self, message, offset=None):
        super().__init__(message if offset is None else f"{message} (at byte offset {offset})")
        self.offset = offset


class CyclingError(PomcpError, RuntimeError):
    """A pivot walk was cut off before reaching a sink."""

    def __init__(self, message, path=()):
        super().__init__(message)
        self.path = tuple(path)
