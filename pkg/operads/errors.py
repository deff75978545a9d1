"""Exceptions raised by the operads package.

Checkers never raise for violated axioms; they return a CheckReport.
The classes here are for malformed input and impossible requests.
"""


class OperadError(Exception):
    """Base class for every error raised on purpose by this package."""


class ConfigError(OperadError, ValueError):
    pass


class SchemaError(OperadError, ValueError):
    """Malformed JSON input. `path` points at the offending value."""

    def __init__(self, path: str, message: str):
        self.path = path or "/"
        self.message = message
        super().__init__(f"{self.path}: {message}")


class GraphError(OperadError, ValueError):
    pass


class ObjectsMismatch(OperadError, ValueError):
    def __init__(self, detail: str = ""):
        super().__init__("objects mismatch" + (f": {detail}" if detail else ""))


class DirectionClash(OperadError, ValueError):
    def __init__(self, detail: str = ""):
        super().__init__("direction clash" + (f": {detail}" if detail else ""))


class MissingDirection(OperadError, ValueError):
    pass


class UnstableKey(OperadError, ValueError):
    pass


class AutomorphismBoundExceeded(OperadError, RuntimeError):
    pass


class NotInvertible(OperadError, ValueError):
    pass


class MissingKey(OperadError, KeyError):
    pass


class TypeMismatch(OperadError, ValueError):
    pass
