"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage -> 1, data -> 2, service -> 3.
"""


class DefquestError(Exception):
    """Base class for all package errors."""


class UsageError(DefquestError):
    """Bad command-line or API usage (exit code 1)."""


class DataError(DefquestError):
    """Malformed or inconsistent input data (exit code 2)."""


class ParseError(DataError):
    """Structured-text or CoNLL-U input could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class PatternSyntaxError(DataError):
    """Pattern DSL syntax error; carries the offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ServiceError(DefquestError):
    """A remote service failed or misbehaved (exit code 3)."""


class ProtocolError(ServiceError):
    """A remote service answered, but violated the wire contract."""


class StageError(DefquestError):
    """Pipeline stage failure; annotates the underlying error with its stage."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause
