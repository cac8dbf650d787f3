"""Exception types shared across the package."""


class ZeckLogicError(Exception):
    """Base class for all package errors."""


class MalformedInputError(ZeckLogicError, ValueError):
    """Input text or digits outside the accepted format."""


class ContractError(ZeckLogicError, ValueError):
    """An operation was called outside its stated preconditions."""


class GuessError(ZeckLogicError, RuntimeError):
    """Automaton synthesis could not classify or stabilize."""


class VerificationError(ZeckLogicError, RuntimeError):
    """A construction-time self check failed; the result must not be used."""


class ScriptError(ZeckLogicError):
    """Error raised while parsing or executing a command script."""

    def __init__(self, message, command=None):
        super().__init__(message)
        self.command = command


class ParseError(ScriptError):
    """Syntax error with source position."""

    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class CompileError(ScriptError):
    """Formula cannot be compiled against the current store."""
