"""Exception hierarchy shared by every module."""


class AutostructError(Exception):
    """Base class for all errors raised by autostruct."""


class _Missing(AutostructError, KeyError):
    # KeyError quotes its message; keep it readable
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class AlphabetMismatch(AutostructError, ValueError):
    pass


class DuplicateTape(AutostructError, ValueError):
    pass


class UnknownTape(_Missing):
    pass


class ParseError(AutostructError, ValueError):
    """Malformed text input; carries a 1-based line and column."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class ArityMismatch(AutostructError, ValueError):
    pass


class UnknownSymbol(AutostructError, ValueError):
    pass


class SignatureMismatch(AutostructError, ValueError):
    pass


class UnknownRelation(_Missing):
    pass


class RebindError(AutostructError, ValueError):
    pass


class FreeVariablePresent(AutostructError, ValueError):
    pass


class UnknownBuiltin(_Missing):
    pass


class DecodeError(AutostructError, ValueError):
    pass


class NotAFunction(AutostructError, ValueError):
    pass


class NotAPoset(AutostructError, ValueError):
    pass


class InvalidTm(AutostructError, ValueError):
    pass


class NotReversible(AutostructError, ValueError):
    pass


class RejectingHaltState(AutostructError, ValueError):
    pass


class NotABooleanAlgebra(AutostructError, ValueError):
    pass


class LimitExceeded(AutostructError, RuntimeError):
    pass
