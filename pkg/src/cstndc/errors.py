"""Exception hierarchy shared by the solver and the command line."""


class CstnError(Exception):
    """Base class for every error raised by this package."""


class InputError(CstnError, ValueError):
    """Malformed or semantically invalid input."""


class ParseError(InputError):
    """Syntax error in a textual document, annotated with its position."""

    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        where = source or "<input>"
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")
        self.message = message


class ValidationError(InputError):
    """The network breaks one of the well-definedness rules WD1-WD3."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"network is not well defined: {lines}")


class CapacityError(CstnError):
    """A configured size bound would be exceeded."""


class WeightOverflowError(CapacityError, OverflowError):
    """Scaled integer weights or energies do not fit in 64 bits."""


class VerificationError(CstnError, RuntimeError):
    """The solver produced a witness that failed independent verification.

    This always indicates a bug; it is never an expected outcome.
    """
