"""Exception hierarchy shared by every stage of the pipeline."""


class FpGuardError(Exception):
    """Base class; the CLI maps subclasses to exit codes."""


class ParseError(FpGuardError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class FloatOverflow(FpGuardError, ArithmeticError):
    """A value left the finite range of the active format."""


class MissingRange(FpGuardError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnsupportedGuard(FpGuardError):
    """The guard is outside the fragment the Boolean abstraction handles."""


class PreconditionViolated(FpGuardError):
    pass


class TupleLimitExceeded(FpGuardError):
    pass
