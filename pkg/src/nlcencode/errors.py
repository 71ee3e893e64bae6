"""Exception hierarchy shared by all modules."""


class NlcError(Exception):
    """Base class for every error raised by this package."""


class InputError(NlcError, ValueError):
    """An argument violates an operation's precondition."""


class ParseError(InputError):
    """A text file does not follow its declared format."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class HierarchyError(NlcError):
    """A recursive factorization fails its contract."""


class EncodingCorruption(NlcError):
    """The decoder reached a branch that a correct encoding never reaches."""

    def __init__(self, message, context=None):
        if context:
            detail = " ".join(f"{key}={value}" for key, value in context.items())
            message = f"{message} [{detail}]"
        super().__init__(message)
        self.context = dict(context or {})


class InvariantViolation(NlcError):
    """A checked structural invariant turned out to be false."""


class GenerationError(NlcError):
    """An instance generator ran out of its retry budget."""


class RefusalError(NlcError):
    """The input exceeds a configured size limit for an exact algorithm."""
