"""Exception hierarchy shared by every module."""


class TreeDetError(Exception):
    """Base class for all errors raised by treedet."""


class ParseError(TreeDetError, ValueError):
    """Malformed automaton text.  Carries 1-based line and column when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class ContractError(TreeDetError, ValueError):
    """An operation was called outside its precondition."""


class ResourceLimitExceeded(TreeDetError):
    """A configured cap on states, transitions or tuples was hit."""


class DeterminizationTimeout(ResourceLimitExceeded):
    """The wall-clock deadline passed at a cancellation checkpoint."""
