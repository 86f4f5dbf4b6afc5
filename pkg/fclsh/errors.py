"""
Exception hierarchy shared by the library and the command line.

Every error carries the process exit status the CLI reports for it.
"""


class FclshError(Exception):
    """
    Base class for all errors raised by fclsh.

    :param message: Human readable description
    """

    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class UsageError(FclshError, ValueError):
    """Invalid arguments: dimension mismatch, bad parameter combination, missing file."""

    exit_code = 2


class DataError(FclshError, ValueError):
    """Malformed or non-canonical input data."""

    exit_code = 3


class ResourceError(FclshError, MemoryError):
    """A configured budget (tables, ball size, code matrix) would be exceeded."""

    exit_code = 4


def check_same_dims(a: int, b: int, what: str = "vectors") -> None:
    """
    Raise UsageError unless two dimensionalities agree.

    :param a: First dimensionality
    :param b: Second dimensionality
    :param what: Noun used in the message
    """
    if a != b:
        raise UsageError(f"dimension mismatch between {what}: {a} != {b}")
