"""Exception types, each carrying the process exit code the CLI maps it to."""


class CCHSError(Exception):
    """Base class for library errors."""

    exit_code = 1


class ParameterError(CCHSError):
    """A parameter is out of range or otherwise invalid (exit code 2)."""

    exit_code = 2


class FormatError(CCHSError):
    """A file is missing, unreadable or malformed (exit code 3)."""

    exit_code = 3


class NumericalError(CCHSError):
    """A computation produced non-finite results (exit code 4)."""

    exit_code = 4
