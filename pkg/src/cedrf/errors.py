"""Exception types raised by the library and mapped to CLI exit codes."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class InfeasibleError(ValueError):
    """The requested operating point cannot be reached at finite rate."""


class SizeError(ValueError):
    """The problem is too large for the requested exact evaluation path."""
