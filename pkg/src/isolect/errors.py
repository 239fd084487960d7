"""Shared exception types."""


class IsolectError(Exception):
    """Base class for every error raised by this package."""


class DomainError(IsolectError, ValueError):
    """A value lies outside the domain of a formula or transform."""


class InputFormatError(IsolectError, ValueError):
    """An input file or table is malformed; the message carries the location."""


class ConvergenceError(IsolectError, RuntimeError):
    """An iterative solve did not converge within its iteration budget."""
