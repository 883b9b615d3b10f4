"""Exception types shared across the package."""


class CohgraphError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CohgraphError):
    """Malformed input file; the message carries file and line context."""


class ValidationError(CohgraphError):
    """An input violates a documented precondition or invariant."""


class NumericError(CohgraphError):
    """A computation produced non-finite values."""
