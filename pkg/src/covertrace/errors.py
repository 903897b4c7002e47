"""Exception hierarchy shared across the package."""


class CovertraceError(Exception):
    """Base class for all library errors."""


class ValidationError(CovertraceError):
    """Malformed or inconsistent input data: bad schema, broken structural invariant."""


class PreconditionError(CovertraceError):
    """An operation was called outside its stated preconditions."""
