"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: SchemaError -> 2, LimitExceededError -> 3,
InvariantError -> 4.
"""


class OpinionDynError(Exception):
    """Base class for all package errors."""


class SchemaError(OpinionDynError):
    """Invalid input: malformed file, bad field value, or broken precondition."""


class LimitExceededError(OpinionDynError):
    """A desk-scale size limit (state space, degree, integer range) was exceeded."""


class InvariantError(OpinionDynError):
    """An internal consistency check failed; indicates a bug or a bad instance."""
