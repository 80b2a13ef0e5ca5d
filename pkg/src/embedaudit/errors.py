"""Error types shared by every embedaudit module.

The CLI maps AuditError to exit code 1 (bad input / failed validation)
and anything else to exit code 2.
"""


class AuditError(Exception):
    """Base class for all user-facing embedaudit failures."""


class FormatError(AuditError):
    """A file or stream does not follow its declared on-disk layout."""


class ValidationError(AuditError):
    """Well-formed input that violates a data invariant or precondition."""
