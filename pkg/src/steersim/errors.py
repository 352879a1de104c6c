"""Exception types shared across the package.

Callers can distinguish bad input (`DomainError`) from a broken internal
assumption (`InternalError`); the command-line layer maps the former to
exit code 1 and everything else to exit code 2.
"""


class DomainError(ValueError):
    """Raised when an argument is outside the documented domain."""


class InternalError(RuntimeError):
    """Raised when an internal consistency check fails."""


class EstimationError(InternalError):
    """Raised when an estimator cannot be formed from the given counts."""
