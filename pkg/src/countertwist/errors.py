"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: invalid input -> 2, numeric failure -> 3,
property/verification failure -> 1.
"""


class CountertwistError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(CountertwistError, ValueError):
    """A caller-supplied value is outside the accepted domain."""


class NotAvailableError(CountertwistError, LookupError):
    """A lookup (e.g. a bundled reference row) has no entry for the key."""


class InternalConsistencyError(CountertwistError):
    """An invariant that should hold by construction was violated (a bug)."""


class SpectralConsistencyError(CountertwistError):
    """Computed spectral data contradicts Hermiticity (e.g. negative mu root)."""


class IllConditionedError(CountertwistError):
    """Eigenvalue geometry too tight for the requested precision.

    Raised when distinct eigenvalues are closer than 10^(-p/2); advising a
    higher working precision is the intended remedy.
    """


class NumericFailureError(CountertwistError):
    """An iterative numeric procedure failed to reach its certified tolerance."""
