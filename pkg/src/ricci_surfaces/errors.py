"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point or chart lies outside the domain of an object."""


class PreconditionError(ValueError):
    """A numerical precondition failed; ``details`` carries the measured norms."""

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class NotHarmonicError(PreconditionError):
    """Input expected to be harmonic (or log-harmonic) fails the residual check."""
