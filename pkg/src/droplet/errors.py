"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedConfiguration(ValueError):
    """The requested kernel/geometry combination has no implemented formula."""


class ConvergenceError(RuntimeError):
    """An iterative method stopped without meeting its tolerance."""


class CertificationError(RuntimeError):
    """A certification step could not be proven (e.g. an undecidable sign)."""
