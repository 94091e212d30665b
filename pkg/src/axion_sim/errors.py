"""Exception types shared across the package."""


class AxionSimError(Exception):
    """Base class for all package errors."""


class LayoutMismatchError(AxionSimError, ValueError):
    """Two objects living on different mode layouts were combined."""


class OccupationError(AxionSimError, ValueError):
    """An occupation number is outside the truncated range of its mode."""


class HermiticityError(AxionSimError, ValueError):
    """An operation required a Hermitian operator and got something else."""


class TruncationError(AxionSimError, RuntimeError):
    """Probability weight near the Fock cutoff exceeds the allowed budget."""


class DimensionError(AxionSimError, ValueError):
    """Requested Hilbert-space dimension exceeds the configured budget."""


class ConfigError(AxionSimError, ValueError):
    """A run configuration failed to parse or validate."""
