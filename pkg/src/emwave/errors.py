"""Exception types shared across the package."""


class EmwaveError(Exception):
    """Base class for all package-specific errors."""


class DegenerateMetricError(EmwaveError):
    """The perturbed metric is singular or too far from Minkowski to trust."""


class ConvergenceError(EmwaveError):
    """An iterative expansion failed to converge (term growth detected)."""


class DataError(EmwaveError):
    """An initial-data set violates its invariants (positivity, lapse > 0)."""


class ConfigError(EmwaveError):
    """A run configuration is malformed or out of the supported ranges."""


class BlowupError(EmwaveError):
    """NaN/Inf appeared during evolution, or the hyperbolicity guard tripped."""

    def __init__(self, message, t=None, location=None):
        super().__init__(message)
        self.t = t
        self.location = location


class StateError(EmwaveError):
    """An operation was invoked on a state that is not ready for it."""


class SnapshotError(EmwaveError):
    """Snapshot file is corrupt, truncated, or of an unsupported version."""


class FitError(EmwaveError):
    """A decay-rate fit has too few samples or a degenerate window."""
