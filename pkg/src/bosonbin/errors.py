"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """Raised when a computed quantity violates a guaranteed numerical bound.

    Signals an upstream inconsistency (non-unitary input, broken Gram
    matrix, rounding error far beyond the documented bound), not a
    recoverable condition of the algorithm itself.
    """


class ConfigError(ValueError):
    """Raised for malformed or inconsistent run configuration."""


class IngestionError(ValueError):
    """Raised when a data file cannot be parsed or fails its declared shape."""
