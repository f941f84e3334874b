"""Exception types shared across the package."""


class RingbenchError(Exception):
    """Base class for all package errors."""


class ConfigError(RingbenchError):
    """Invalid configuration, flags, or parameters."""


class ValidationError(RingbenchError):
    """A graph or bundle failed an integrity check."""


class GenerationError(RingbenchError):
    """Generation could not satisfy a hard constraint (e.g. calibration)."""
