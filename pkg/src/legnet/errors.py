"""Exception types shared across the toolkit."""


class LegnetError(Exception):
    """Base class for toolkit errors."""


class ConfigError(LegnetError):
    """Bad or inconsistent configuration (CLI exit code 2)."""


class DataError(LegnetError):
    """Malformed or contradictory input data (CLI exit code 3)."""


class EstimationError(LegnetError):
    """Model fitting failed to converge or produced an unusable fit (CLI exit code 4)."""
