"""Error hierarchy shared by every package."""


class FSIError(Exception):
    """Base class for all simulator errors."""


class ConfigError(FSIError, ValueError):
    """Invalid pattern, plan, detector or experiment parameters."""


class DimensionError(FSIError, ValueError):
    """Pattern, scene or image sizes do not match."""


class FormatError(FSIError, ValueError):
    """Malformed or truncated file."""


class ConsistencyError(FSIError):
    """Measurements, plan and spectrum disagree with each other."""
