"""Core primitives: error types, counter-based RNG, experiment configuration."""

from core.errors import (
    FSIError, ConfigError, DimensionError, FormatError, ConsistencyError,
)
from core import rng
