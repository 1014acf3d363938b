"""Detector temporal response models.

A model turns "the detector was at level `start`, the optical target is now
`target`" into the levels seen by `count` consecutive DAQ samples.
"""

import math

import numpy as np

from core.errors import ConfigError

LN9 = math.log(9.0)  # 10%-90% rise of a single pole spans tau * ln(9)


class ResponseModel:
    """Base class: instantaneous response."""

    def levels(self, start: float, target: float, count: int, dt: float) -> np.ndarray:
        return np.full(count, target, dtype=np.float64)


class InstantResponse(ResponseModel):
    pass


class FirstOrderLag(ResponseModel):
    """Single-pole lag, y <- y + (1 - exp(-dt/tau)) * (target - y) per sample."""

    def __init__(self, rise_time: float):
        if rise_time <= 0:
            raise ConfigError(f"lag rise time must be positive, got {rise_time}")
        self.rise_time = rise_time
        self.tau = rise_time / LN9

    def retention(self, dt: float) -> float:
        """Fraction of the remaining gap left after one sample period."""
        return math.exp(-dt / self.tau)

    def levels(self, start: float, target: float, count: int, dt: float) -> np.ndarray:
        steps = np.arange(1, count + 1, dtype=np.float64)
        return target + (start - target) * np.power(self.retention(dt), steps)


def response_for(rise_time: float) -> ResponseModel:
    if rise_time < 0:
        raise ConfigError(f"rise time must be >= 0, got {rise_time}")
    return InstantResponse() if rise_time == 0 else FirstOrderLag(rise_time)
