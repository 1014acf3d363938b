"""Counter-based keyed random streams for reproducible simulations.

Every draw is keyed by (seed, *counters), e.g. (seed, step_index), so the
stream for one plan step never depends on how many draws happened before it.
That is what lets steps, channels and frames run in any order or in parallel
and still produce bit-identical measurements.
"""

import numpy as np


class KeyedRNG:
    """Factory for Philox generators keyed by a base seed plus counters."""

    def __init__(self, seed: int = 0):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = seed

    def generator(self, *counters: int) -> np.random.Generator:
        entropy = [self.seed, *counters]
        return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))

    def normal(self, sigma: float, size: int, *counters: int) -> np.ndarray:
        return self.generator(*counters).normal(0.0, sigma, size)


def keyed_generator(seed: int, *counters: int) -> np.random.Generator:
    """Generator for the stream identified by (seed, *counters)."""
    return KeyedRNG(seed).generator(*counters)


def gaussian_noise(seed: int, step_index: int, sigma: float, size: int) -> np.ndarray:
    """i.i.d. N(0, sigma^2) samples for one plan step. sigma == 0 gives zeros."""
    if sigma == 0.0:
        return np.zeros(size)
    return KeyedRNG(seed).normal(sigma, size, step_index)
