"""Single-pixel measurement chain.

scene reflectance -> pattern/scene inner product -> gain + dark offset ->
detector lag -> DAQ sampling with additive Gaussian noise -> sample mean.

The lag state at the end of one pattern is the starting level of the next,
which is what makes fast illumination smear neighbouring measurements.
"""

import logging
import math
from dataclasses import dataclass, asdict

import numpy as np

from core import rng
from core.errors import ConfigError, DimensionError
from illumination.sampling import FrequencySample, PlanStep, SamplingPlan
from sim.metrics import AcquisitionMetrics
from sim.response import response_for

logger = logging.getLogger(__name__)

DAQ_MAX_RATE = 500_000.0      # samples/s of the reference acquisition board


@dataclass
class Scene:
    reflectance: np.ndarray  # float64 in [0, 1], shape (height, width)
    channel: str = "mono"

    def __post_init__(self):
        self.reflectance = np.asarray(self.reflectance, dtype=np.float64)
        if self.reflectance.ndim != 2:
            raise DimensionError(f"scene must be 2-D, got shape {self.reflectance.shape}")
        if self.reflectance.size and (self.reflectance.min() < 0.0 or self.reflectance.max() > 1.0):
            raise ConfigError("scene reflectance must lie in [0, 1]")
        if self.channel not in ("mono", "R", "G", "B"):
            raise ConfigError(f"unknown channel tag {self.channel!r}")

    @property
    def height(self) -> int:
        return self.reflectance.shape[0]

    @property
    def width(self) -> int:
        return self.reflectance.shape[1]

    def scaled(self, alpha: float) -> 'Scene':
        return Scene(self.reflectance * alpha, self.channel)


@dataclass(frozen=True)
class DetectorConfig:
    gain: float = 1.0
    dark_offset: float = 0.0
    noise_sigma: float = 0.0
    rise_time: float = 0.0
    daq_rate: float = DAQ_MAX_RATE
    illumination_rate: float = 20_000.0
    settle_discard: float = 0.0

    def __post_init__(self):
        if self.illumination_rate <= 0 or self.daq_rate <= 0:
            raise ConfigError("DAQ and illumination rates must be positive")
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.rise_time < 0:
            raise ConfigError(f"rise_time must be >= 0, got {self.rise_time}")
        if not 0.0 <= self.settle_discard < 1.0:
            raise ConfigError(f"settle_discard must lie in [0, 1), got {self.settle_discard}")

    @classmethod
    def ideal(cls, illumination_rate: float = 20_000.0, daq_rate: float = DAQ_MAX_RATE) -> 'DetectorConfig':
        """Unit gain, no offset, no noise, no lag."""
        return cls(illumination_rate=illumination_rate, daq_rate=daq_rate)

    @property
    def samples_per_pattern(self) -> int:
        """n_s = floor(daq_rate / illumination_rate)."""
        return math.floor(self.daq_rate / self.illumination_rate)

    @property
    def sample_period(self) -> float:
        return 1.0 / self.daq_rate

    @property
    def discarded_samples(self) -> int:
        n_s = self.samples_per_pattern
        return min(math.ceil(self.settle_discard * n_s), max(n_s - 1, 0))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MeasurementRecord:
    step_index: int
    frequency: FrequencySample
    phase: float
    value: float


@dataclass(frozen=True)
class DetectorState:
    """Lag level carried from one pattern to the next."""
    level: float = 0.0

    @classmethod
    def dark(cls, cfg: DetectorConfig) -> 'DetectorState':
        return cls(cfg.dark_offset)


def _as_array(obj) -> np.ndarray:
    for attr in ("reflectance", "values", "bits"):
        if hasattr(obj, attr):
            return np.asarray(getattr(obj, attr), dtype=np.float64)
    return np.asarray(obj, dtype=np.float64)


def ideal_response(pattern, scene) -> float:
    """Sum over pixels of pattern(x, y) * reflectance(x, y)."""
    p, r = _as_array(pattern), _as_array(scene)
    if p.shape != r.shape:
        raise DimensionError(f"pattern {p.shape} and scene {r.shape} differ in size")
    return float(np.einsum("ij,ij->", p, r))


def _check_rates(cfg: DetectorConfig) -> int:
    n_s = cfg.samples_per_pattern
    if n_s < 1:
        raise ConfigError(
            f"illumination rate {cfg.illumination_rate} Hz exceeds DAQ rate {cfg.daq_rate} S/s")
    return n_s


def _sample_stream(target: float, cfg: DetectorConfig, carry: DetectorState,
                   seed: int, step_index: int) -> tuple[np.ndarray, np.ndarray]:
    """(noise-free lag levels, noisy-sample deviations from target) for one pattern."""
    n_s = _check_rates(cfg)
    levels = response_for(cfg.rise_time).levels(carry.level, target, n_s, cfg.sample_period)
    deviations = (levels - target) + rng.gaussian_noise(seed, step_index, cfg.noise_sigma, n_s)
    return levels, deviations


def simulate_measurement(pattern, scene, cfg: DetectorConfig, carry_in: DetectorState,
                         seed: int, step_index: int,
                         frequency: FrequencySample = FrequencySample(0, 0),
                         phase: float = 0.0,
                         metrics: AcquisitionMetrics | None = None,
                         ) -> tuple[MeasurementRecord, DetectorState]:
    """One detector reading: mean of the retained DAQ samples for this pattern."""
    target = cfg.gain * ideal_response(pattern, scene) + cfg.dark_offset
    levels, deviations = _sample_stream(target, cfg, carry_in, seed, step_index)
    discard = cfg.discarded_samples
    retained = deviations[discard:]
    # mean taken on deviations so an ideal chain returns the target exactly
    value = target + float(retained.mean())
    if metrics is not None:
        metrics.record(phase, len(deviations), len(retained))
    record = MeasurementRecord(step_index, frequency, phase, value)
    return record, DetectorState(float(levels[-1]))


def _check_scene(plan: SamplingPlan, scene: Scene):
    size = plan.pattern_size
    if scene.reflectance.shape != (size, size):
        raise DimensionError(
            f"scene is {scene.width}x{scene.height}, plan needs {size}x{size} (k*N)")


def run_steps(steps, scene: Scene, cfg: DetectorConfig, seed: int, source,
              carry_in: DetectorState | None = None,
              metrics: AcquisitionMetrics | None = None,
              ) -> tuple[list[MeasurementRecord], DetectorState]:
    """Measure a run of plan steps in order, threading the detector state."""
    carry = carry_in if carry_in is not None else DetectorState.dark(cfg)
    records = []
    for step in steps:
        pattern = source(step.frequency.u, step.frequency.v, step.phase)
        record, carry = simulate_measurement(
            pattern, scene, cfg, carry, seed, step.index,
            frequency=step.frequency, phase=step.phase, metrics=metrics)
        records.append(record)
    return records, carry


def run_plan(plan: SamplingPlan, scene: Scene, cfg: DetectorConfig, seed: int, source,
             carry_in: DetectorState | None = None,
             metrics: AcquisitionMetrics | None = None) -> list[MeasurementRecord]:
    """Measure every plan step, low to high frequency."""
    _check_scene(plan, scene)
    if metrics is not None:
        metrics.timing.begin("simulate")
    records, _ = run_steps(plan.steps, scene, cfg, seed, source, carry_in, metrics)
    if metrics is not None:
        metrics.timing.end("simulate")
    logger.debug("measured %d steps (n_s=%d)", len(records), cfg.samples_per_pattern)
    return records


@dataclass(frozen=True)
class TraceSegment:
    step_index: int
    times: np.ndarray    # seconds from the first sample of the plan
    samples: np.ndarray  # noisy DAQ samples


def simulate_trace(plan: SamplingPlan, scene: Scene, cfg: DetectorConfig, seed: int,
                   source, pattern_count: int = 20) -> list[TraceSegment]:
    """Raw DAQ sample stream for the first `pattern_count` plan steps.

    Uses the same noise keys and carry thread as run_plan, so the mean of each
    segment's retained samples is the recorded measurement value.
    """
    _check_scene(plan, scene)
    n_s = _check_rates(cfg)
    carry = DetectorState.dark(cfg)
    segments = []
    for step in plan.steps[:pattern_count]:
        pattern = source(step.frequency.u, step.frequency.v, step.phase)
        target = cfg.gain * ideal_response(pattern, scene) + cfg.dark_offset
        levels, deviations = _sample_stream(target, cfg, carry, seed, step.index)
        t0 = step.index / cfg.illumination_rate
        times = t0 + np.arange(n_s) * cfg.sample_period
        segments.append(TraceSegment(step.index, times, target + deviations))
        carry = DetectorState(float(levels[-1]))
    return segments
