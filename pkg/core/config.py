"""Experiment configuration: JSON file, command-line overrides, validation.

Keys in the file mirror the dataclass fields; detector settings live in a
nested "detector" object. Command-line flags use the same names with dashes
(image_size <-> --image-size) and override file values.
"""

import json
import logging
import types
import typing
from dataclasses import dataclass, field, fields, asdict, replace
from pathlib import Path

from core.errors import ConfigError
from illumination.patterns import PatternParams
from illumination.sampling import SamplingPlan, build_plan
from sim.detector import DetectorConfig

logger = logging.getLogger(__name__)

DETECTOR_KEYS = ("gain", "dark_offset", "noise_sigma", "rise_time", "daq_rate", "settle_discard")
DEFAULT_RAM_BYTES = 8 * 1024 ** 3


def _accepts(annotation, value) -> bool:
    """isinstance against a field annotation; ints pass as floats, bools never pass as numbers."""
    options = typing.get_args(annotation) if isinstance(annotation, types.UnionType) else (annotation,)
    for option in options:
        if option is type(None):
            if value is None:
                return True
            continue
        origin = typing.get_origin(option) or option
        if origin in (int, float) and isinstance(value, bool):
            continue
        if origin is float and isinstance(value, int):
            return True
        if isinstance(value, origin):
            return True
    return False


def _check_types(data: dict):
    for f in fields(ExperimentConfig):
        if f.name in data and not _accepts(f.type, data[f.name]):
            raise ConfigError(f"config key {f.name!r} has the wrong type: {data[f.name]!r}")
    for key, value in data.get("detector", {}).items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"detector key {key!r} must be a number, got {value!r}")
    if not all(isinstance(path, str) for path in data.get("scenes", [])):
        raise ConfigError("scenes must be a list of file paths")


@dataclass
class ExperimentConfig:
    image_size: int = 32
    strategy: str = "full"
    coefficients: int | None = None
    schedule: str = "three-step"
    illumination_rate: float = 20_000.0
    mean_a: float = 0.5
    contrast_b: float = 0.5
    upsample_k: int = 1
    upsample_mode: str = "bicubic"
    binary: bool = True
    serpentine: bool = False
    detector: dict = field(default_factory=dict)
    ideal_detector: bool = False
    scene: str | None = None
    scenes: list[str] = field(default_factory=list)
    frames_dir: str | None = None
    reference: str | None = None
    image: str | None = None
    plan_path: str | None = None
    measurements_path: str | None = None
    output_dir: str = "out"
    seed: int = 0
    maxval: int = 255
    trace_patterns: int = 0
    vary_frame_seed: bool = False
    ram_bytes: int = DEFAULT_RAM_BYTES

    @classmethod
    def from_dict(cls, data: dict) -> 'ExperimentConfig':
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        _check_types(data)
        bad = sorted(set(data.get("detector", {})) - set(DETECTOR_KEYS))
        if bad:
            raise ConfigError(f"unknown detector keys: {', '.join(bad)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> 'ExperimentConfig':
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        logger.info("loaded config from %s", path)
        return cls.from_dict(data)

    def with_overrides(self, overrides: dict) -> 'ExperimentConfig':
        """Copy with every non-None override applied; detector keys merge."""
        top, det = {}, dict(self.detector)
        for key, value in overrides.items():
            if value is None:
                continue
            if key in DETECTOR_KEYS:
                det[key] = value
            else:
                top[key] = value
        return replace(self, detector=det, **top)

    def to_dict(self) -> dict:
        return asdict(self)

    # --- domain objects ---

    def pattern_params(self) -> PatternParams:
        return PatternParams(self.mean_a, self.contrast_b, self.upsample_k, self.upsample_mode)

    def plan(self) -> SamplingPlan:
        return build_plan(self.image_size, self.strategy, self.coefficients, self.schedule,
                          self.illumination_rate, self.pattern_params())

    def detector_config(self) -> DetectorConfig:
        values = {key: self.detector[key] for key in DETECTOR_KEYS if key in self.detector}
        if self.ideal_detector:
            values.update(noise_sigma=0.0, rise_time=0.0)
        return DetectorConfig(illumination_rate=self.illumination_rate, **values)

    def validate(self) -> 'ExperimentConfig':
        """Raise ConfigError unless every derived object can be built."""
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.maxval not in (255, 65535):
            raise ConfigError(f"maxval must be 255 or 65535, got {self.maxval}")
        if self.trace_patterns < 0:
            raise ConfigError("trace_patterns must be >= 0")
        if self.strategy == "full" and self.coefficients is not None:
            raise ConfigError("coefficients only applies to the spiral strategy")
        try:
            self.plan()
            cfg = self.detector_config()
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc
        if cfg.samples_per_pattern < 1:
            raise ConfigError(
                f"illumination rate {cfg.illumination_rate} Hz exceeds DAQ rate {cfg.daq_rate} S/s")
        return self
