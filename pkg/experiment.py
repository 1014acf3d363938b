"""Experiment orchestration: wires patterns, detector, reconstruction and files.

Each cmd_* function is one CLI subcommand. They are pure functions of
(config, input files, seed): reruns write bit-identical artifacts.
"""

import asyncio
import logging
from fractions import Fraction
from dataclasses import dataclass, replace
from decimal import ROUND_DOWN, Decimal
from pathlib import Path

import numpy as np

from core.config import ExperimentConfig
from core.errors import ConfigError, ConsistencyError, DimensionError
from formats import netpbm
from formats.manifest import RunManifest
from formats.pattern_pack import (
    PatternPackWriter, pack_size, payload_bytes, patterns_per_memory, storage_ratio,
)
from formats.records import (
    read_measurements, read_plan, write_measurements, write_plan, write_trace,
)
from illumination.patterns import PatternSource, binary_fourier_pattern, block_average
from illumination.sampling import (
    PhaseSchedule, SamplingPlan, Strategy, acquisition_time, build_plan,
    compression_rate, frame_rate, measurement_time,
)
from reconstruction.quality import QualityReport, quality_metrics
from reconstruction.spectrum import (
    ReconstructedImage, Spectrum, log_magnitude, normalization, reconstruct,
)
from sim.detector import DetectorConfig, MeasurementRecord, Scene, run_plan, simulate_trace
from sim.metrics import AcquisitionMetrics

logger = logging.getLogger(__name__)

PLAN_FILE = "plan.txt"
PACK_FILE = "patterns.fspk"
MEASUREMENT_FILE = "measurements.txt"
RECONSTRUCTION_FILE = "reconstruction.pgm"
RAW_FILE = "reconstruction.npy"
SPECTRUM_FILE = "spectrum.pgm"
TRACE_FILE = "trace.csv"
COLOR_FILE = "color.ppm"
CHANNELS = ("R", "G", "B")


def _decimal(seconds) -> Decimal:
    if isinstance(seconds, Fraction):
        return Decimal(seconds.numerator) / Decimal(seconds.denominator)
    return Decimal(repr(float(seconds)))


def format_duration(seconds) -> str:
    """Minutes to one decimal from 60 s up; below that three significant figures, truncated."""
    if seconds >= 60:
        return f"{float(seconds) / 60.0:.1f} min ({float(seconds):.2f} s)"
    value = _decimal(seconds)
    if value == 0:
        return "0 s"
    digits = value.quantize(Decimal(1).scaleb(value.adjusted() - 2), rounding=ROUND_DOWN)
    return f"{digits.normalize():f} s"


def plan_summary(plan: SamplingPlan) -> dict:
    return {
        "description": plan.describe(),
        "measurements": plan.measurement_count,
        "idealized_measurements": plan.idealized_count,
        "coefficients": plan.coefficient_count,
        "rate_hz": plan.illumination_rate_r,
        "acquisition_time_s": acquisition_time(plan),
    }


def detector_summary(cfg: DetectorConfig) -> dict:
    summary = cfg.to_dict()
    summary["samples_per_pattern"] = cfg.samples_per_pattern
    summary["discarded_samples"] = cfg.discarded_samples
    return summary


@dataclass
class RunResult:
    """What a mono acquisition + reconstruction produced."""
    records: list[MeasurementRecord]
    spectrum: Spectrum
    image: ReconstructedImage
    quality: QualityReport | None
    output_dir: Path


class Experiment:
    """One configured experiment: plan, detector, pattern source, output directory."""

    def __init__(self, config: ExperimentConfig, plan: SamplingPlan | None = None):
        self.config = config.validate()
        self.plan = plan if plan is not None else config.plan()
        self.detector = replace(config.detector_config(),
                                illumination_rate=self.plan.illumination_rate_r)
        self.source = PatternSource(self.plan.image_size_n, self.plan.pattern,
                                    binary=config.binary, serpentine=config.serpentine)
        self.output_dir = Path(config.output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    @property
    def k(self) -> int:
        return self.plan.pattern.upsample_k

    def path(self, name: str) -> Path:
        return self.output_dir / name

    def manifest(self, command: str, **sections) -> RunManifest:
        return RunManifest(
            command=command,
            config=self.config.to_dict(),
            seed=self.config.seed,
            plan=plan_summary(self.plan),
            detector=detector_summary(self.detector),
            **sections,
        )

    def normalization_info(self) -> dict:
        p = self.plan.pattern
        return {
            "schedule": self.plan.schedule.value,
            "contrast_b": p.contrast_b,
            "gain": self.detector.gain,
            "upsample_k": p.upsample_k,
            "divisor": normalization(self.plan, self.detector.gain),
        }

    # --- inputs ---

    def load_scene(self, path, channel: str = "mono") -> Scene:
        if path is None:
            raise ConfigError("no scene given")
        scene = Scene(netpbm.read_unit_image(path), channel)
        size = self.plan.pattern_size
        if scene.reflectance.shape != (size, size):
            raise DimensionError(
                f"scene {path} is {scene.width}x{scene.height}, expected {size}x{size} (k*N)")
        return scene

    def reference_image(self, values: np.ndarray) -> np.ndarray:
        """Ground truth at N x N: k x k block average of a kN x kN image."""
        n = self.plan.image_size_n
        if values.shape == (n, n):
            return values
        if values.shape == (n * self.k, n * self.k):
            return block_average(values, self.k)
        raise DimensionError(f"reference is {values.shape}, expected {n}x{n} or {n * self.k}^2")

    # --- stages ---

    def acquire(self, scene: Scene, seed: int,
                metrics: AcquisitionMetrics | None = None) -> list[MeasurementRecord]:
        return run_plan(self.plan, scene, self.detector, seed, self.source, metrics=metrics)

    def reconstruct(self, records: list[MeasurementRecord]) -> tuple[Spectrum, ReconstructedImage]:
        return reconstruct(records, self.plan, self.detector.gain)

    def write_image(self, image: ReconstructedImage, directory: Path) -> dict:
        directory.mkdir(parents=True, exist_ok=True)
        np.save(directory / RAW_FILE, image.values)
        rescale = netpbm.export_pgm(image.values, directory / RECONSTRUCTION_FILE, self.config.maxval)
        return rescale.to_dict()

    def run_mono(self, scene: Scene, seed: int, directory: Path,
                 reference: np.ndarray | None = None,
                 metrics: AcquisitionMetrics | None = None) -> RunResult:
        """Acquire, reconstruct and export one scene into `directory`."""
        records = self.acquire(scene, seed, metrics)
        directory.mkdir(parents=True, exist_ok=True)
        write_measurements(records, directory / MEASUREMENT_FILE)
        spectrum, image = self.reconstruct(records)
        rescale = self.write_image(image, directory)
        quality = None
        if reference is not None:
            quality = quality_metrics(image, self.reference_image(reference), peak=1.0)
        RunManifest(
            command="run",
            config=self.config.to_dict(),
            seed=seed,
            plan=plan_summary(self.plan),
            detector=detector_summary(self.detector),
            normalization=self.normalization_info(),
            rescale=rescale,
            outputs={"measurements": MEASUREMENT_FILE, "image": RECONSTRUCTION_FILE,
                     "raw": RAW_FILE,
                     "quality": quality.to_dict() if quality else None},
        ).write(directory)
        logger.info("run in %s finished (seed %d)", directory, seed)
        return RunResult(records, spectrum, image, quality, directory)


# --- concurrency ---

async def run_concurrently(jobs):
    """Run independent (callable, *args) jobs in worker threads; results in order."""
    return await asyncio.gather(*(asyncio.to_thread(fn, *args) for fn, *args in jobs))


# --- commands ---

def cmd_gen_patterns(config: ExperimentConfig) -> dict:
    """Write the plan file and the binary pattern pack for every plan step."""
    exp = Experiment(config)
    plan = exp.plan
    write_plan(plan, exp.path(PLAN_FILE))
    size = plan.pattern_size
    with PatternPackWriter(exp.path(PACK_FILE), size, size, plan.measurement_count) as writer:
        for step in plan.steps:
            spec = exp.source.spec(step.frequency.u, step.frequency.v, step.phase)
            writer.write(binary_fourier_pattern(spec, plan.pattern.mode, config.serpentine))
    total = pack_size(size, size, plan.measurement_count)
    logger.info("wrote %d patterns (%d bytes) to %s", plan.measurement_count, total, exp.path(PACK_FILE))
    exp.manifest("gen-patterns", outputs={"plan": PLAN_FILE, "pack": PACK_FILE}).write(exp.output_dir)

    print(f"=== Pattern generation: {plan.describe()} ===")
    print(f"  Measurements M: {plan.measurement_count}")
    print(f"  Idealized count ({len(plan.schedule.phases)} * N^2 / 2): {plan.idealized_count}")
    print(f"  Pattern size: {size}x{size}")
    print(f"  Pack size: {total} bytes")
    return {"measurements": plan.measurement_count, "idealized": plan.idealized_count,
            "pattern_size": size, "pack_bytes": total}


def cmd_simulate(config: ExperimentConfig) -> list[MeasurementRecord]:
    """Acquire the configured scene and write measurements, plan and manifest."""
    exp = Experiment(config)
    scene = exp.load_scene(config.scene)
    metrics = AcquisitionMetrics()
    records = exp.acquire(scene, config.seed, metrics)
    write_plan(exp.plan, exp.path(PLAN_FILE))
    write_measurements(records, exp.path(MEASUREMENT_FILE))
    outputs = {"plan": PLAN_FILE, "measurements": MEASUREMENT_FILE}
    if config.trace_patterns:
        segments = simulate_trace(exp.plan, scene, exp.detector, config.seed, exp.source,
                                  config.trace_patterns)
        write_trace(segments, exp.path(TRACE_FILE))
        outputs["trace"] = TRACE_FILE
    exp.manifest("simulate", outputs=outputs).write(exp.output_dir)

    print(f"=== Simulation: {exp.plan.describe()} ===")
    print(f"  Samples per pattern n_s: {exp.detector.samples_per_pattern}")
    print(f"  Acquisition time: {format_duration(acquisition_time(exp.plan))}")
    for line in metrics.summary_lines():
        print(line)
    return records


def cmd_reconstruct(config: ExperimentConfig) -> RunResult:
    """Reconstruct from a plan file and a measurement file."""
    out = Path(config.output_dir)
    plan = read_plan(config.plan_path or out / PLAN_FILE)
    records = read_measurements(config.measurements_path or out / MEASUREMENT_FILE)
    if len(records) != plan.measurement_count:
        raise ConsistencyError(
            f"plan has {plan.measurement_count} steps, measurement file has {len(records)}")
    for step, rec in zip(plan.steps, records):
        if rec.step_index != step.index or rec.frequency != step.frequency:
            raise ConsistencyError(
                f"measurement {rec.step_index} at {rec.frequency} does not match plan step "
                f"{step.index} at {step.frequency}")
    exp = Experiment(config, plan)
    spectrum, image = exp.reconstruct(records)
    rescale = exp.write_image(image, exp.output_dir)
    netpbm.export_pgm(log_magnitude(spectrum), exp.path(SPECTRUM_FILE), config.maxval)
    quality = None
    if config.reference:
        reference = exp.reference_image(netpbm.read_unit_image(config.reference))
        quality = quality_metrics(image, reference, peak=1.0)
    exp.manifest(
        "reconstruct",
        normalization=exp.normalization_info(),
        rescale=rescale,
        outputs={"image": RECONSTRUCTION_FILE, "raw": RAW_FILE, "spectrum": SPECTRUM_FILE,
                 "quality": quality.to_dict() if quality else None},
        notes=["negative reconstructed values are kept in the raw file; "
               "the PGM maps [min, max] affinely onto [0, maxval]"],
    ).write(exp.output_dir)

    print(f"=== Reconstruction: {plan.describe()} ===")
    print(f"  Coefficients: {plan.coefficient_count} ({int(spectrum.mask.sum())} bins)")
    if quality is not None:
        print(f"  RMSE: {quality.rmse:.6g}")
        print(f"  PSNR: {quality.psnr_label}")
    return RunResult(records, spectrum, image, quality, exp.output_dir)


def cmd_metrics(config: ExperimentConfig) -> QualityReport:
    """Compare a raw reconstruction (.npy) or PGM against a reference PGM."""
    if not config.reference:
        raise ConfigError("metrics needs a reference image")
    image_path = Path(config.image or Path(config.output_dir) / RAW_FILE)
    if image_path.suffix == ".npy":
        image = np.load(image_path)
    else:
        image = netpbm.read_unit_image(image_path)
    reference = netpbm.read_unit_image(config.reference)
    if reference.shape != image.shape:
        k = reference.shape[0] // image.shape[0] if image.shape[0] else 0
        if k < 1 or reference.shape != (image.shape[0] * k, image.shape[1] * k):
            raise DimensionError(f"image {image.shape} and reference {reference.shape} differ")
        reference = block_average(reference, k)
    quality = quality_metrics(image, reference, peak=1.0)
    print("=== Metrics ===")
    print(f"  RMSE: {quality.rmse:.6g}")
    print(f"  PSNR: {quality.psnr_label}")
    return quality


def cmd_pipeline(config: ExperimentConfig) -> RunResult:
    """simulate followed by reconstruct, with the scene as reference when none is given."""
    cmd_simulate(config)
    if config.reference is None:
        config = replace(config, reference=config.scene)
    return cmd_reconstruct(config)


def cmd_color(config: ExperimentConfig) -> list[RunResult]:
    """Three independent channel acquisitions and a combined colour image."""
    if len(config.scenes) != 3:
        raise ConfigError(f"color needs three channel scenes (R, G, B), got {len(config.scenes)}")
    exp = Experiment(config)
    scenes = [exp.load_scene(path, channel) for path, channel in zip(config.scenes, CHANNELS)]
    shapes = {s.reflectance.shape for s in scenes}
    if len(shapes) != 1:
        raise DimensionError(f"channel scenes differ in size: {sorted(shapes)}")
    jobs = [
        (exp.run_mono, scene, config.seed + i, exp.output_dir / channel, scene.reflectance)
        for i, (scene, channel) in enumerate(zip(scenes, CHANNELS))
    ]
    logger.info("running %d acquisitions concurrently", len(jobs))
    results = asyncio.run(run_concurrently(jobs))

    stack = np.stack([r.image.values for r in results], axis=-1)
    rescale = netpbm.fit_rescale(stack, config.maxval)
    netpbm.write_ppm(rescale.apply(stack), exp.path(COLOR_FILE), config.maxval)
    per_channel = measurement_time(exp.plan.measurement_count, exp.plan.illumination_rate_r)
    total = float(3 * per_channel)
    exp.manifest(
        "color",
        normalization=exp.normalization_info(),
        rescale=rescale.to_dict(),
        outputs={"color": COLOR_FILE, "channels": list(CHANNELS),
                 "channel_seeds": [config.seed + i for i in range(3)],
                 "total_acquisition_time_s": total,
                 "quality": {c: r.quality.to_dict() for c, r in zip(CHANNELS, results)}},
    ).write(exp.output_dir)

    print(f"=== True-color: {exp.plan.describe()} ===")
    for channel, r in zip(CHANNELS, results):
        print(f"  {channel}: RMSE {r.quality.rmse:.6g}, PSNR {r.quality.psnr_label}")
    print(f"  Per-channel acquisition: {format_duration(per_channel)}")
    print(f"  Total acquisition: {format_duration(total)}")
    return results


def frame_paths(frames_dir) -> list[Path]:
    if frames_dir is None:
        raise ConfigError("dynamic needs a frame directory")
    paths = sorted(Path(frames_dir).glob("*.pgm"))
    if not paths:
        raise ConfigError(f"no .pgm frames in {frames_dir}")
    return paths


def cmd_dynamic(config: ExperimentConfig) -> list[RunResult]:
    """One spiral acquisition per frame, detector state reset between frames."""
    if config.strategy != Strategy.SPIRAL.value:
        raise ConfigError("dynamic imaging uses the spiral strategy")
    exp = Experiment(config)
    paths = frame_paths(config.frames_dir)
    jobs = []
    for i, path in enumerate(paths):
        scene = exp.load_scene(path)
        seed = config.seed + i if config.vary_frame_seed else config.seed
        jobs.append((exp.run_mono, scene, seed, exp.output_dir / f"frame_{i:04d}",
                     scene.reflectance))
    logger.info("running %d acquisitions concurrently", len(jobs))
    results = asyncio.run(run_concurrently(jobs))

    per_frame = measurement_time(exp.plan.measurement_count, exp.plan.illumination_rate_r)
    total = float(len(paths) * per_frame)
    fps = frame_rate(exp.plan)
    exp.manifest(
        "dynamic",
        normalization=exp.normalization_info(),
        outputs={"frames": [r.output_dir.name for r in results],
                 "frames_per_second": fps, "total_acquisition_time_s": total},
        notes=["detector state is reset to the dark level at the start of every frame"],
    ).write(exp.output_dir)

    print(f"=== Dynamic: {exp.plan.describe()} ===")
    print(f"  Frames: {len(paths)}")
    print(f"  Frame rate: {fps:.2f} fps")
    print(f"  Total acquisition: {format_duration(total)}")
    rmse = [r.quality.rmse for r in results]
    print(f"  Mean RMSE vs block-averaged frames: {float(np.mean(rmse)):.6g}")
    return results


def plan_report(config: ExperimentConfig) -> dict:
    """Planning arithmetic for the configured experiment (no simulation)."""
    config.validate()
    plan = config.plan()
    cfg = config.detector_config()
    n, size = plan.image_size_n, plan.pattern_size
    other = (PhaseSchedule.FOUR_STEP if plan.schedule is PhaseSchedule.THREE_STEP
             else PhaseSchedule.THREE_STEP)
    other_plan = build_plan(n, plan.strategy, config.coefficients, other,
                            plan.illumination_rate_r, plan.pattern)
    t_a = measurement_time(plan.measurement_count, plan.illumination_rate_r)
    three, four = sorted((plan.measurement_count, other_plan.measurement_count))
    saving = 1 - Fraction(three, four)
    return {
        "plan": plan.describe(),
        "measurements": plan.measurement_count,
        "idealized_measurements": plan.idealized_count,
        "acquisition_time": t_a,
        "idealized_acquisition_time": measurement_time(plan.idealized_count, plan.illumination_rate_r),
        "color_acquisition_time": 3 * t_a,
        "frame_rate": 1 / t_a,
        "compression_rate": compression_rate(n, plan.coefficient_count),
        "samples_per_pattern": cfg.samples_per_pattern,
        "other_schedule": other.value,
        "other_measurements": other_plan.measurement_count,
        "three_step_saving": saving,
        "pattern_size": size,
        "payload_bytes": payload_bytes(size, size),
        "pack_bytes": pack_size(size, size, plan.measurement_count),
        "storage_reduction": 1 - storage_ratio(size, size),
        "patterns_in_ram": patterns_per_memory(size, size, config.ram_bytes),
    }


def cmd_plan_report(config: ExperimentConfig) -> dict:
    r = plan_report(config)
    print(f"=== Plan report: {r['plan']} ===")
    print(f"  Measurements M: {r['measurements']} (idealized {r['idealized_measurements']})")
    print(f"  Acquisition time t_A = M/R: {format_duration(r['acquisition_time'])}")
    print(f"  Idealized t_A: {format_duration(r['idealized_acquisition_time'])}")
    print(f"  Frame rate: {float(r['frame_rate']):.3g} fps")
    print(f"  Three-channel colour: {format_duration(r['color_acquisition_time'])}")
    print(f"  Compression rate: {float(r['compression_rate']) * 100:.2f}%")
    print(f"  DAQ samples per pattern: {r['samples_per_pattern']}")
    print(f"  {r['other_schedule']}: M = {r['other_measurements']} "
          f"(three-step saves {float(r['three_step_saving']) * 100:.0f}%)")
    print(f"  Pattern payload: {r['payload_bytes']} bytes at {r['pattern_size']}x{r['pattern_size']} "
          f"({float(r['storage_reduction']) * 100:.1f}% below 8-bit storage)")
    print(f"  Pack size: {r['pack_bytes']} bytes")
    print(f"  Patterns per {config.ram_bytes} bytes of RAM: {r['patterns_in_ram']}")
    return r
