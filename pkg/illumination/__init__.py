"""Illumination: Fourier pattern synthesis and coefficient sampling plans."""

from illumination.patterns import (
    PatternSpec, GrayPattern, BinaryPattern, UpsampleMode, PatternParams, PatternSource,
    fourier_pattern, upsample_bicubic, upsample_nearest, dither_floyd_steinberg,
    grayscale_pattern, binary_fourier_pattern, block_average,
)
from illumination.sampling import (
    FrequencySample, PhaseSchedule, Strategy, PlanStep, SamplingPlan,
    half_plane_frequencies, spiral_path, compression_rate, build_plan,
    measurement_time, acquisition_time, frame_rate, signed_frequency,
)
