"""Reconstruction: phase-shift recovery, spectrum assembly, inverse DFT, quality."""

from reconstruction.phase_shift import (
    coefficient_three_step, coefficient_four_step, recover, recovery_gain,
)
from reconstruction.spectrum import (
    Spectrum, ReconstructedImage, normalization, assemble_spectrum,
    inverse_transform, log_magnitude, reconstruct,
)
from reconstruction.quality import QualityReport, quality_metrics, INFINITE
