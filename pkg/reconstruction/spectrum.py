"""Spectrum assembly from phase-shifted measurements and inverse transform.

DFT convention: F(u, v) = sum_{x,y} R(x, y) * exp(-j*2*pi*(u*x + v*y)/n),
inverse with 1/n^2. Coefficient grids use numpy FFT layout, F[v mod n, u mod n].
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from core.errors import ConsistencyError, DimensionError
from illumination.sampling import FrequencySample, SamplingPlan
from reconstruction.phase_shift import recover, recovery_gain
from sim.detector import MeasurementRecord

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-9
PHASE_TOL = 1e-9


@dataclass
class Spectrum:
    size_n: int
    coefficients: np.ndarray  # complex128, shape (n, n)
    mask: np.ndarray          # bool, shape (n, n)

    @classmethod
    def empty(cls, n: int) -> 'Spectrum':
        return cls(n, np.zeros((n, n), dtype=np.complex128), np.zeros((n, n), dtype=bool))

    @classmethod
    def from_image(cls, image: np.ndarray) -> 'Spectrum':
        """Fully masked forward DFT of a real image."""
        image = np.asarray(image, dtype=np.float64)
        n = image.shape[0]
        if image.shape != (n, n):
            raise DimensionError(f"image must be square, got {image.shape}")
        return cls(n, np.fft.fft2(image), np.ones((n, n), dtype=bool))

    def index(self, f: FrequencySample) -> tuple[int, int]:
        return f.v % self.size_n, f.u % self.size_n

    def coeff(self, u: int, v: int) -> complex:
        return complex(self.coefficients[v % self.size_n, u % self.size_n])

    def place(self, f: FrequencySample, value: complex):
        """Store a half-plane coefficient and its conjugate mirror."""
        n = self.size_n
        mirror = f.conjugate(n)
        if mirror == f:
            value = complex(value.real, 0.0)
        self.coefficients[self.index(f)] = value
        self.coefficients[self.index(mirror)] = value.conjugate()
        self.mask[self.index(f)] = True
        self.mask[self.index(mirror)] = True

    def truncated(self, mask: np.ndarray) -> 'Spectrum':
        """Copy keeping only the bins where `mask` is true (others zero-filled)."""
        mask = np.asarray(mask, dtype=bool) & self.mask
        return Spectrum(self.size_n, np.where(mask, self.coefficients, 0.0), mask)

    def asymmetry(self) -> float:
        """Largest |F(-u,-v) - conj(F(u,v))| over the grid."""
        c = self.coefficients
        mirrored = np.roll(np.flip(c, axis=(0, 1)), 1, axis=(0, 1))
        return float(np.max(np.abs(mirrored - np.conj(c)))) if c.size else 0.0


@dataclass
class ReconstructedImage:
    values: np.ndarray  # float64, shape (n, n), unbounded
    provenance: str = ""

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


def normalization(plan: SamplingPlan, gain: float = 1.0) -> float:
    """Divisor turning the phase-shift combination into a scene-scaled coefficient.

    3b (or 2b) times detector gain times k^2: each logical pixel integrates k^2
    physical pixels, so the result is the DFT of the k x k block-averaged scene.
    """
    k = plan.pattern.upsample_k
    return recovery_gain(plan.schedule) * plan.pattern.contrast_b * gain * k * k


def _group_records(records: list[MeasurementRecord], plan: SamplingPlan) -> np.ndarray:
    """Measurement values arranged (phase, frequency) in plan order."""
    phases = plan.schedule.phases
    frequencies = plan.frequencies
    slot = {f: i for i, f in enumerate(frequencies)}
    values = np.full((len(phases), len(frequencies)), np.nan)
    for rec in records:
        if rec.frequency not in slot:
            raise ConsistencyError(f"measurement for unplanned frequency {rec.frequency}")
        matches = [p for p, phase in enumerate(phases) if abs(phase - rec.phase) < PHASE_TOL]
        if not matches:
            raise ConsistencyError(
                f"phase {rec.phase} at {rec.frequency} is not in the {plan.schedule.value} schedule")
        p, i = matches[0], slot[rec.frequency]
        if not np.isnan(values[p, i]):
            raise ConsistencyError(f"duplicate measurement for {rec.frequency} phase {rec.phase}")
        values[p, i] = rec.value
    missing = np.argwhere(np.isnan(values))
    if len(missing):
        p, i = missing[0]
        raise ConsistencyError(
            f"missing phase {phases[p]:.6f} for planned frequency {frequencies[i]}")
    return values


def assemble_spectrum(records: list[MeasurementRecord], plan: SamplingPlan,
                      gain: float = 1.0) -> Spectrum:
    """Recover, normalize and mirror every planned coefficient."""
    values = _group_records(records, plan)
    coefficients = np.atleast_1d(recover(plan.schedule, values)) / normalization(plan, gain)
    spectrum = Spectrum.empty(plan.image_size_n)
    for f, c in zip(plan.frequencies, coefficients):
        spectrum.place(f, complex(c))
    logger.debug("assembled %d coefficients (%d bins)", len(coefficients), int(spectrum.mask.sum()))
    return spectrum


def inverse_transform(s: Spectrum, provenance: str = "") -> ReconstructedImage:
    """Inverse DFT (1/n^2) of a conjugate-symmetric spectrum, real part kept."""
    scale = max(1.0, float(np.max(np.abs(s.coefficients)))) if s.coefficients.size else 1.0
    if s.asymmetry() > SYMMETRY_TOL * scale:
        raise ConsistencyError(
            f"spectrum violates conjugate symmetry by {s.asymmetry():.3e}")
    image = np.fft.ifft2(s.coefficients)
    residue = float(np.max(np.abs(image.imag))) if image.size else 0.0
    if residue > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(image.real)))):
        raise ConsistencyError(f"imaginary residue {residue:.3e} after inverse transform")
    return ReconstructedImage(np.ascontiguousarray(image.real), provenance)


def log_magnitude(s: Spectrum) -> np.ndarray:
    """Centred log(1 + |F|) map for display."""
    return np.fft.fftshift(np.log1p(np.abs(s.coefficients)))


def reconstruct(records: list[MeasurementRecord], plan: SamplingPlan,
                gain: float = 1.0) -> tuple[Spectrum, ReconstructedImage]:
    spectrum = assemble_spectrum(records, plan, gain)
    return spectrum, inverse_transform(spectrum, plan.describe())
