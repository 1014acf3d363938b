"""Fourier basis pattern synthesis and binarization.

Grayscale pattern (N x N logical pixels):

    P(x, y) = a + b * cos(2*pi*u*x/N + 2*pi*v*y/N + phase)

Binary patterns are made by upsampling the grayscale pattern by an integer
factor k and error-diffusing the kN x kN result to {0, 1}. Upsampled pixel x'
sits at logical coordinate (x' + 0.5)/k - 0.5, so every k x k block is centred
on the logical pixel it replaces.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from core.errors import ConfigError, DimensionError

logger = logging.getLogger(__name__)

CATMULL_ROM_A = -0.5


class UpsampleMode(str, Enum):
    BICUBIC = "bicubic"    # interpolate the N x N grid (what the hardware pipeline does)
    ANALYTIC = "analytic"  # evaluate the cosine directly on the kN x kN grid
    NEAREST = "nearest"    # replicate each logical pixel into a k x k block


@dataclass(frozen=True)
class PatternSpec:
    u: int
    v: int
    phase: float
    mean_a: float = 0.5
    contrast_b: float = 0.5
    base_size_n: int = 8
    upsample_k: int = 1

    def __post_init__(self):
        if self.base_size_n < 1:
            raise ConfigError(f"base_size_n must be positive, got {self.base_size_n}")
        if self.upsample_k < 1:
            raise ConfigError(f"upsample_k must be >= 1, got {self.upsample_k}")
        if not 0.0 < self.mean_a < 1.0:
            raise ConfigError(f"mean_a must lie in (0, 1), got {self.mean_a}")
        if self.contrast_b <= 0.0:
            raise ConfigError(f"contrast_b must be positive, got {self.contrast_b}")
        if self.mean_a - self.contrast_b < 0.0 or self.mean_a + self.contrast_b > 1.0:
            raise ConfigError(
                f"a +/- b must stay in [0, 1] (a={self.mean_a}, b={self.contrast_b})")
        half = self.base_size_n / 2
        if abs(self.u) > half or abs(self.v) > half:
            raise ConfigError(
                f"frequency ({self.u}, {self.v}) beyond Nyquist for N={self.base_size_n}")

    @property
    def size(self) -> int:
        return self.base_size_n * self.upsample_k


@dataclass
class GrayPattern:
    values: np.ndarray  # float64, shape (height, width), row-major

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise DimensionError(f"pattern must be 2-D, got shape {self.values.shape}")
        if self.values.size and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise ConfigError("grayscale pattern values must lie in [0, 1]")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass
class BinaryPattern:
    bits: np.ndarray  # uint8 in {0, 1}, shape (height, width)

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.uint8)
        if self.bits.ndim != 2:
            raise DimensionError(f"pattern must be 2-D, got shape {self.bits.shape}")
        if np.any(self.bits > 1):
            raise ConfigError("binary pattern entries must be 0 or 1")

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def __eq__(self, other):
        if not isinstance(other, BinaryPattern):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(np.array_equal(self.bits, other.bits))


# --- Grayscale synthesis ---

def _phase_grid(u: int, v: int, n: int, k: int) -> np.ndarray:
    """2*pi*(u*x + v*y)/N on the centre-aligned kN grid.

    With xs = (2x' + 1 - k) / (2k) the angle is 2*pi*num/(2kN) for an integer
    num, which is reduced modulo 2kN before scaling to keep full precision.
    """
    period = 2 * k * n
    idx = 2 * np.arange(k * n, dtype=np.int64) + 1 - k
    num = (v * idx)[:, None] + (u * idx)[None, :]
    return (2.0 * math.pi / period) * np.mod(num, period)


def fourier_pattern(spec: PatternSpec) -> GrayPattern:
    """Grayscale Fourier basis pattern evaluated analytically on the kN x kN grid."""
    theta = _phase_grid(spec.u, spec.v, spec.base_size_n, spec.upsample_k)
    values = spec.mean_a + spec.contrast_b * np.cos(theta + spec.phase)
    return GrayPattern(np.clip(values, 0.0, 1.0))


# --- Upsampling ---

def _cubic_weights(t: np.ndarray) -> np.ndarray:
    """Keys cubic-convolution weights for taps at offsets -1, 0, 1, 2."""
    a = CATMULL_ROM_A
    t2, t3 = t * t, t * t * t
    return np.stack([
        a * t3 - 2 * a * t2 + a * t,
        (a + 2) * t3 - (a + 3) * t2 + 1,
        -(a + 2) * t3 + (2 * a + 3) * t2 - a * t,
        -a * t3 + a * t2,
    ], axis=1)


def _wrap_index(idx: np.ndarray, length: int, boundary: str) -> np.ndarray:
    if boundary == "periodic":
        return np.mod(idx, length)
    if boundary == "symmetric":
        period = 2 * length
        idx = np.mod(idx, period)
        return np.where(idx < length, idx, period - 1 - idx)
    raise ConfigError(f"unknown boundary rule {boundary!r}")


def _interpolation_matrix(length: int, k: int, boundary: str) -> np.ndarray:
    out = np.arange(k * length)
    src = (out + 0.5) / k - 0.5
    base = np.floor(src).astype(np.int64)
    weights = _cubic_weights(src - base)
    matrix = np.zeros((k * length, length))
    for tap in range(4):
        cols = _wrap_index(base + tap - 1, length, boundary)
        np.add.at(matrix, (out, cols), weights[:, tap])
    return matrix


def upsample_bicubic(p: GrayPattern, k: int, boundary: str = "periodic") -> GrayPattern:
    """Upsample by k with cubic convolution (a = -0.5), clamped to [0, 1].

    Fourier basis patterns are periodic over the logical grid, so the default
    boundary extension is periodic; "symmetric" mirrors at the edges instead.
    """
    if k < 1:
        raise ConfigError(f"upsample factor must be >= 1, got {k}")
    if k == 1:
        return p
    rows = _interpolation_matrix(p.height, k, boundary)
    cols = _interpolation_matrix(p.width, k, boundary)
    return GrayPattern(np.clip(rows @ p.values @ cols.T, 0.0, 1.0))


def upsample_nearest(p: GrayPattern, k: int) -> GrayPattern:
    if k < 1:
        raise ConfigError(f"upsample factor must be >= 1, got {k}")
    if k == 1:
        return p
    return GrayPattern(np.repeat(np.repeat(p.values, k, axis=0), k, axis=1))


# --- Error diffusion ---

@njit(cache=False)
def _error_diffuse(work, bits, serpentine):
    height, width = work.shape
    for y in range(height):
        reverse = serpentine and (y % 2 == 1)
        step = -1 if reverse else 1
        for i in range(width):
            x = width - 1 - i if reverse else i
            old = work[y, x]
            new = 1.0 if old >= 0.5 else 0.0
            bits[y, x] = 1 if new > 0.0 else 0
            err = old - new
            ahead = x + step
            behind = x - step
            if 0 <= ahead < width:
                work[y, ahead] += err * (7.0 / 16.0)
            if y + 1 < height:
                if 0 <= behind < width:
                    work[y + 1, behind] += err * (3.0 / 16.0)
                work[y + 1, x] += err * (5.0 / 16.0)
                if 0 <= ahead < width:
                    work[y + 1, ahead] += err * (1.0 / 16.0)


def dither_floyd_steinberg(p: GrayPattern, serpentine: bool = False) -> BinaryPattern:
    """Floyd-Steinberg error diffusion, threshold 0.5 (ties quantize to 1).

    Raster order by default; error pushed past the grid edges is discarded.
    """
    work = np.array(p.values, dtype=np.float64, copy=True)
    bits = np.zeros(work.shape, dtype=np.uint8)
    if work.size:
        _error_diffuse(work, bits, serpentine)
    return BinaryPattern(bits)


# --- Composition ---

def grayscale_pattern(spec: PatternSpec, mode: UpsampleMode | str = UpsampleMode.BICUBIC) -> GrayPattern:
    """kN x kN grayscale pattern produced by the selected upsampling mode."""
    mode = UpsampleMode(mode)
    if mode is UpsampleMode.ANALYTIC or spec.upsample_k == 1:
        return fourier_pattern(spec)
    base = fourier_pattern(PatternSpec(
        spec.u, spec.v, spec.phase, spec.mean_a, spec.contrast_b, spec.base_size_n, 1))
    if mode is UpsampleMode.BICUBIC:
        return upsample_bicubic(base, spec.upsample_k)
    return upsample_nearest(base, spec.upsample_k)


def binary_fourier_pattern(spec: PatternSpec, mode: UpsampleMode | str = UpsampleMode.BICUBIC,
                           serpentine: bool = False) -> BinaryPattern:
    return dither_floyd_steinberg(grayscale_pattern(spec, mode), serpentine=serpentine)


def block_average(values: np.ndarray, k: int) -> np.ndarray:
    """Mean over non-overlapping k x k blocks (shape must be divisible by k)."""
    values = np.asarray(values, dtype=np.float64)
    h, w = values.shape
    if h % k or w % k:
        raise DimensionError(f"shape {values.shape} not divisible by k={k}")
    return values.reshape(h // k, k, w // k, k).mean(axis=(1, 3))


@dataclass(frozen=True)
class PatternParams:
    """Pattern parameters shared by every step of a plan."""
    mean_a: float = 0.5
    contrast_b: float = 0.5
    upsample_k: int = 1
    mode: UpsampleMode = UpsampleMode.BICUBIC

    def __post_init__(self):
        object.__setattr__(self, "mode", UpsampleMode(self.mode))
        # reuse PatternSpec validation on a DC pattern
        PatternSpec(0, 0, 0.0, self.mean_a, self.contrast_b, 2, self.upsample_k)


class PatternSource:
    """Callable producing the illumination array for a (u, v, phase) step.

    binary=False yields the grayscale kN x kN pattern (ideal grayscale
    projector); binary=True yields the dithered {0, 1} pattern.
    """

    def __init__(self, n: int, params: PatternParams, binary: bool = True,
                 serpentine: bool = False):
        self.n = n
        self.params = params
        self.binary = binary
        self.serpentine = serpentine

    def spec(self, u: int, v: int, phase: float) -> PatternSpec:
        p = self.params
        return PatternSpec(u, v, phase, p.mean_a, p.contrast_b, self.n, p.upsample_k)

    def __call__(self, u: int, v: int, phase: float) -> np.ndarray:
        spec = self.spec(u, v, phase)
        if self.binary:
            return binary_fourier_pattern(spec, self.params.mode, self.serpentine).bits
        return grayscale_pattern(spec, self.params.mode).values
