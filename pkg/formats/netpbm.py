"""Binary Netpbm codecs: PGM (P5) for images and scenes, PPM (P6) for colour.

Samples are 8-bit for maxval 255 and 16-bit big-endian for maxval 65535.
"""

import logging
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from core.errors import ConfigError, FormatError

logger = logging.getLogger(__name__)

SUPPORTED_MAXVAL = (255, 65535)
_WHITESPACE = b" \t\r\n"


def _dtype(maxval: int):
    if maxval not in SUPPORTED_MAXVAL:
        raise FormatError(f"unsupported maxval {maxval}")
    return np.dtype(">u2") if maxval > 255 else np.dtype("u1")


def _check_levels(image: np.ndarray, maxval: int) -> np.ndarray:
    image = np.asarray(image)
    if not np.issubdtype(image.dtype, np.integer):
        raise ConfigError("image must hold integer levels; rescale first")
    if image.size and (image.min() < 0 or image.max() > maxval):
        raise ConfigError(f"image levels outside [0, {maxval}]")
    return image.astype(_dtype(maxval))


def _write(path, magic: bytes, image: np.ndarray, width: int, height: int, maxval: int):
    header = magic + b"\n" + f"{width} {height}\n{maxval}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(image.tobytes())
    logger.info("wrote %s (%dx%d, maxval %d)", path, width, height, maxval)


def write_pgm(image: np.ndarray, path, maxval: int = 255):
    """Write a 2-D array of integer levels as binary PGM."""
    levels = _check_levels(image, maxval)
    if levels.ndim != 2:
        raise ConfigError(f"PGM image must be 2-D, got shape {levels.shape}")
    height, width = levels.shape
    _write(path, b"P5", levels, width, height, maxval)


def write_ppm(image: np.ndarray, path, maxval: int = 255):
    """Write an (height, width, 3) array of integer levels as binary PPM."""
    levels = _check_levels(image, maxval)
    if levels.ndim != 3 or levels.shape[2] != 3:
        raise ConfigError(f"PPM image must be (h, w, 3), got shape {levels.shape}")
    height, width, _ = levels.shape
    _write(path, b"P6", levels, width, height, maxval)


def _parse_header(data: bytes) -> tuple[bytes, int, int, int, int]:
    """(magic, width, height, maxval, payload offset); '#' comments allowed."""
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos] in _WHITESPACE:
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            end = data.find(b"\n", pos)
            if end < 0:
                raise FormatError("malformed header: unterminated comment")
            pos = end + 1
            continue
        start = pos
        while pos < len(data) and data[pos] not in _WHITESPACE and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise FormatError("malformed header: truncated")
        tokens.append(data[start:pos])
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise FormatError("malformed header: missing separator after maxval")
    magic = tokens[0]
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise FormatError(f"malformed header: {exc}") from exc
    if width <= 0 or height <= 0:
        raise FormatError(f"malformed header: size {width}x{height}")
    return magic, width, height, maxval, pos + 1


def _read(path, magic: bytes, channels: int) -> tuple[np.ndarray, int]:
    data = Path(path).read_bytes()
    found, width, height, maxval, offset = _parse_header(data)
    if found != magic:
        raise FormatError(f"expected {magic.decode()} file, found {found[:2]!r}")
    dtype = _dtype(maxval)
    expected = width * height * channels * dtype.itemsize
    payload = data[offset:offset + expected]
    if len(payload) != expected:
        raise FormatError(f"truncated payload: {len(payload)} of {expected} bytes")
    levels = np.frombuffer(payload, dtype=dtype).astype(np.int64)
    shape = (height, width) if channels == 1 else (height, width, channels)
    return levels.reshape(shape), maxval


def read_pgm(path) -> tuple[np.ndarray, int]:
    """(levels as int64 (height, width), maxval)."""
    return _read(path, b"P5", 1)


def read_ppm(path) -> tuple[np.ndarray, int]:
    return _read(path, b"P6", 3)


# --- Export rescaling ---

@dataclass(frozen=True)
class Rescale:
    """level = round((value - offset) * scale); value ~= level / scale + offset."""
    offset: float
    scale: float
    maxval: int

    def apply(self, values: np.ndarray) -> np.ndarray:
        levels = np.rint((np.asarray(values, dtype=np.float64) - self.offset) * self.scale)
        return np.clip(levels, 0, self.maxval).astype(np.int64)

    def invert(self, levels: np.ndarray) -> np.ndarray:
        return np.asarray(levels, dtype=np.float64) / self.scale + self.offset

    def to_dict(self) -> dict:
        return asdict(self)


def fit_rescale(values: np.ndarray, maxval: int = 255) -> Rescale:
    """Affine map of [min, max] onto [0, maxval]; raw values are never clipped."""
    _dtype(maxval)
    values = np.asarray(values, dtype=np.float64)
    lo, hi = float(values.min()), float(values.max())
    scale = maxval / (hi - lo) if hi > lo else 1.0
    return Rescale(lo, scale, maxval)


def export_pgm(values: np.ndarray, path, maxval: int = 255) -> Rescale:
    rescale = fit_rescale(values, maxval)
    write_pgm(rescale.apply(values), path, maxval)
    return rescale


def read_unit_image(path) -> np.ndarray:
    """PGM levels divided by maxval, i.e. reflectance in [0, 1]."""
    levels, maxval = read_pgm(path)
    return levels.astype(np.float64) / maxval
