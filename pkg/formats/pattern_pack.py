"""FSPK pattern pack: 1-bit binary patterns as stored in modulator RAM.

Layout, little-endian:

    magic         4 bytes  b"FSPK"
    version       uint16   1
    width         uint32
    height        uint32
    pattern_count uint32
    payload       pattern_count * ceil(width/8) * height bytes

Each row is packed MSB-first and zero-padded to a whole byte.
"""

import logging
import os
import struct
from typing import Iterator

import numpy as np

from core.errors import DimensionError, FormatError
from illumination.patterns import BinaryPattern

logger = logging.getLogger(__name__)

MAGIC = b"FSPK"
VERSION = 1
HEADER = struct.Struct("<4sHIII")
HEADER_SIZE = HEADER.size  # 18


def row_bytes(width: int) -> int:
    return (width + 7) // 8


def payload_bytes(width: int, height: int) -> int:
    """Bytes one packed pattern occupies."""
    return row_bytes(width) * height


def pack_size(width: int, height: int, count: int) -> int:
    return HEADER_SIZE + count * payload_bytes(width, height)


def storage_ratio(width: int, height: int) -> float:
    """Packed size relative to one byte per pixel (1/8 when width % 8 == 0)."""
    return payload_bytes(width, height) / (width * height)


def patterns_per_memory(width: int, height: int, memory_bytes: int) -> int:
    return (memory_bytes - HEADER_SIZE) // payload_bytes(width, height)


def pack_bits(pattern: BinaryPattern) -> bytes:
    return np.packbits(pattern.bits, axis=1, bitorder="big").tobytes()


def unpack_bits(data: bytes, width: int, height: int) -> BinaryPattern:
    packed = np.frombuffer(data, dtype=np.uint8).reshape(height, row_bytes(width))
    return BinaryPattern(np.unpackbits(packed, axis=1, count=width, bitorder="big"))


class PatternPackWriter:
    """Streams patterns into a pack whose count is declared up front."""

    def __init__(self, path, width: int, height: int, count: int):
        if width <= 0 or height <= 0:
            raise DimensionError(f"pattern size must be positive, got {width}x{height}")
        self.path = path
        self.width = width
        self.height = height
        self.count = count
        self.written = 0
        self._fh = open(path, "wb")
        self._fh.write(HEADER.pack(MAGIC, VERSION, width, height, count))

    def write(self, pattern: BinaryPattern):
        if (pattern.width, pattern.height) != (self.width, self.height):
            raise DimensionError(
                f"pattern {pattern.width}x{pattern.height} in a "
                f"{self.width}x{self.height} pack")
        if self.written >= self.count:
            raise FormatError(f"pack declared {self.count} patterns")
        self._fh.write(pack_bits(pattern))
        self.written += 1

    def close(self):
        self._fh.close()
        if self.written != self.count:
            self._discard()
            raise FormatError(f"pack declared {self.count} patterns, wrote {self.written}")
        logger.info("wrote %s (%d patterns, %d bytes)", self.path, self.count,
                    pack_size(self.width, self.height, self.count))

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            self.close()
        else:
            self._fh.close()
            self._discard()

    def _discard(self):
        if os.path.exists(self.path):
            os.remove(self.path)
        logger.warning("removed incomplete pack %s", self.path)


def write_pattern_pack(patterns: list[BinaryPattern], path,
                       shape: tuple[int, int] = (1, 1)):
    """Write patterns in order. `shape` (width, height) is only used when empty."""
    if patterns:
        width, height = patterns[0].width, patterns[0].height
    else:
        width, height = shape
    with PatternPackWriter(path, width, height, len(patterns)) as writer:
        for p in patterns:
            writer.write(p)


def read_header(data: bytes) -> tuple[int, int, int]:
    if len(data) < HEADER_SIZE:
        raise FormatError(f"pack shorter than its {HEADER_SIZE}-byte header")
    magic, version, width, height, count = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported pack version {version}")
    if width * height == 0:
        raise FormatError("pack declares an empty pattern size")
    return width, height, count


def iter_pattern_pack(path) -> Iterator[BinaryPattern]:
    with open(path, "rb") as fh:
        width, height, count = read_header(fh.read(HEADER_SIZE))
        size = payload_bytes(width, height)
        actual = os.fstat(fh.fileno()).st_size - HEADER_SIZE
        if actual != count * size:
            raise FormatError(
                f"length mismatch: {count} patterns need {count * size} bytes, found {actual}")
        for _ in range(count):
            yield unpack_bits(fh.read(size), width, height)


def read_pattern_pack(path) -> list[BinaryPattern]:
    return list(iter_pattern_pack(path))
