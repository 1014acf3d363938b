"""Tests for the FSPK 1-bit pattern pack."""

import numpy as np
import pytest

from core.errors import DimensionError, FormatError
from core.rng import keyed_generator
from formats.pattern_pack import (
    HEADER_SIZE, PatternPackWriter, iter_pattern_pack, pack_size, patterns_per_memory,
    payload_bytes, read_header, read_pattern_pack, storage_ratio, write_pattern_pack,
)
from illumination.patterns import BinaryPattern


def _random_patterns(count, w, h, seed=80):
    g = keyed_generator(seed, 0)
    return [BinaryPattern(g.integers(0, 2, (h, w))) for _ in range(count)]


def test_header_size():
    assert HEADER_SIZE == 18

def test_msb_first_rows(tmp_path):
    path = tmp_path / "p.fspk"
    write_pattern_pack([BinaryPattern(np.array([[1, 0, 1], [0, 1, 1]]))], path)
    data = path.read_bytes()
    assert data[:4] == b"FSPK"
    assert read_header(data) == (3, 2, 1)
    assert data[HEADER_SIZE:] == bytes([0xA0, 0x60])

def test_512_payload():
    assert payload_bytes(512, 512) == 32_768
    assert storage_ratio(512, 512) == 1 / 8
    assert 1 - storage_ratio(512, 512) == 0.875

def test_spiral_frame_pack_size():
    assert pack_size(512, 512, 999) == 18 + 999 * 32_768

def test_padded_rows():
    assert payload_bytes(3, 2) == 2
    assert payload_bytes(9, 4) == 8

def test_patterns_in_eight_gib():
    assert patterns_per_memory(512, 512, 8 * 1024 ** 3) == (8 * 1024 ** 3 - 18) // 32_768

def test_round_trip(tmp_path):
    path = tmp_path / "r.fspk"
    patterns = _random_patterns(7, 13, 5)
    write_pattern_pack(patterns, path)
    assert read_pattern_pack(path) == patterns
    assert path.stat().st_size == pack_size(13, 5, 7)

def test_streaming_iterator(tmp_path):
    path = tmp_path / "s.fspk"
    patterns = _random_patterns(3, 8, 8, seed=81)
    write_pattern_pack(patterns, path)
    assert list(iter_pattern_pack(path)) == patterns

def test_empty_pack(tmp_path):
    path = tmp_path / "e.fspk"
    write_pattern_pack([], path, shape=(4, 4))
    assert read_pattern_pack(path) == []

def test_truncated_payload(tmp_path):
    path = tmp_path / "t.fspk"
    write_pattern_pack(_random_patterns(2, 8, 8), path)
    path.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(FormatError):
        read_pattern_pack(path)

def test_bad_magic(tmp_path):
    path = tmp_path / "m.fspk"
    write_pattern_pack(_random_patterns(1, 8, 8), path)
    path.write_bytes(b"XXXX" + path.read_bytes()[4:])
    with pytest.raises(FormatError):
        read_pattern_pack(path)

def test_bad_version(tmp_path):
    path = tmp_path / "v.fspk"
    write_pattern_pack(_random_patterns(1, 8, 8), path)
    data = bytearray(path.read_bytes())
    data[4] = 2
    path.write_bytes(bytes(data))
    with pytest.raises(FormatError):
        read_pattern_pack(path)

def test_mixed_sizes_rejected(tmp_path):
    patterns = _random_patterns(1, 8, 8) + _random_patterns(1, 4, 4)
    with pytest.raises(DimensionError):
        write_pattern_pack(patterns, tmp_path / "x.fspk")

def test_writer_checks_declared_count(tmp_path):
    with pytest.raises(FormatError):
        with PatternPackWriter(tmp_path / "c.fspk", 8, 8, 2) as writer:
            writer.write(_random_patterns(1, 8, 8)[0])
    assert not (tmp_path / "c.fspk").exists()

def test_failed_write_removes_partial_pack(tmp_path):
    path = tmp_path / "p.fspk"
    with pytest.raises(DimensionError):
        with PatternPackWriter(path, 8, 8, 3) as writer:
            writer.write(_random_patterns(1, 8, 8)[0])
            writer.write(_random_patterns(1, 4, 4)[0])
    assert not path.exists()

def test_mixed_sizes_leave_no_file(tmp_path):
    patterns = _random_patterns(2, 8, 8) + _random_patterns(1, 4, 4)
    with pytest.raises(DimensionError):
        write_pattern_pack(patterns, tmp_path / "m.fspk")
    assert not (tmp_path / "m.fspk").exists()
