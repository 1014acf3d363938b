"""Tests for half-plane enumeration, spiral order, plans and timing."""

import math
from fractions import Fraction

import pytest

from core.errors import ConfigError
from illumination.patterns import PatternParams
from illumination.sampling import (
    FrequencySample, PhaseSchedule, Strategy, acquisition_time, build_plan,
    compression_rate, frame_rate, half_plane_frequencies, in_half_plane,
    measurement_time, signed_frequency, spiral_path,
)


def _pairs(freqs):
    return [(f.u, f.v) for f in freqs]


def test_signed_frequency_range():
    assert [signed_frequency(f, 8) for f in range(8)] == [0, 1, 2, 3, -4, -3, -2, -1]

def test_conjugate_folds_nyquist():
    assert FrequencySample(-4, 1).conjugate(8) == FrequencySample(-4, -1)
    assert FrequencySample(-4, -4).is_self_conjugate(8)

def test_half_plane_n2():
    assert _pairs(half_plane_frequencies(2)) == [(0, 0), (0, -1), (-1, 0), (-1, -1)]

def test_half_plane_n4_size():
    assert len(half_plane_frequencies(4)) == 10

def test_half_plane_count_law():
    for n in (4, 8, 16, 128):
        assert len(half_plane_frequencies(n)) == n * n // 2 + 2

def test_dc_first():
    for n in (2, 4, 8, 32):
        assert half_plane_frequencies(n)[0] == FrequencySample(0, 0)

def test_half_plane_tiles_all_bins():
    for n in (2, 4, 8, 16):
        half = half_plane_frequencies(n)
        covered = {(f.u % n, f.v % n) for f in half}
        mirrors = {(f.conjugate(n).u % n, f.conjugate(n).v % n) for f in half}
        assert covered | mirrors == {(u, v) for u in range(n) for v in range(n)}
        overlap = {f for f in half if f.conjugate(n) in set(half)}
        assert overlap == {f for f in half if f.is_self_conjugate(n)}
        assert len(overlap) == 4

def test_membership_rule():
    n = 8
    assert in_half_plane(FrequencySample(0, -4), n)
    assert in_half_plane(FrequencySample(-4, 3), n)
    assert not in_half_plane(FrequencySample(-4, -3), n)
    assert not in_half_plane(FrequencySample(0, -1), n)
    assert not in_half_plane(FrequencySample(-1, 2), n)

def test_half_plane_rejects_odd():
    with pytest.raises(ConfigError):
        half_plane_frequencies(7)

def test_radius_non_decreasing():
    half = half_plane_frequencies(16)
    radii = [f.radius2 for f in half]
    assert radii == sorted(radii)

def test_spiral_dc_only():
    assert _pairs(spiral_path(16, 1)) == [(0, 0)]

def test_spiral_n8_m5():
    assert _pairs(spiral_path(8, 5)) == [(0, 0), (1, 0), (0, 1), (1, -1), (1, 1)]

def test_spiral_prefix_property():
    for m in range(1, 34):
        assert spiral_path(8, m + 1)[:m] == spiral_path(8, m)

def test_spiral_rejects_out_of_range():
    with pytest.raises(ConfigError):
        spiral_path(8, 0)
    with pytest.raises(ConfigError):
        spiral_path(8, 35)

def test_compression_rate_128_333():
    rate = compression_rate(128, 333)
    assert rate == Fraction(666, 16384)
    assert abs(float(rate) - 0.0407) < 1e-3


# --- plans ---

def test_full_plan_256_count():
    plan = build_plan(256, "full", schedule="three-step")
    assert plan.measurement_count == 98_310
    assert plan.idealized_count == 98_304

def test_spiral_plan_999():
    plan = build_plan(128, "spiral", 333, "three-step", 10_000.0, PatternParams(upsample_k=4))
    assert plan.measurement_count == 999
    assert plan.idealized_count == 999
    assert plan.pattern_size == 512

def test_four_step_n4():
    assert build_plan(4, "full", schedule="four-step").measurement_count == 40

def test_steps_grouped_per_frequency():
    plan = build_plan(8, Strategy.FULL, schedule=PhaseSchedule.THREE_STEP)
    phases = PhaseSchedule.THREE_STEP.phases
    for i, step in enumerate(plan.steps):
        assert step.index == i
        assert step.phase == phases[i % 3]
        assert step.frequency == plan.steps[i - i % 3].frequency
    assert len(plan.frequencies) == plan.coefficient_count == 34

def test_phase_schedules():
    assert PhaseSchedule.THREE_STEP.phases == (0.0, 2 * math.pi / 3, 4 * math.pi / 3)
    assert PhaseSchedule("four-step").phases[2] == math.pi

def test_spiral_needs_m():
    with pytest.raises(ConfigError):
        build_plan(8, "spiral")

def test_plan_rejects_nonpositive_rate():
    with pytest.raises(ConfigError):
        build_plan(4, "full", rate_r=0.0)

def test_unknown_strategy():
    with pytest.raises(ValueError):
        build_plan(4, "zigzag")


# --- timing ---

def test_acquisition_time_exact():
    assert measurement_time(98_304, 50) == Fraction(196_608, 100)
    assert measurement_time(98_304, 10_000) == Fraction(98_304, 10_000)
    assert float(measurement_time(98_304, 20_000)) == 4.9152
    assert float(measurement_time(999, 10_000)) == 0.0999

def test_acquisition_time_linear_and_inverse():
    base = measurement_time(300, 1000)
    assert measurement_time(600, 1000) == 2 * base
    assert measurement_time(300, 2000) == base / 2

def test_acquisition_time_rejects_zero_rate():
    with pytest.raises(ConfigError):
        measurement_time(10, 0)

def test_plan_time_and_fps():
    plan = build_plan(128, "spiral", 333, rate_r=10_000.0)
    assert acquisition_time(plan) == pytest.approx(0.0999)
    assert round(frame_rate(plan)) == 10
