"""Tests for spectrum assembly, inverse transform and end-to-end round trips."""

import numpy as np
import pytest

from core.errors import ConsistencyError
from illumination.patterns import PatternParams
from illumination.sampling import FrequencySample, build_plan, spiral_path
from reconstruction.spectrum import (
    Spectrum, assemble_spectrum, inverse_transform, log_magnitude, normalization,
)
from sim.detector import DetectorConfig, MeasurementRecord
from tests.utils import brute_dft, random_scene, run_ideal


def test_dc_triple_on_unit_scene():
    plan, records, spectrum, _ = run_ideal(np.ones((4, 4)), 4, "spiral", 1)
    assert len(records) == 3
    assert spectrum.coeff(0, 0) == pytest.approx(16.0, abs=1e-12)
    assert spectrum.mask.sum() == 1 and spectrum.mask[0, 0]

def test_full_n8_matches_brute_dft():
    scene = random_scene(8, seed=40)
    _, _, spectrum, _ = run_ideal(scene, 8)
    assert spectrum.mask.all()
    for v in range(-4, 4):
        for u in range(-4, 4):
            expected = brute_dft(scene, u, v)
            assert abs(spectrum.coeff(u, v) - expected) <= 1e-9 * max(abs(expected), 1.0)

def test_assembled_spectrum_symmetric():
    _, _, spectrum, _ = run_ideal(random_scene(8, seed=41), 8)
    assert spectrum.asymmetry() < 1e-12
    for f in (FrequencySample(0, 0), FrequencySample(-4, 0), FrequencySample(0, -4),
              FrequencySample(-4, -4)):
        assert spectrum.coeff(f.u, f.v).imag == 0.0

def test_round_trip_three_step_n32():
    scene = random_scene(32, seed=42)
    _, _, _, image = run_ideal(scene, 32)
    assert np.max(np.abs(image.values - scene)) <= 1e-9

def test_round_trip_four_step_n32():
    scene = random_scene(32, seed=43)
    _, _, _, image = run_ideal(scene, 32, schedule="four-step")
    assert np.max(np.abs(image.values - scene)) <= 1e-9

def test_round_trip_n8_pixelwise():
    scene = random_scene(8, seed=44)
    _, _, _, image = run_ideal(scene, 8)
    assert image.values.shape == (8, 8)
    assert np.max(np.abs(image.values - scene)) <= 1e-8

def test_schedules_agree():
    scene = random_scene(16, seed=45)
    _, _, _, three = run_ideal(scene, 16)
    _, _, _, four = run_ideal(scene, 16, schedule="four-step")
    assert np.max(np.abs(three.values - four.values)) <= 1e-9

def test_linearity():
    scene = random_scene(8, seed=46) * 0.5
    _, _, _, base = run_ideal(scene, 8)
    for alpha in (0.0, 0.5, 2.0):
        _, _, _, scaled = run_ideal(scene * alpha, 8)
        assert np.max(np.abs(scaled.values - alpha * base.values)) <= 1e-9

def test_gain_and_offset_normalized_away():
    scene = random_scene(8, seed=47)
    cfg = DetectorConfig(gain=4.0, dark_offset=0.75)
    _, _, _, image = run_ideal(scene, 8, cfg=cfg)
    assert np.max(np.abs(image.values - scene)) <= 1e-9

def test_spiral_dc_gives_scene_mean():
    scene = random_scene(8, seed=48)
    _, _, _, image = run_ideal(scene, 8, "spiral", 1)
    assert np.allclose(image.values, scene.mean(), atol=1e-12)

def test_spiral_commutes_with_truncation():
    scene = random_scene(32, seed=49)
    _, _, full, _ = run_ideal(scene, 32)
    _, _, part, image = run_ideal(scene, 32, "spiral", 100)
    mask = np.zeros((32, 32), dtype=bool)
    for f in spiral_path(32, 100):
        mask[f.v % 32, f.u % 32] = True
        mask[-f.v % 32, -f.u % 32] = True
    expected = inverse_transform(full.truncated(mask)).values
    assert np.array_equal(part.mask, mask)
    assert np.max(np.abs(image.values - expected)) <= 1e-12

def test_upsampled_grayscale_scales_by_k_squared():
    base = random_scene(8, seed=50)
    scene = np.repeat(np.repeat(base, 2, axis=0), 2, axis=1)
    _, _, _, image = run_ideal(scene, 8, k=2, mode="nearest")
    assert np.max(np.abs(image.values - base)) <= 1e-9

def test_normalization_constant():
    plan = build_plan(8, "full", schedule="three-step", pattern=PatternParams(0.5, 0.4, 2))
    assert normalization(plan, 2.0) == pytest.approx(3 * 0.4 * 2.0 * 4)
    plan4 = build_plan(8, "full", schedule="four-step", pattern=PatternParams(0.5, 0.5, 1))
    assert normalization(plan4) == pytest.approx(1.0)


# --- consistency errors ---

def test_missing_phase_rejected():
    plan, records, _, _ = run_ideal(random_scene(4, seed=51), 4)
    with pytest.raises(ConsistencyError):
        assemble_spectrum(records[:-1], plan)

def test_duplicate_rejected():
    plan, records, _, _ = run_ideal(random_scene(4, seed=52), 4)
    with pytest.raises(ConsistencyError):
        assemble_spectrum(records + [records[4]], plan)

def test_unplanned_frequency_rejected():
    plan, records, _, _ = run_ideal(random_scene(4, seed=53), 4, "spiral", 2)
    stray = MeasurementRecord(99, FrequencySample(1, 1), 0.0, 1.0)
    with pytest.raises(ConsistencyError):
        assemble_spectrum(records + [stray], plan)

def test_unknown_phase_rejected():
    plan, records, _, _ = run_ideal(random_scene(4, seed=54), 4, "spiral", 1)
    bad = MeasurementRecord(0, FrequencySample(0, 0), 0.3, 1.0)
    with pytest.raises(ConsistencyError):
        assemble_spectrum([bad] + records[1:], plan)

def test_asymmetric_spectrum_rejected():
    s = Spectrum.empty(4)
    s.coefficients[0, 1] = 1.0 + 1.0j
    with pytest.raises(ConsistencyError):
        inverse_transform(s)


# --- inverse transform ---

def test_inverse_of_forward():
    image = random_scene(16, seed=55)
    assert np.allclose(inverse_transform(Spectrum.from_image(image)).values, image, atol=1e-12)

def test_dc_only_is_constant():
    s = Spectrum.empty(8)
    s.place(FrequencySample(0, 0), 64 * 0.3)
    assert np.allclose(inverse_transform(s).values, 0.3, atol=1e-15)

def test_place_mirrors_conjugate():
    s = Spectrum.empty(8)
    s.place(FrequencySample(1, 2), 2.0 - 1.0j)
    assert s.coeff(-1, -2) == 2.0 + 1.0j
    assert s.mask.sum() == 2

def test_log_magnitude_centred():
    s = Spectrum.empty(8)
    s.place(FrequencySample(0, 0), 10.0)
    display = log_magnitude(s)
    assert display[4, 4] == pytest.approx(np.log1p(10.0))
    assert display.sum() == pytest.approx(np.log1p(10.0))
