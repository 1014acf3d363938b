"""Tests for ExperimentConfig loading, overrides and validation."""

import json

import pytest

from core.config import ExperimentConfig
from core.errors import ConfigError
from illumination.sampling import Strategy


def test_defaults_validate():
    cfg = ExperimentConfig().validate()
    assert cfg.plan().measurement_count == 3 * (32 * 32 // 2 + 2)

def test_from_file_with_detector(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"image_size": 8, "strategy": "spiral", "coefficients": 5,
                                "detector": {"gain": 2.0, "noise_sigma": 0.1}}))
    cfg = ExperimentConfig.from_file(path)
    assert cfg.plan().strategy is Strategy.SPIRAL
    det = cfg.detector_config()
    assert det.gain == 2.0 and det.noise_sigma == 0.1
    assert det.illumination_rate == cfg.illumination_rate

def test_unknown_key_rejected():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"image_sise": 8})

def test_unknown_detector_key_rejected():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"detector": {"gian": 1.0}})

def test_bad_json(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text("{image_size: 8")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(path)

def test_overrides_skip_none_and_merge_detector():
    base = ExperimentConfig(detector={"gain": 2.0})
    cfg = base.with_overrides({"image_size": 16, "seed": None, "noise_sigma": 0.5})
    assert cfg.image_size == 16 and cfg.seed == 0
    assert cfg.detector == {"gain": 2.0, "noise_sigma": 0.5}
    assert base.detector == {"gain": 2.0}

def test_ideal_flag_zeroes_noise_and_lag():
    cfg = ExperimentConfig(detector={"noise_sigma": 1.0, "rise_time": 7e-6, "gain": 3.0},
                           ideal_detector=True)
    det = cfg.detector_config()
    assert det.noise_sigma == 0.0 and det.rise_time == 0.0 and det.gain == 3.0

def test_validate_rejects_bad_values():
    for bad in ({"image_size": 7}, {"seed": -1}, {"maxval": 1000},
                {"strategy": "spiral"}, {"coefficients": 3},
                {"illumination_rate": 1e6}, {"contrast_b": 0.8},
                {"upsample_mode": "lanczos"}, {"trace_patterns": -2}):
        with pytest.raises(ConfigError):
            ExperimentConfig(**bad).validate()

def test_to_dict_round_trip():
    cfg = ExperimentConfig(image_size=8, scenes=["r.pgm", "g.pgm", "b.pgm"])
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

def test_wrong_types_rejected():
    for bad in ({"seed": "5"}, {"image_size": 8.0}, {"binary": 1}, {"illumination_rate": True},
                {"coefficients": "3"}, {"scenes": "r.pgm"}, {"scenes": [1, 2, 3]},
                {"detector": {"gain": "2"}}, {"detector": []}):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(bad)

def test_ints_accepted_for_float_keys():
    cfg = ExperimentConfig.from_dict({"illumination_rate": 50, "coefficients": None,
                                      "detector": {"gain": 2}})
    assert cfg.illumination_rate == 50 and cfg.detector == {"gain": 2}

def test_non_utf8_config_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_bytes(b'{"scene": "\xff"}')
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(path)
