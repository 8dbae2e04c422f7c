#!/usr/bin/env python3
"""
Tests voor de experiment configuratie.
"""

import json
import sys
import tempfile
import unittest
from pathlib import Path

# Voeg de project root toe aan path voor imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config import ExperimentConfig, default_config, parse_config_text
from src.cyclic_stats import DetectorKind
from src.errors import ConfigError, ParameterError
from src.signal_model import ModulationConfig

ROOT = Path(__file__).parent.parent
SAMPLES = Path(__file__).parent / "samples"


class TestParseConfigText(unittest.TestCase):
    """Test cases voor de key = value parser."""

    def test_types_and_comments(self):
        data = parse_config_text(
            "# commentaar\n"
            "scheme = qpsk   # inline\n"
            "\n"
            "n_symbols = 250\n"
            "target_pf = 0.05\n"
            "detectors = cd, ed\n"
            "uncertainties_db = 0, 0.5\n"
        )
        self.assertEqual(data, {
            "scheme": "QPSK",
            "n_symbols": 250,
            "target_pf": 0.05,
            "detectors": ["CD", "ED"],
            "uncertainties_db": [0.0, 0.5],
        })

    def test_inclusive_range(self):
        data = parse_config_text("snr_grid_db = -2:0:0.5")
        self.assertEqual(data["snr_grid_db"], [-2.0, -1.5, -1.0, -0.5, 0.0])

    def test_diagnostics_carry_line_numbers(self):
        with self.assertRaises(ConfigError) as ctx:
            ExperimentConfig.from_file(SAMPLES / "bad_keys.conf")
        diagnostics = ctx.exception.diagnostics
        self.assertEqual(len(diagnostics), 3)
        self.assertIn("regel 3", diagnostics[0])
        self.assertIn("snr_step", diagnostics[0])
        self.assertIn("regel 4", diagnostics[1])
        self.assertIn("regel 5", diagnostics[2])

    def test_duplicate_key(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config_text("n_symbols = 10\nn_symbols = 20\n")
        self.assertIn("regel 1", ctx.exception.diagnostics[0])

    def test_bad_range(self):
        with self.assertRaises(ConfigError):
            parse_config_text("snr_grid_db = 0:-5:1")


class TestExperimentConfig(unittest.TestCase):
    """Test cases voor ExperimentConfig."""

    def test_default_file_matches_defaults(self):
        self.assertEqual(ExperimentConfig.from_file(ROOT / "config" / "default.conf"), default_config())

    def test_defaults(self):
        config = default_config()
        self.assertEqual(config.num_samples, 2000)
        self.assertEqual(config.snr_grid_db[0], -20.0)
        self.assertEqual(config.snr_grid_db[-1], 0.0)
        self.assertEqual(config.detectors, (DetectorKind.ED, DetectorKind.CD, DetectorKind.MME, DetectorKind.EME))
        self.assertEqual(config.validate(), [])

    def test_pf_zero_rejected(self):
        with self.assertRaises(ConfigError) as ctx:
            ExperimentConfig.from_dict({"target_pf": 0.0})
        self.assertTrue(any("target_pf" in d for d in ctx.exception.diagnostics))
        self.assertIsInstance(ctx.exception, ParameterError)

    def test_unknown_dict_key_rejected(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict({"threshold": 1.0})

    def test_odd_k_with_cd(self):
        config = ExperimentConfig(modulation=ModulationConfig(samples_per_symbol=1, n_symbols=999))
        self.assertTrue(any("even K" in e for e in config.validate()))

    def test_calibration_trials_too_few_for_pf(self):
        with self.assertRaises(ConfigError):
            default_config().with_overrides(target_pf=0.01, calibration_trials=500)

    def test_overrides(self):
        config = default_config().with_overrides(master_seed=5, pf_trials=None)
        self.assertEqual(config.master_seed, 5)
        self.assertEqual(config.pf_trials, 100_000)

    def test_preset_code(self):
        cd_only = ExperimentConfig.from_file(SAMPLES / "cd_only.conf")
        self.assertEqual(cd_only.preset_code(), "BPSK-BT0.5-SPS2-K1000-PF0.1")
        self.assertEqual(default_config().preset_code(), "BPSK-BT0.5-SPS2-K2000-PF0.1-L10")

    def test_dict_round_trip(self):
        config = ExperimentConfig.from_file(SAMPLES / "small.conf")
        self.assertEqual(ExperimentConfig.from_dict(config.to_dict()), config)
        self.assertEqual(config.snr_grid_db, (-4.0, -2.0, 0.0))

    def test_manifest_json_accepted(self):
        config = ExperimentConfig.from_file(SAMPLES / "small.conf")
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "manifest.json"
            path.write_text(json.dumps({"config": config.to_dict(), "version": "1.0.0"}), encoding="utf-8")
            self.assertEqual(ExperimentConfig.from_file(path), config)

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            ExperimentConfig.from_file(SAMPLES / "bestaat_niet.conf")


if __name__ == "__main__":
    unittest.main()
