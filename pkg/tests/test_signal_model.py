#!/usr/bin/env python3
"""
Tests voor het signaalmodel.
"""

import math
import sys
import unittest
from pathlib import Path

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from scipy import stats

# Voeg de project root toe aan path voor imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.errors import ParameterError
from src.signal_model import (
    Hypothesis,
    ModulationConfig,
    NoiseModel,
    SymbolSource,
    Waveform,
    decimate_to_two_sps,
    derive_seed,
    gaussian_pulse_taps,
    modulate,
    realize_trial,
)


class TestGaussianPulse(unittest.TestCase):
    """Test cases voor de Gaussische puls."""

    def test_default_taps(self):
        """9 symmetrische taps met piek 1 in het midden."""
        taps = gaussian_pulse_taps(ModulationConfig())
        self.assertEqual(taps.size, 9)
        self.assertEqual(taps[4], 1.0)
        assert_allclose(taps, taps[::-1])
        self.assertTrue(np.all(np.diff(taps[:5]) > 0))

    def test_tap_value_one_symbol_away(self):
        taps = gaussian_pulse_taps(ModulationConfig())
        expected = math.exp(-2.0 * math.pi ** 2 * 0.25 / math.log(2.0))
        self.assertAlmostEqual(taps[6], expected, places=12)

    def test_half_symbol_ratio(self):
        """g(T/2) / g(0) bij BT = 0.5."""
        taps = gaussian_pulse_taps(ModulationConfig())
        self.assertAlmostEqual(taps[5] / taps[4], 0.1686, places=4)

    def test_large_bt_is_a_single_tap(self):
        taps = gaussian_pulse_taps(ModulationConfig(bt_product=50.0))
        others = np.delete(taps, taps.size // 2)
        self.assertTrue(np.all(others < 1e-6 * taps[taps.size // 2]))

    def test_invalid_parameters(self):
        for config in (ModulationConfig(bt_product=0.0),
                       ModulationConfig(pulse_span_symbols=0),
                       ModulationConfig(samples_per_symbol=0)):
            with self.assertRaises(ParameterError):
                gaussian_pulse_taps(config)


class TestSymbolSource(unittest.TestCase):
    """Test cases voor SymbolSource."""

    def test_bpsk_mean_and_lag1_correlation(self):
        n = 100_000
        s = SymbolSource.for_scheme("BPSK", rng_seed=8).draw(n)
        self.assertEqual(set(np.unique(s.real)), {-1.0, 1.0})
        self.assertLess(abs(np.mean(s)), 3.0 / math.sqrt(n))
        self.assertLess(abs(np.mean(s[1:] * np.conj(s[:-1]))), 3.0 / math.sqrt(n))

    def test_same_seed_same_symbols(self):
        a = SymbolSource.for_scheme("QPSK", rng_seed=4).draw(50)
        assert_array_equal(a, SymbolSource.for_scheme("QPSK", rng_seed=4).draw(50))
        assert_allclose(np.abs(a), 1.0)

    def test_unknown_scheme(self):
        with self.assertRaises(ParameterError):
            SymbolSource.for_scheme("16QAM")


class TestModulate(unittest.TestCase):
    """Test cases voor modulate."""

    def setUp(self):
        self.config = ModulationConfig(n_symbols=200)
        self.symbols = SymbolSource.for_scheme("BPSK", rng_seed=3).draw(
            self.config.n_symbols + 2 * self.config.guard_symbols
        )

    def test_length_and_unit_power(self):
        w = modulate(self.symbols, self.config)
        self.assertEqual(len(w), 400)
        self.assertAlmostEqual(float(np.mean(np.abs(w.samples) ** 2)), 1.0, places=10)

    def test_wrong_symbol_count(self):
        with self.assertRaises(ParameterError):
            modulate(self.symbols[:-1], self.config)
        with self.assertRaises(ParameterError):
            modulate([], self.config)

    def test_zero_symbols_stay_zero(self):
        w = modulate(np.zeros_like(self.symbols), self.config)
        self.assertFalse(np.any(w.samples))

    def test_qpsk_is_complex(self):
        config = ModulationConfig(scheme="QPSK", n_symbols=100)
        symbols = SymbolSource.for_scheme("QPSK", rng_seed=1).draw(100 + 2 * config.guard_symbols)
        w = modulate(symbols, config)
        self.assertGreater(float(np.mean(w.samples.imag ** 2)), 0.2)


class TestRealizeTrial(unittest.TestCase):
    """Test cases voor realize_trial."""

    def setUp(self):
        self.config = ModulationConfig()
        self.noise = NoiseModel()

    def test_deterministic_for_seed(self):
        a = realize_trial(self.config, self.noise, -10.0, Hypothesis.H1, derive_seed(5, 1, 2, 3))
        b = realize_trial(self.config, self.noise, -10.0, Hypothesis.H1, derive_seed(5, 1, 2, 3))
        c = realize_trial(self.config, self.noise, -10.0, Hypothesis.H1, derive_seed(5, 1, 2, 4))
        assert_array_equal(a.samples, b.samples)
        self.assertFalse(np.array_equal(a.samples, c.samples))

    def test_noise_power(self):
        """Onder H0 is het vermogen per sample sigma_w^2 (std ~ 0.022 bij K = 2000)."""
        w = realize_trial(self.config, NoiseModel(nominal_variance=2.0), 0.0, Hypothesis.H0, 11)
        self.assertEqual(len(w), 2000)
        self.assertAlmostEqual(float(np.mean(np.abs(w.samples) ** 2)), 2.0, delta=0.2)

    def test_signal_power_at_zero_db(self):
        w = realize_trial(self.config, self.noise, 0.0, Hypothesis.H1, 12)
        self.assertAlmostEqual(float(np.mean(np.abs(w.samples) ** 2)), 2.0, delta=0.2)

    def test_h0_ignores_snr(self):
        a = realize_trial(self.config, self.noise, -20.0, Hypothesis.H0, 13)
        b = realize_trial(self.config, self.noise, 5.0, Hypothesis.H0, 13)
        assert_array_equal(a.samples, b.samples)

    def test_h0_is_white_at_small_lags(self):
        config = ModulationConfig(n_symbols=50_000)
        y = realize_trial(config, self.noise, 0.0, Hypothesis.H0, 31).samples
        k = y.size
        for lag in range(1, 6):
            with self.subTest(lag=lag):
                r = np.sum(y[lag:] * np.conj(y[:-lag])) / k
                self.assertLess(abs(r), 3.0 / math.sqrt(k))

    def test_invalid_noise(self):
        with self.assertRaises(ParameterError):
            realize_trial(self.config, NoiseModel(nominal_variance=0.0), 0.0, Hypothesis.H0, 1)

    def test_waveform_is_read_only(self):
        w = realize_trial(self.config, self.noise, 0.0, Hypothesis.H0, 1)
        with self.assertRaises(ValueError):
            w.samples[0] = 0


class TestNoiseUncertainty(unittest.TestCase):
    """Test cases voor NoiseModel.draw_variance."""

    def test_zero_uncertainty_is_exact(self):
        rng = np.random.default_rng(0)
        self.assertEqual(NoiseModel(1.5, 0.0).draw_variance(rng), 1.5)

    def test_variance_within_band(self):
        rng = np.random.default_rng(0)
        noise = NoiseModel(1.0, 2.0)
        draws = np.array([noise.draw_variance(rng) for _ in range(2000)])
        self.assertGreaterEqual(draws.min(), 10 ** -0.2)
        self.assertLessEqual(draws.max(), 10 ** 0.2)
        # uniform in dB: gemiddelde in dB rond 0
        self.assertAlmostEqual(float(np.mean(10 * np.log10(draws))), 0.0, delta=0.15)

    def test_uniform_in_db(self):
        """Chi-kwadraat goodness of fit over 10 gelijke dB bakken."""
        rng = np.random.default_rng(5)
        noise = NoiseModel(1.0, 2.0)
        db = 10 * np.log10([noise.draw_variance(rng) for _ in range(10_000)])
        counts, _ = np.histogram(db, bins=10, range=(-2.0, 2.0))
        self.assertEqual(counts.sum(), 10_000)
        self.assertGreater(stats.chisquare(counts).pvalue, 1e-3)


class TestDecimate(unittest.TestCase):
    """Test cases voor decimate_to_two_sps."""

    def test_keeps_every_factor_th_sample(self):
        w = Waveform(np.arange(16, dtype=complex), samples_per_symbol=8)
        out = decimate_to_two_sps(w, 4)
        assert_array_equal(out.samples, np.arange(0, 16, 4))
        self.assertEqual(out.samples_per_symbol, 2)

    def test_identity_at_two_sps(self):
        w = Waveform(np.ones(4), samples_per_symbol=2)
        self.assertIs(decimate_to_two_sps(w, 1), w)

    def test_factor_mismatch(self):
        w = Waveform(np.ones(12), samples_per_symbol=6)
        with self.assertRaises(ParameterError):
            decimate_to_two_sps(w, 2)

    def test_decimated_noise_stays_white(self):
        config = ModulationConfig(samples_per_symbol=8, n_symbols=1000)
        w = realize_trial(config, NoiseModel(), 0.0, Hypothesis.H0, 21)
        y = decimate_to_two_sps(w, 4).samples
        k = y.size
        r1 = np.sum(y[1:] * np.conj(y[:-1])) / k
        # std van de lag-1 schatting is sigma^2 / sqrt(K)
        self.assertLess(abs(r1), 3.0 / math.sqrt(k))


if __name__ == "__main__":
    unittest.main()
