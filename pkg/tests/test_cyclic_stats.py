#!/usr/bin/env python3
"""
Tests voor de cyclische autocorrelatie en de teststatistieken.
"""

import sys
import unittest
from pathlib import Path

import numpy as np
from numpy.testing import assert_allclose
from scipy import stats

# Voeg de project root toe aan path voor imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cyclic_stats import (
    CovarianceSpec,
    CyclicParams,
    DetectorKind,
    cd_statistic,
    compute_statistic,
    cyclic_autocorrelation,
    ed_statistic,
    eigen_extremes,
    eme_statistic,
    mme_statistic,
    sample_covariance,
    statistic_batch,
)
from src.errors import DegenerateCovarianceError, NumericError, ParameterError
from src.signal_model import Hypothesis, ModulationConfig, NoiseModel, Waveform, derive_seed, realize_trial


def random_waveform(k: int, seed: int = 0) -> Waveform:
    rng = np.random.default_rng(seed)
    return Waveform(rng.standard_normal(k) + 1j * rng.standard_normal(k))


def brute_force_autocorrelation(y: np.ndarray, alpha: float, lag: int) -> complex:
    k = y.size
    total = 0j
    for n in range(k):
        if 0 <= n + lag < k:
            total += y[n + lag] * np.conj(y[n]) * np.exp(-2j * np.pi * alpha * n)
    return total / k


class TestCyclicAutocorrelation(unittest.TestCase):
    """Test cases voor cyclic_autocorrelation."""

    def test_matches_brute_force(self):
        w = random_waveform(64, seed=1)
        for alpha, lag in [(0.5, 0), (0.5, 3), (0.13, -2), (-0.25, 5), (0.0, 0)]:
            with self.subTest(alpha=alpha, lag=lag):
                got = cyclic_autocorrelation(w, CyclicParams(alpha, lag))
                expected = brute_force_autocorrelation(w.samples, alpha, lag)
                self.assertAlmostEqual(got, expected, places=12)

    def test_lag_too_large(self):
        with self.assertRaises(ParameterError):
            cyclic_autocorrelation(random_waveform(8), CyclicParams(0.5, 8))

    def test_alpha_out_of_range(self):
        with self.assertRaises(ParameterError):
            CyclicParams(alpha=0.75)

    def test_zero_alpha_zero_lag_is_power(self):
        w = random_waveform(100, seed=2)
        r = cyclic_autocorrelation(w, CyclicParams(0.0, 0))
        self.assertAlmostEqual(r.real, ed_statistic(w).value, places=12)
        self.assertAlmostEqual(r.imag, 0.0, places=12)


class TestCdStatistic(unittest.TestCase):
    """Test cases voor de cyclostationaire statistiek."""

    def test_equals_squared_autocorrelation_at_half(self):
        w = random_waveform(200, seed=3)
        r = cyclic_autocorrelation(w, CyclicParams(0.5, 0))
        self.assertAlmostEqual(cd_statistic(w).value, abs(r) ** 2, places=12)

    def test_alternating_power(self):
        """|y|^2 = 2, 0, 2, 0, ... geeft C1 = 1."""
        y = np.tile([np.sqrt(2.0), 0.0], 50)
        self.assertAlmostEqual(cd_statistic(Waveform(y)).value, 1.0, places=12)

    def test_odd_k_rejected(self):
        with self.assertRaises(ParameterError):
            cd_statistic(random_waveform(1999))

    def test_phase_rotation_invariance(self):
        w = random_waveform(400, seed=4)
        rotated = Waveform(w.samples * np.exp(1j * 0.7))
        assert_allclose(cd_statistic(rotated).value, cd_statistic(w).value, rtol=1e-10)
        assert_allclose(ed_statistic(rotated).value, ed_statistic(w).value, rtol=1e-10)

    def test_null_distribution_is_scaled_chi2_1(self):
        """T * K / sigma_w^4 is onder H0 bij benadering chi-kwadraat(1)."""
        config = ModulationConfig(n_symbols=200)
        noise = NoiseModel(nominal_variance=1.0)
        samples = np.stack([
            realize_trial(config, noise, 0.0, Hypothesis.H0, derive_seed(99, 0, i)).samples
            for i in range(1500)
        ])
        scaled = statistic_batch(DetectorKind.CD, samples) * config.num_samples
        result = stats.kstest(scaled, "chi2", args=(1,))
        self.assertGreater(result.pvalue, 1e-3)


class TestCovariance(unittest.TestCase):
    """Test cases voor sample_covariance en eigen_extremes."""

    def test_matches_definition(self):
        w = random_waveform(40, seed=5)
        L = 4
        y = w.samples
        expected = np.zeros((L, L), dtype=complex)
        for n in range(L - 1, y.size):
            v = y[n - np.arange(L)]
            expected += np.outer(v, np.conj(v))
        expected /= y.size - L + 1
        assert_allclose(sample_covariance(w, CovarianceSpec(L)), expected, atol=1e-12)

    def test_hermitian_psd(self):
        r = sample_covariance(random_waveform(500, seed=6), CovarianceSpec(10))
        self.assertEqual(r.shape, (10, 10))
        assert_allclose(r, r.conj().T, atol=1e-12)
        self.assertGreater(eigen_extremes(r)[1], 0.0)

    def test_k_below_two_l(self):
        with self.assertRaises(ParameterError):
            sample_covariance(random_waveform(19), CovarianceSpec(10))

    def test_smoothing_factor_minimum(self):
        with self.assertRaises(ParameterError):
            CovarianceSpec(1)

    def test_eigen_extremes_known_matrices(self):
        self.assertEqual(
            tuple(round(x, 10) for x in eigen_extremes(np.array([[2.0, 1.0], [1.0, 2.0]]))), (3.0, 1.0)
        )
        lam_max, lam_min = eigen_extremes(np.diag([5.0, 1.0, 2.0]))
        self.assertAlmostEqual(lam_max, 5.0)
        self.assertAlmostEqual(lam_min, 1.0)
        lam_max, lam_min = eigen_extremes(np.array([[2.0, 1j], [-1j, 2.0]]))
        self.assertAlmostEqual(lam_max, 3.0)
        self.assertAlmostEqual(lam_min, 1.0)

    def test_eigen_extremes_errors(self):
        with self.assertRaises(ParameterError):
            eigen_extremes(np.ones((2, 3)))
        with self.assertRaises(NumericError):
            eigen_extremes(np.array([[1.0, np.nan], [np.nan, 1.0]]))


class TestEigenStatistics(unittest.TestCase):
    """Test cases voor MME en EME."""

    def setUp(self):
        self.spec = CovarianceSpec(4)

    def test_mme_at_least_one(self):
        w = random_waveform(400, seed=7)
        self.assertGreaterEqual(mme_statistic(w, self.spec).value, 1.0)

    def test_scale_invariance(self):
        w = random_waveform(400, seed=8)
        scaled = Waveform(w.samples * 3.0)
        assert_allclose(mme_statistic(scaled, self.spec).value, mme_statistic(w, self.spec).value, rtol=1e-9)
        assert_allclose(eme_statistic(scaled, self.spec).value, eme_statistic(w, self.spec).value, rtol=1e-9)

    def test_zero_waveform_is_degenerate(self):
        w = Waveform(np.zeros(100))
        with self.assertRaises(DegenerateCovarianceError):
            mme_statistic(w, self.spec)
        with self.assertRaises(DegenerateCovarianceError):
            eme_statistic(w, self.spec)
        self.assertTrue(np.isnan(statistic_batch(DetectorKind.MME, w.samples[None, :], self.spec)[0]))

    def test_batch_matches_single(self):
        waveforms = [random_waveform(200, seed=s) for s in range(5)]
        samples = np.stack([w.samples for w in waveforms])
        for kind in DetectorKind:
            with self.subTest(kind=kind):
                batch = statistic_batch(kind, samples, self.spec)
                single = [compute_statistic(kind, w, self.spec).value for w in waveforms]
                assert_allclose(batch, single, rtol=1e-10)


def brute_force_statistics(y: np.ndarray, L: int) -> dict:
    """Alle vier statistieken met expliciete lussen en een algemene eigen solve."""
    k = y.size
    c0 = sum(abs(v) ** 2 for v in y) / k
    c1 = sum(abs(y[n]) ** 2 * (-1) ** n for n in range(k)) / k
    r = np.zeros((L, L), dtype=complex)
    for n in range(L - 1, k):
        for i in range(L):
            for j in range(L):
                r[i, j] += y[n - i] * np.conj(y[n - j])
    r /= k - L + 1
    eigenvalues = np.linalg.eig(r)[0].real
    return {
        DetectorKind.CD: c1 ** 2,
        DetectorKind.ED: c0,
        DetectorKind.MME: eigenvalues.max() / eigenvalues.min(),
        DetectorKind.EME: c0 / eigenvalues.min(),
    }


class TestAgainstBruteForce(unittest.TestCase):
    """Alle statistieken tegen naïeve sommatie voor 100 korte waveforms."""

    def test_random_short_waveforms(self):
        rng = np.random.default_rng(42)
        for trial in range(100):
            k = int(rng.choice([4, 6, 8, 10, 12, 14, 16]))
            L = int(rng.integers(2, k // 2 + 1))
            spec = CovarianceSpec(L)
            y = rng.standard_normal(k) + 1j * rng.standard_normal(k)
            expected = brute_force_statistics(y, L)
            for kind in DetectorKind:
                with self.subTest(trial=trial, kind=kind):
                    got = compute_statistic(kind, Waveform(y), spec).value
                    assert_allclose(got, expected[kind], rtol=1e-9)


class TestScalingLaws(unittest.TestCase):
    """CD schaalt met |c|^4 en ED met |c|^2."""

    def test_cd_and_ed_scaling(self):
        w = random_waveform(300, seed=12)
        for c in (0.5, 3.0, 2.0 - 1.5j):
            scaled = Waveform(w.samples * c)
            with self.subTest(c=c):
                assert_allclose(cd_statistic(scaled).value, abs(c) ** 4 * cd_statistic(w).value, rtol=1e-10)
                assert_allclose(ed_statistic(scaled).value, abs(c) ** 2 * ed_statistic(w).value, rtol=1e-10)


class TestCdNullMoments(unittest.TestCase):
    """Gemiddelde sigma_w^4 / K en variantie 2 sigma_w^8 / K^2 onder H0."""

    def test_mean_and_variance(self):
        k, trials, sigma_w2 = 200, 20000, 2.0
        rng = np.random.default_rng(2024)
        scale = np.sqrt(sigma_w2 / 2.0)
        samples = scale * (rng.standard_normal((trials, k)) + 1j * rng.standard_normal((trials, k)))
        values = statistic_batch(DetectorKind.CD, samples)
        mu0 = sigma_w2 ** 2 / k
        # relatieve standaardfout: ~0.01 voor het gemiddelde, ~0.026 voor de variantie
        self.assertAlmostEqual(values.mean() / mu0, 1.0, delta=0.05)
        self.assertAlmostEqual(values.var() / (2.0 * mu0 ** 2), 1.0, delta=0.12)



class TestDetectorKind(unittest.TestCase):

    def test_parse(self):
        self.assertIs(DetectorKind.parse(" cd "), DetectorKind.CD)
        with self.assertRaises(ParameterError):
            DetectorKind.parse("matched")


if __name__ == "__main__":
    unittest.main()
