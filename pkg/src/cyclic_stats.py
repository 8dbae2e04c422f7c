"""
Cyclische autocorrelatie en teststatistieken.

Bevat de cyclische autocorrelatie schatter en de vier statistieken: de cyclostationaire
detector (CD), energiedetectie (ED) en de eigenwaarde statistieken MME en
EME. Naast de functies op een enkele Waveform zijn er `*_batch` varianten
die over de laatste as van een (trials, K) array werken; de Monte Carlo
harness gebruikt die.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DegenerateCovarianceError, NumericError, ParameterError
from .signal_model import Waveform

# Relatieve tolerantie waarbinnen een negatieve eigenwaarde als afrondingsfout geldt
PSD_CLAMP_TOL = 1e-10


class DetectorKind(str, Enum):
    """Soort detector / statistiek."""

    CD = "CD"
    ED = "ED"
    MME = "MME"
    EME = "EME"

    @classmethod
    def parse(cls, name: str) -> "DetectorKind":
        try:
            return cls(name.strip().upper())
        except ValueError:
            raise ParameterError(f"Onbekende detector '{name}', kies uit {[k.value for k in cls]}")


# Rijvolgorde van de benchmarktabel
TABLE_ORDER: List[DetectorKind] = [DetectorKind.ED, DetectorKind.CD, DetectorKind.MME, DetectorKind.EME]


@dataclass(frozen=True)
class CyclicParams:
    """
    Parameters van de cyclische autocorrelatie.

    Attributes:
        alpha: Cyclusfrequentie in cycli/sample, in [-0.5, 0.5)
        lag: Integer lag l (tau = l T_s)
    """
    alpha: float = 0.5
    lag: int = 0

    def __post_init__(self):
        if not -0.5 <= self.alpha <= 0.5:
            raise ParameterError(f"alpha {self.alpha} buiten [-0.5, 0.5]")


@dataclass(frozen=True)
class CovarianceSpec:
    """
    Attributes:
        smoothing_factor: Vensterlengte L van de steekproef covariantie
    """
    smoothing_factor: int = 10

    def __post_init__(self):
        if self.smoothing_factor < 2:
            raise ParameterError("smoothing_factor moet >= 2 zijn")


@dataclass(frozen=True)
class StatisticValue:
    """Waarde van een teststatistiek."""
    kind: DetectorKind
    value: float


def cyclic_autocorrelation(w: Waveform, p: CyclicParams) -> complex:
    """
    Schatter van de tweede orde cyclische autocorrelatie.

    R(l) = (1/K) sum_n y(n+l) y*(n) exp(-j 2 pi alpha n), waarbij de som loopt
    over de n waarvoor beide indices binnen het blok vallen. Normalisatie is
    altijd door de volledige K.

    Args:
        w: Ontvangen samples
        p: Cyclusfrequentie en lag

    Returns:
        Complexe schatting

    Raises:
        ParameterError: Als |lag| >= K
    """
    y = w.samples
    k = y.size
    lag = int(p.lag)
    if abs(lag) >= k:
        raise ParameterError(f"|lag| = {abs(lag)} moet kleiner zijn dan K = {k}")

    n = np.arange(max(0, -lag), min(k, k - lag))
    phasor = np.exp(-2j * np.pi * p.alpha * n)
    return complex(np.sum(y[n + lag] * np.conj(y[n]) * phasor) / k)


def _check_even(k: int) -> None:
    if k == 0 or k % 2:
        raise ParameterError(f"CD statistiek vereist een even K > 0, kreeg K = {k}")


def cd_batch(samples: np.ndarray) -> np.ndarray:
    """
    C1^2 met C1 = (1/K) sum |y(n)|^2 (-1)^n, over de laatste as.

    Args:
        samples: Array (..., K) met even K

    Returns:
        Array (...) met de CD statistiek
    """
    k = samples.shape[-1]
    _check_even(k)
    power = samples.real ** 2 + samples.imag ** 2
    c1 = (power[..., 0::2].sum(axis=-1) - power[..., 1::2].sum(axis=-1)) / k
    return c1 * c1


def ed_batch(samples: np.ndarray) -> np.ndarray:
    """Gemiddeld vermogen C0 = (1/K) sum |y(n)|^2 over de laatste as."""
    if samples.shape[-1] == 0:
        raise ParameterError("Lege waveform")
    return np.mean(samples.real ** 2 + samples.imag ** 2, axis=-1)


def covariance_batch(samples: np.ndarray, smoothing_factor: int) -> np.ndarray:
    """
    Gladgestreken steekproef covariantie per trial.

    R = 1/(K-L+1) sum_{n=L-1}^{K-1} v(n) v(n)^H met
    v(n) = [y(n), y(n-1), ..., y(n-L+1)]^T.

    Args:
        samples: Array (..., K)
        smoothing_factor: L

    Returns:
        Array (..., L, L), Hermitisch positief semidefiniet

    Raises:
        ParameterError: Als K < 2L
    """
    k = samples.shape[-1]
    L = int(smoothing_factor)
    if L < 1 or k < 2 * L:
        raise ParameterError(f"Covariantie vereist K >= 2L, kreeg K = {k}, L = {L}")
    # rij n' bevat [y(n'+L-1), ..., y(n')]
    windows = sliding_window_view(samples, L, axis=-1)[..., ::-1]
    stacked = np.swapaxes(windows, -1, -2)
    return np.matmul(stacked, np.conj(windows)) / (k - L + 1)


def eigen_extremes_batch(r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Grootste en kleinste eigenwaarde van een stapel Hermitische matrices.

    Kleine negatieve eigenwaarden (binnen PSD_CLAMP_TOL * lambda_max) worden
    naar 0 gezet.
    """
    r = np.asarray(r)
    if not np.all(np.isfinite(r)):
        raise NumericError("Covariantiematrix bevat niet-eindige elementen")
    hermitian = 0.5 * (r + np.conj(np.swapaxes(r, -1, -2)))
    eigenvalues = np.linalg.eigvalsh(hermitian)
    lam_max = eigenvalues[..., -1]
    lam_min = eigenvalues[..., 0]
    roundoff = (lam_min < 0) & (lam_min >= -PSD_CLAMP_TOL * np.abs(lam_max))
    lam_min = np.where(roundoff, 0.0, lam_min)
    return lam_max, lam_min


def mme_batch(samples: np.ndarray, smoothing_factor: int) -> np.ndarray:
    """lambda_max / lambda_min per trial; NaN voor een gedegenereerde covariantie."""
    lam_max, lam_min = eigen_extremes_batch(covariance_batch(samples, smoothing_factor))
    return _ratio(lam_max, lam_min)


def eme_batch(samples: np.ndarray, smoothing_factor: int) -> np.ndarray:
    """C0 / lambda_min per trial; NaN voor een gedegenereerde covariantie."""
    _, lam_min = eigen_extremes_batch(covariance_batch(samples, smoothing_factor))
    return _ratio(ed_batch(samples), lam_min)


def _ratio(numerator: np.ndarray, lam_min: np.ndarray) -> np.ndarray:
    safe = lam_min > 0
    return np.where(safe, numerator / np.where(safe, lam_min, 1.0), np.nan)


def statistic_batch(kind: DetectorKind,
                    samples: np.ndarray,
                    spec: Optional[CovarianceSpec] = None) -> np.ndarray:
    """
    Bereken een statistiek voor een stapel trials.

    Args:
        kind: Detector soort
        samples: Array (trials, K)
        spec: Covariantie parameters (alleen MME/EME)

    Returns:
        Array (trials,); NaN markeert een gedegenereerde covariantie
    """
    kind = DetectorKind(kind)
    spec = spec or CovarianceSpec()
    if kind is DetectorKind.CD:
        return cd_batch(samples)
    if kind is DetectorKind.ED:
        return ed_batch(samples)
    if kind is DetectorKind.MME:
        return mme_batch(samples, spec.smoothing_factor)
    return eme_batch(samples, spec.smoothing_factor)


def cd_statistic(w: Waveform) -> StatisticValue:
    """
    Cyclostationaire teststatistiek T = C1^2 bij alpha = 1/2, lag 0.

    Raises:
        ParameterError: Bij oneven K
    """
    return StatisticValue(DetectorKind.CD, float(cd_batch(w.samples)))


def ed_statistic(w: Waveform) -> StatisticValue:
    """
    Energiedetectie statistiek C0.

    Raises:
        ParameterError: Bij een lege waveform
    """
    return StatisticValue(DetectorKind.ED, float(ed_batch(w.samples)))


def sample_covariance(w: Waveform, spec: CovarianceSpec) -> np.ndarray:
    """
    L x L steekproef covariantie van een waveform.

    Raises:
        ParameterError: Als K < 2L
    """
    return covariance_batch(w.samples, spec.smoothing_factor)


def eigen_extremes(r: np.ndarray) -> Tuple[float, float]:
    """
    Extreme eigenwaarden van een Hermitische matrix.

    De matrix wordt eerst gesymmetriseerd als (R + R^H) / 2.

    Args:
        r: Vierkante matrix

    Returns:
        (lambda_max, lambda_min)

    Raises:
        NumericError: Bij niet-eindige elementen
        ParameterError: Als de matrix niet vierkant is
    """
    r = np.asarray(r)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ParameterError(f"Verwacht een vierkante matrix, kreeg vorm {r.shape}")
    lam_max, lam_min = eigen_extremes_batch(r)
    return float(lam_max), float(lam_min)


def _checked_min(lam_min: float) -> float:
    if not lam_min > 0:
        raise DegenerateCovarianceError(f"Gedegenereerde covariantie: lambda_min = {lam_min}")
    return lam_min


def mme_statistic(w: Waveform, spec: CovarianceSpec) -> StatisticValue:
    """
    Maximum-minimum eigenwaarde statistiek lambda_max / lambda_min.

    Raises:
        DegenerateCovarianceError: Als lambda_min <= 0
    """
    lam_max, lam_min = eigen_extremes(sample_covariance(w, spec))
    return StatisticValue(DetectorKind.MME, lam_max / _checked_min(lam_min))


def eme_statistic(w: Waveform, spec: CovarianceSpec) -> StatisticValue:
    """
    Energie / minimum eigenwaarde statistiek C0 / lambda_min.

    Raises:
        DegenerateCovarianceError: Als lambda_min <= 0
    """
    _, lam_min = eigen_extremes(sample_covariance(w, spec))
    c0 = ed_statistic(w).value
    return StatisticValue(DetectorKind.EME, c0 / _checked_min(lam_min))


def compute_statistic(kind: DetectorKind,
                      w: Waveform,
                      spec: Optional[CovarianceSpec] = None) -> StatisticValue:
    """Dispatch naar de statistiek van de gegeven detector soort."""
    kind = DetectorKind(kind)
    if kind is DetectorKind.CD:
        return cd_statistic(w)
    if kind is DetectorKind.ED:
        return ed_statistic(w)
    spec = spec or CovarianceSpec()
    if kind is DetectorKind.MME:
        return mme_statistic(w, spec)
    return eme_statistic(w, spec)
