"""
CFAR drempels en de beslisregel.

Analytische drempels voor CD (chi-kwadraat met 1 vrijheidsgraad) en ED
(exacte chi-kwadraat met 2K vrijheidsgraden), empirische Monte Carlo
kalibratie voor MME/EME, en de beslisregel T >= lambda.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from scipy import special

from .cyclic_stats import CovarianceSpec, DetectorKind, StatisticValue, compute_statistic
from .errors import DegenerateCovarianceError, ParameterError
from .signal_model import Hypothesis, SeedLike, Waveform, derive_seed

logger = logging.getLogger(__name__)

Provenance = Literal["analytic", "empirical"]

# Stroom tag voor kalibratie seeds, los van de H0/H1 trial stromen
CALIBRATION_STREAM = 2


@dataclass(frozen=True)
class Threshold:
    """
    Gekalibreerde drempel.

    Attributes:
        kind: Detector soort
        target_pf: Doel P_f in (0, 1)
        value: Drempelwaarde lambda >= 0
        provenance: "analytic" of "empirical"
        trials: Aantal H0 trials (alleen empirisch)
        seed: Kalibratie seed (alleen empirisch)
    """
    kind: DetectorKind
    target_pf: float
    value: float
    provenance: Provenance = "analytic"
    trials: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.target_pf < 1:
            raise ParameterError(f"target_pf {self.target_pf} moet in (0, 1) liggen")
        if not self.value >= 0:
            raise ParameterError(f"Drempel {self.value} moet >= 0 zijn")

    def describe(self) -> str:
        """Leesbare herkomst, bijvoorbeeld 'empirical (100000 trials, seed 7)'."""
        if self.provenance == "empirical":
            return f"empirical ({self.trials} trials, seed {self.seed})"
        return "analytic"


@dataclass(frozen=True)
class CdNullModel:
    """
    Nulverdeling van de CD statistiek: T / mu0 is chi-kwadraat(1).

    Attributes:
        mu0: sigma_w^4 / K
        sigma0_sq: 2 sigma_w^8 / K^2
        dof: 1
    """
    mu0: float
    sigma0_sq: float
    dof: int = 1

    @classmethod
    def for_noise(cls, sigma_w2: float, k: int) -> "CdNullModel":
        mu0 = sigma_w2 ** 2 / k
        return cls(mu0=mu0, sigma0_sq=2.0 * mu0 * mu0)


@dataclass(frozen=True)
class Decision:
    """
    Uitkomst van de beslisregel.

    Attributes:
        hypothesis: H1 als statistic.value >= threshold.value
        statistic: Berekende statistiek (NaN bij een gedegenereerde covariantie)
        threshold: Gebruikte drempel
        degenerate: True als de statistiek niet berekend kon worden; telt als H0
    """
    hypothesis: Hypothesis
    statistic: StatisticValue
    threshold: Threshold
    degenerate: bool = False


def chi2_inv_sf(p: float, dof: int) -> float:
    """
    Inverse survival functie van de centrale chi-kwadraat verdeling.

    Inverteert de geregulariseerde bovenste onvolledige gamma functie:
    P(chi2_dof > x) = Q(dof/2, x/2) = p.

    Args:
        p: Overschrijdingskans in (0, 1]
        dof: Aantal vrijheidsgraden >= 1

    Returns:
        x >= 0

    Raises:
        ParameterError: Bij p buiten (0, 1] of dof < 1
    """
    if not 0 < p <= 1:
        raise ParameterError(f"p = {p} moet in (0, 1] liggen")
    if dof < 1:
        raise ParameterError(f"dof = {dof} moet >= 1 zijn")
    if p == 1:
        return 0.0
    return float(2.0 * special.gammainccinv(dof / 2.0, p))


def _check_pf(pf: float) -> None:
    if not 0 < pf < 1:
        raise ParameterError(f"P_f = {pf} moet in (0, 1) liggen")


def cd_threshold(pf: float, sigma_w2: float, k: int) -> Threshold:
    """
    Analytische CD drempel lambda = (sigma_w^4 / K) * chi2_inv_sf(pf, 1).

    Raises:
        ParameterError: Bij oneven K, pf buiten (0, 1) of sigma_w2 <= 0
    """
    _check_pf(pf)
    if not sigma_w2 > 0:
        raise ParameterError("sigma_w2 moet > 0 zijn")
    if k < 2 or k % 2:
        raise ParameterError(f"CD drempel vereist een even K, kreeg K = {k}")
    null = CdNullModel.for_noise(sigma_w2, k)
    return Threshold(DetectorKind.CD, pf, null.mu0 * chi2_inv_sf(pf, null.dof))


def ed_threshold(pf: float, sigma_w2: float, k: int) -> Threshold:
    """
    Analytische ED drempel uit de exacte nul C0 ~ (sigma_w^2 / 2K) chi2(2K).
    """
    _check_pf(pf)
    if not sigma_w2 > 0:
        raise ParameterError("sigma_w2 moet > 0 zijn")
    if k < 1:
        raise ParameterError("K moet >= 1 zijn")
    return Threshold(DetectorKind.ED, pf, sigma_w2 / (2.0 * k) * chi2_inv_sf(pf, 2 * k))


def minimum_calibration_trials(pf: float) -> int:
    """Kleinste aantal trials waarmee het (1 - pf) kwantiel nog oplosbaar is."""
    return int(np.ceil(10.0 / pf))


def threshold_from_samples(kind: DetectorKind,
                           pf: float,
                           values: np.ndarray,
                           seed: Optional[int] = None) -> Threshold:
    """
    Empirische drempel: het (1 - pf) kwantiel van H0 statistieken.

    Gebruikt de order statistiek met "higher" interpolatie (conservatieve P_f).
    Gedegenereerde trials (NaN) tellen als H0, net als in de beslissing.

    Args:
        kind: Detector soort
        pf: Doel P_f
        values: Statistieken van de H0 trials
        seed: Kalibratie seed voor de herkomst

    Returns:
        Empirische Threshold

    Raises:
        ParameterError: Bij te weinig trials
    """
    _check_pf(pf)
    values = np.asarray(values, dtype=float)
    trials = values.size
    if trials < minimum_calibration_trials(pf):
        raise ParameterError(
            f"Te weinig trials ({trials}) voor P_f = {pf}; minimaal {minimum_calibration_trials(pf)}"
        )
    clean = np.where(np.isnan(values), -np.inf, values)
    value = float(np.quantile(clean, 1.0 - pf, method="higher"))
    return Threshold(DetectorKind(kind), pf, value, provenance="empirical", trials=trials, seed=seed)


H0Sampler = Callable[[SeedLike], Waveform]


def empirical_threshold(kind: DetectorKind,
                        pf: float,
                        h0_sampler: H0Sampler,
                        trials: int,
                        seed: int,
                        covariance: Optional[CovarianceSpec] = None,
                        workers: int = 1) -> Threshold:
    """
    Kalibreer een drempel met Monte Carlo trials onder H0.

    Trial i krijgt seed derive_seed(seed, CALIBRATION_STREAM, i), zodat het
    resultaat niet afhangt van het aantal workers.

    Args:
        kind: Detector soort
        pf: Doel P_f
        h0_sampler: Functie seed -> H0 Waveform bij nominale ruis
        trials: Aantal trials (>= 10 / pf)
        seed: Kalibratie seed
        covariance: Covariantie parameters voor MME/EME
        workers: Aantal threads

    Returns:
        Empirische Threshold
    """
    _check_pf(pf)
    if trials < minimum_calibration_trials(pf):
        raise ParameterError(
            f"Te weinig trials ({trials}) voor P_f = {pf}; minimaal {minimum_calibration_trials(pf)}"
        )

    def one(i: int) -> float:
        waveform = h0_sampler(derive_seed(seed, CALIBRATION_STREAM, i))
        try:
            return compute_statistic(kind, waveform, covariance).value
        except DegenerateCovarianceError:
            return float("nan")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one, range(trials)))
    else:
        values = [one(i) for i in range(trials)]

    threshold = threshold_from_samples(kind, pf, np.array(values), seed=seed)
    logger.info("Empirische %s drempel: %.6g (%d trials)", kind, threshold.value, trials)
    return threshold


def decide(s: StatisticValue, t: Threshold) -> Decision:
    """
    H1 als T >= lambda, anders H0.

    Raises:
        ParameterError: Als de soorten van statistiek en drempel verschillen
    """
    if DetectorKind(s.kind) is not DetectorKind(t.kind):
        raise ParameterError(f"Statistiek {s.kind} past niet bij drempel {t.kind}")
    hypothesis = Hypothesis.H1 if s.value >= t.value else Hypothesis.H0
    return Decision(hypothesis=hypothesis, statistic=s, threshold=t)


def decide_batch(values: Sequence[float], t: Threshold) -> np.ndarray:
    """Vectoriële beslissing: True waar H1; NaN (gedegenereerd) telt als H0."""
    values = np.asarray(values, dtype=float)
    return np.nan_to_num(values, nan=-np.inf) >= t.value
