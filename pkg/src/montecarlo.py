"""
Monte Carlo harness voor het CFAR experiment.

Drempels worden eenmaal bij nominale ruis gekalibreerd en daarna voor alle
onzekerheidsniveaus hergebruikt. P_f en P_d worden per cel geschat uit
onafhankelijke trials; elke trial heeft een eigen seed afgeleid van
(master_seed, stroom, U, SNR, trial index), dus het resultaat hangt niet af
van het aantal workers of de volgorde van verwerking.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats
from tqdm import tqdm

from .config import ExperimentConfig
from .cyclic_stats import TABLE_ORDER, CovarianceSpec, DetectorKind, StatisticValue, statistic_batch
from .detectors import (
    CALIBRATION_STREAM,
    Decision,
    Threshold,
    cd_threshold,
    decide,
    decide_batch,
    ed_threshold,
    threshold_from_samples,
)
from .signal_model import Hypothesis, ModulationConfig, NoiseModel, derive_seed, realize_trial

logger = logging.getLogger(__name__)

H0_STREAM = 0
H1_STREAM = 1

# Vaste blokgrootte; onafhankelijk van het aantal workers
CHUNK_TRIALS = 250

# Offset zodat negatieve SNR's een niet-negatieve seed sleutel krijgen
SNR_KEY_OFFSET = 1_000_000

TABLE1_SNRS_DB: Tuple[float, ...] = (-12.0, -10.0, -8.0)
TABLE1_UNCERTAINTIES_DB: Tuple[float, ...] = (0.0, 1.0, 2.0)

# Gepubliceerde waarden: (P_f, P_d @ -12, -10, -8 dB)
PUBLISHED_TABLE1: Dict[Tuple[str, int], Tuple[float, float, float, float]] = {
    ("ED", 0): (0.1015, 0.9288, 0.9984, 1.0000),
    ("ED", 1): (0.4450, 0.5704, 0.6508, 0.7861),
    ("ED", 2): (0.4663, 0.5425, 0.5739, 0.6429),
    ("CD", 0): (0.0999, 0.7931, 0.9834, 1.0000),
    ("CD", 1): (0.1068, 0.7904, 0.9823, 0.9999),
    ("CD", 2): (0.1202, 0.7960, 0.9785, 0.9998),
    ("MME", 0): (0.0954, 0.2440, 0.4639, 0.8441),
    ("MME", 1): (0.0996, 0.2473, 0.4827, 0.8348),
    ("MME", 2): (0.0981, 0.2567, 0.4979, 0.8039),
    ("EME", 0): (0.0932, 0.1482, 0.2510, 0.4834),
    ("EME", 1): (0.0952, 0.1490, 0.2578, 0.5016),
    ("EME", 2): (0.0957, 0.1644, 0.2760, 0.5178),
}

CSV_COLUMNS = [
    "detector", "uncertainty_db", "snr_db", "pf", "pd", "pm",
    "trials", "wilson_halfwidth", "degenerate_trials",
]


@dataclass(frozen=True)
class ResultRow:
    """
    Een geschatte kans in de resultaattabel.

    P_f rijen hebben snr_db, p_d en p_m gelijk aan None. P_d rijen dragen de
    P_f schatting van dezelfde (detector, U) cel.

    Attributes:
        detector: Detector soort
        uncertainty_db: Onzekerheid U in dB
        snr_db: SNR van een P_d rij
        p_f: Geschatte kans op vals alarm
        p_d: Geschatte detectiekans
        p_m: 1 - p_d
        trials: Aantal trials
        wilson_halfwidth: Halve breedte van het 95% Wilson interval
        degenerate_trials: Trials met gedegenereerde covariantie (als H0 geteld)
    """
    detector: DetectorKind
    uncertainty_db: float
    snr_db: Optional[float]
    p_f: float
    p_d: Optional[float]
    p_m: Optional[float]
    trials: int
    wilson_halfwidth: float
    degenerate_trials: int = 0

    @property
    def is_pf(self) -> bool:
        return self.snr_db is None

    def to_record(self) -> Dict[str, object]:
        """Rij met de CSV kolomnamen."""
        return {
            "detector": DetectorKind(self.detector).value,
            "uncertainty_db": self.uncertainty_db,
            "snr_db": self.snr_db,
            "pf": self.p_f,
            "pd": self.p_d,
            "pm": self.p_m,
            "trials": self.trials,
            "wilson_halfwidth": self.wilson_halfwidth,
            "degenerate_trials": self.degenerate_trials,
        }


def wilson_halfwidth(successes: int, trials: int, confidence: float = 0.95) -> float:
    """
    Halve breedte van het Wilson score interval.

    Args:
        successes: Aantal H1 beslissingen
        trials: Aantal trials
        confidence: Betrouwbaarheidsniveau

    Returns:
        Halve breedte
    """
    if trials <= 0:
        return float("nan")
    z = stats.norm.ppf(0.5 + confidence / 2.0)
    p = successes / trials
    denom = 1.0 + z * z / trials
    return float(z / denom * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)))


def rows_to_frame(rows: Iterable[ResultRow]) -> pd.DataFrame:
    """Zet resultaatrijen om naar een DataFrame met de CSV kolommen."""
    return pd.DataFrame([row.to_record() for row in rows], columns=CSV_COLUMNS)


def _u_key(uncertainty_db: float) -> int:
    return int(round(uncertainty_db * 1000))


def _snr_key(snr_db: float) -> int:
    return int(round(snr_db * 1000)) + SNR_KEY_OFFSET


def trial_key(hypothesis: Hypothesis, uncertainty_db: float, snr_db: Optional[float]) -> Tuple[int, ...]:
    """
    Seed sleutel van een cel; de trial index wordt er achter geplakt.

    H0 cellen negeren de SNR.
    """
    if Hypothesis(hypothesis) is Hypothesis.H0:
        return (H0_STREAM, _u_key(uncertainty_db), 0)
    return (H1_STREAM, _u_key(uncertainty_db), _snr_key(snr_db))


@dataclass(frozen=True)
class _ChunkTask:
    """Een blok trials binnen een cel; picklable voor de process pool."""
    modulation: ModulationConfig
    noise: NoiseModel
    snr_db: float
    hypothesis: Hypothesis
    master_seed: int
    key: Tuple[int, ...]
    start: int
    stop: int
    detectors: Tuple[DetectorKind, ...]
    covariance: CovarianceSpec


def _chunk_statistics(task: _ChunkTask) -> Dict[DetectorKind, np.ndarray]:
    samples = np.stack([
        realize_trial(task.modulation, task.noise, task.snr_db, task.hypothesis,
                      derive_seed(task.master_seed, *task.key, i)).samples
        for i in range(task.start, task.stop)
    ])
    return {kind: statistic_batch(kind, samples, task.covariance) for kind in task.detectors}


class SensingExperiment:
    """
    Monte Carlo experiment over detectoren, onzekerheden en SNR's.
    """

    def __init__(self, config: ExperimentConfig, workers: int = 1, progress: bool = False):
        """
        Initialiseer het experiment.

        Args:
            config: Experiment configuratie
            workers: Aantal processen (1 = in dit proces)
            progress: Toon tqdm voortgangsbalken
        """
        self.config = config
        self.workers = max(1, int(workers))
        self.progress = progress
        self._thresholds: Dict[DetectorKind, Threshold] = {}
        self._pf_estimates: Dict[Tuple[DetectorKind, float], float] = {}
        self._pool: Optional[ProcessPoolExecutor] = None

    def __enter__(self) -> "SensingExperiment":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def close(self) -> None:
        """Sluit de process pool (als die gestart is)."""
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    # -- statistieken per cel ------------------------------------------------

    def _tasks(self, hypothesis: Hypothesis, key: Tuple[int, ...], noise: NoiseModel,
               snr_db: float, trials: int, detectors: Sequence[DetectorKind]) -> List[_ChunkTask]:
        cfg = self.config
        return [
            _ChunkTask(cfg.modulation, noise, snr_db, hypothesis, cfg.master_seed, key,
                       start, min(start + CHUNK_TRIALS, trials), tuple(detectors), cfg.covariance)
            for start in range(0, trials, CHUNK_TRIALS)
        ]

    def _run_tasks(self, tasks: List[_ChunkTask], label: str) -> Dict[DetectorKind, np.ndarray]:
        if self.workers > 1 and len(tasks) > 1:
            if self._pool is None:
                self._pool = ProcessPoolExecutor(max_workers=self.workers)
            results = list(tqdm(self._pool.map(_chunk_statistics, tasks), total=len(tasks),
                                desc=label, disable=not self.progress, leave=False))
        else:
            results = [_chunk_statistics(t) for t in tqdm(tasks, desc=label, disable=not self.progress, leave=False)]
        return {kind: np.concatenate([r[kind] for r in results]) for kind in tasks[0].detectors}

    def cell_statistics(self, hypothesis: Hypothesis, uncertainty_db: float, snr_db: Optional[float],
                        trials: int, detectors: Sequence[DetectorKind]) -> Dict[DetectorKind, np.ndarray]:
        """
        Statistieken van alle trials in een cel, in trial volgorde.

        Args:
            hypothesis: H0 of H1
            uncertainty_db: Onzekerheid U
            snr_db: SNR (alleen H1)
            trials: Aantal trials
            detectors: Te berekenen statistieken

        Returns:
            Dictionary detector -> array (trials,), NaN bij een gedegenereerde covariantie
        """
        hypothesis = Hypothesis(hypothesis)
        key = trial_key(hypothesis, uncertainty_db, snr_db)
        snr = 0.0 if snr_db is None else float(snr_db)
        tasks = self._tasks(hypothesis, key, self.config.noise(uncertainty_db), snr, trials, detectors)
        label = f"{hypothesis.value} U={uncertainty_db:g} dB" + ("" if snr_db is None else f" SNR={snr_db:g} dB")
        return self._run_tasks(tasks, label)

    # -- kalibratie ----------------------------------------------------------

    def calibrate(self, detectors: Optional[Sequence[DetectorKind]] = None) -> Dict[DetectorKind, Threshold]:
        """
        Kalibreer drempels bij nominale ruis.

        CD en ED krijgen analytische drempels; MME en EME empirische, uit
        calibration_trials H0 trials met seeds (master_seed, CALIBRATION_STREAM, i).

        Returns:
            Dictionary detector -> Threshold
        """
        cfg = self.config
        wanted = [DetectorKind(d) for d in (detectors or cfg.detectors)]
        missing = [d for d in wanted if d not in self._thresholds]
        k = cfg.num_samples

        empirical = []
        for kind in missing:
            if kind is DetectorKind.CD:
                self._thresholds[kind] = cd_threshold(cfg.target_pf, cfg.nominal_variance, k)
            elif kind is DetectorKind.ED:
                self._thresholds[kind] = ed_threshold(cfg.target_pf, cfg.nominal_variance, k)
            else:
                empirical.append(kind)

        if empirical:
            tasks = self._tasks(Hypothesis.H0, (CALIBRATION_STREAM,), cfg.noise(0.0), 0.0,
                                cfg.calibration_trials, empirical)
            values = self._run_tasks(tasks, "kalibratie")
            for kind in empirical:
                self._thresholds[kind] = threshold_from_samples(kind, cfg.target_pf, values[kind], seed=cfg.master_seed)

        for kind in missing:
            t = self._thresholds[kind]
            logger.info("Drempel %s: %.6g (%s)", kind.value, t.value, t.describe())
        return {kind: self._thresholds[kind] for kind in wanted}

    def threshold(self, detector: DetectorKind) -> Threshold:
        return self.calibrate([detector])[DetectorKind(detector)]

    # -- operaties -----------------------------------------------------------

    def run_trial(self, detector: DetectorKind, threshold: Threshold, hypothesis: Hypothesis,
                  snr_db: Optional[float], trial_index: int, uncertainty_db: float = 0.0) -> Decision:
        """
        Realiseer, bereken en beslis voor een trial.

        Een gedegenereerde covariantie geeft een H0 beslissing met degenerate=True.
        """
        detector = DetectorKind(detector)
        hypothesis = Hypothesis(hypothesis)
        key = trial_key(hypothesis, uncertainty_db, snr_db)
        snr = 0.0 if snr_db is None else float(snr_db)
        task = _ChunkTask(self.config.modulation, self.config.noise(uncertainty_db), snr, hypothesis,
                          self.config.master_seed, key, trial_index, trial_index + 1,
                          (detector,), self.config.covariance)
        value = float(_chunk_statistics(task)[detector][0])
        statistic = StatisticValue(detector, value)
        if math.isnan(value):
            return Decision(Hypothesis.H0, statistic, threshold, degenerate=True)
        return decide(statistic, threshold)

    def _row(self, detector: DetectorKind, uncertainty_db: float, snr_db: Optional[float],
             values: np.ndarray) -> ResultRow:
        threshold = self._thresholds[detector]
        hits = int(np.count_nonzero(decide_batch(values, threshold)))
        degenerate = int(np.count_nonzero(np.isnan(values)))
        trials = int(values.size)
        p = hits / trials
        if degenerate:
            logger.warning("%s U=%g dB: %d gedegenereerde trials", detector.value, uncertainty_db, degenerate)
        if snr_db is None:
            self._pf_estimates[(detector, float(uncertainty_db))] = p
            return ResultRow(detector, uncertainty_db, None, p, None, None, trials,
                             wilson_halfwidth(hits, trials), degenerate)
        return ResultRow(detector, uncertainty_db, float(snr_db), self._pf_estimate(detector, uncertainty_db),
                         p, 1.0 - p, trials, wilson_halfwidth(hits, trials), degenerate)

    def _pf_estimate(self, detector: DetectorKind, uncertainty_db: float) -> float:
        """P_f van de (detector, U) cel; wordt eenmalig geschat."""
        key = (detector, float(uncertainty_db))
        if key not in self._pf_estimates:
            self.estimate_pfa(detector, uncertainty_db)
        return self._pf_estimates[key]

    def estimate_pfa(self, detector: DetectorKind, uncertainty_db: float) -> ResultRow:
        """Fractie H1 beslissingen over pf_trials H0 trials bij onzekerheid U."""
        detector = DetectorKind(detector)
        self.calibrate([detector])
        values = self.cell_statistics(Hypothesis.H0, uncertainty_db, None, self.config.pf_trials, [detector])
        return self._row(detector, uncertainty_db, None, values[detector])

    def estimate_pd(self, detector: DetectorKind, uncertainty_db: float, snr_db: float) -> ResultRow:
        """
        Fractie H1 beslissingen over pd_trials H1 trials bij onzekerheid U en SNR.

        De rij krijgt ook de P_f van dezelfde (detector, U) cel; die wordt
        geschat als dit experiment hem nog niet heeft.
        """
        detector = DetectorKind(detector)
        self.calibrate([detector])
        values = self.cell_statistics(Hypothesis.H1, uncertainty_db, snr_db, self.config.pd_trials, [detector])
        return self._row(detector, uncertainty_db, snr_db, values[detector])

    def sweep(self) -> List[ResultRow]:
        """
        Volledig kruisproduct detector x U x SNR plus een P_f rij per (detector, U).

        Alle detectoren delen dezelfde trials van een cel; dat geeft dezelfde
        rijen als losse estimate_pfa / estimate_pd aanroepen.

        Returns:
            Rijen gesorteerd op (detector volgorde in de config, U, SNR), P_f rij eerst
        """
        cfg = self.config
        detectors = list(cfg.detectors)
        self.calibrate(detectors)
        rows = []

        for u in cfg.uncertainties_db:
            h0 = self.cell_statistics(Hypothesis.H0, u, None, cfg.pf_trials, detectors)
            rows.extend(self._row(d, u, None, h0[d]) for d in detectors)
            for snr in cfg.snr_grid_db:
                h1 = self.cell_statistics(Hypothesis.H1, u, snr, cfg.pd_trials, detectors)
                rows.extend(self._row(d, u, snr, h1[d]) for d in detectors)
            logger.info("U = %g dB klaar", u)

        order = {d: i for i, d in enumerate(detectors)}
        rows.sort(key=lambda r: (order[r.detector], r.uncertainty_db,
                                 -math.inf if r.snr_db is None else r.snr_db))
        return rows

    def reproduce_table1(self) -> List[ResultRow]:
        """
        De cellen van de benchmarktabel: ED/CD/MME/EME x 0/1/2 dB, P_f en P_d bij -12/-10/-8 dB.

        Trials, seed en modulatie komen uit de config; rooster en detectoren liggen vast.
        """
        table_cfg = replace(
            self.config,
            detectors=tuple(TABLE_ORDER),
            uncertainties_db=TABLE1_UNCERTAINTIES_DB,
            snr_grid_db=TABLE1_SNRS_DB,
        )
        original = self.config
        self.config = table_cfg
        try:
            return self.sweep()
        finally:
            self.config = original

    def statistic_cost(self, repeats: int = 200, snr_db: float = 0.0) -> Dict[DetectorKind, float]:
        """
        Gemiddelde rekentijd van de teststatistiek per beslissing, per detector.

        Alleen statistic_batch wordt gemeten; de drempelvergelijking niet.

        Args:
            repeats: Aantal herhalingen
            snr_db: SNR van de gebruikte H1 waveform

        Returns:
            Dictionary detector -> seconden per beslissing
        """
        cfg = self.config
        waveform = realize_trial(cfg.modulation, cfg.noise(0.0), snr_db, Hypothesis.H1,
                                 derive_seed(cfg.master_seed, H1_STREAM, 0, 0, 0))
        samples = waveform.samples
        costs = {}
        for kind in cfg.detectors:
            start = time.perf_counter()
            for _ in range(repeats):
                statistic_batch(kind, samples, cfg.covariance)
            costs[kind] = (time.perf_counter() - start) / repeats
        return costs


# -- functionele interface ---------------------------------------------------

def run_trial(cfg: ExperimentConfig, detector: DetectorKind, threshold: Threshold,
              hypothesis: Hypothesis, snr_db: Optional[float], trial_index: int,
              uncertainty_db: float = 0.0) -> Decision:
    """Een enkele trial; deterministisch gegeven (master_seed, cel, trial_index)."""
    with SensingExperiment(cfg) as experiment:
        return experiment.run_trial(detector, threshold, hypothesis, snr_db, trial_index, uncertainty_db)


def estimate_pfa(cfg: ExperimentConfig, detector: DetectorKind, uncertainty_db: float,
                 workers: int = 1) -> ResultRow:
    with SensingExperiment(cfg, workers) as experiment:
        return experiment.estimate_pfa(detector, uncertainty_db)


def estimate_pd(cfg: ExperimentConfig, detector: DetectorKind, uncertainty_db: float, snr_db: float,
                workers: int = 1) -> ResultRow:
    with SensingExperiment(cfg, workers) as experiment:
        return experiment.estimate_pd(detector, uncertainty_db, snr_db)


def sweep(cfg: ExperimentConfig, workers: int = 1, progress: bool = False) -> List[ResultRow]:
    with SensingExperiment(cfg, workers, progress) as experiment:
        return experiment.sweep()


def reproduce_table1(cfg: ExperimentConfig, workers: int = 1, progress: bool = False) -> List[ResultRow]:
    with SensingExperiment(cfg, workers, progress) as experiment:
        return experiment.reproduce_table1()


def table1_frame(rows: Iterable[ResultRow]) -> pd.DataFrame:
    """
    Draai benchmark rijen tot een 12 x 4 tabel met halve breedtes.

    Returns:
        DataFrame met index "ED – 0 dB", ... en kolommen pf, pd_-12, pd_-10, pd_-8
        plus bijbehorende *_hw kolommen
    """
    records: Dict[str, Dict[str, float]] = {}
    for row in rows:
        label = f"{DetectorKind(row.detector).value} – {row.uncertainty_db:g} dB"
        entry = records.setdefault(label, {})
        if row.is_pf:
            entry["pf"] = row.p_f
            entry["pf_hw"] = row.wilson_halfwidth
        elif row.snr_db in TABLE1_SNRS_DB:
            entry[f"pd_{row.snr_db:g}"] = row.p_d
            entry[f"pd_{row.snr_db:g}_hw"] = row.wilson_halfwidth

    columns = ["pf"] + [f"pd_{s:g}" for s in TABLE1_SNRS_DB]
    columns += [f"{c}_hw" for c in columns]
    labels = [f"{d.value} – {u:g} dB" for d in TABLE_ORDER for u in TABLE1_UNCERTAINTIES_DB]
    frame = pd.DataFrame.from_dict(records, orient="index").reindex(index=labels, columns=columns)
    frame.index.name = "scheme"
    return frame


def published_table1_frame() -> pd.DataFrame:
    """De gepubliceerde referentiewaarden als DataFrame (zelfde index als table1_frame)."""
    columns = ["pf"] + [f"pd_{s:g}" for s in TABLE1_SNRS_DB]
    frame = pd.DataFrame.from_dict(
        {f"{d} – {u} dB": values for (d, u), values in PUBLISHED_TABLE1.items()},
        orient="index", columns=columns,
    )
    labels = [f"{d.value} – {u:g} dB" for d in TABLE_ORDER for u in TABLE1_UNCERTAINTIES_DB]
    frame = frame.reindex(labels)
    frame.index.name = "scheme"
    return frame


def snr_at_pd(rows: Iterable[ResultRow], detector: DetectorKind, uncertainty_db: float,
              target_pd: float = 0.9) -> Optional[float]:
    """
    SNR waarbij de P_d curve voor het eerst target_pd bereikt.

    Lineaire interpolatie tussen de twee omliggende roosterpunten. Als het
    eerste punt al voldoet wordt dat punt teruggegeven.

    Returns:
        SNR in dB, of None als de curve target_pd niet bereikt
    """
    curve = sorted(
        (r.snr_db, r.p_d) for r in rows
        if not r.is_pf and DetectorKind(r.detector) is DetectorKind(detector) and r.uncertainty_db == uncertainty_db
    )
    for i, (snr, pd_value) in enumerate(curve):
        if pd_value >= target_pd:
            if i == 0:
                return snr
            snr0, pd0 = curve[i - 1]
            return snr0 + (target_pd - pd0) * (snr - snr0) / (pd_value - pd0)
    return None


def required_snr_frame(rows: Sequence[ResultRow], target_pd: float = 0.9) -> pd.DataFrame:
    """snr_at_pd voor elke (detector, U) in de rijen."""
    cells = sorted({(DetectorKind(r.detector), r.uncertainty_db) for r in rows},
                   key=lambda c: (TABLE_ORDER.index(c[0]), c[1]))
    return pd.DataFrame(
        [{"detector": d.value, "uncertainty_db": u, "target_pd": target_pd,
          "snr_db": snr_at_pd(rows, d, u, target_pd)} for d, u in cells],
        columns=["detector", "uncertainty_db", "target_pd", "snr_db"],
    )


def plot_frame(rows: Iterable[ResultRow], uncertainty_db: float) -> pd.DataFrame:
    """
    P_d curves bij een onzekerheid, een kolom per detector (plot-klaar).
    """
    records = [r.to_record() for r in rows if not r.is_pf and r.uncertainty_db == uncertainty_db]
    if not records:
        return pd.DataFrame(columns=["snr_db"])
    frame = pd.DataFrame(records).pivot(index="snr_db", columns="detector", values="pd")
    frame.columns.name = None
    return frame.reset_index()
