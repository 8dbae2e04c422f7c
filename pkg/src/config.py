"""
Experiment configuratie.

Bevat de ExperimentConfig dataclass, de key = value loader en de validatie
tegen config/experiment_schema.json.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Tuple

from jsonschema import Draft7Validator

from .cyclic_stats import TABLE_ORDER, CovarianceSpec, DetectorKind
from .errors import ConfigError
from .signal_model import ModulationConfig, NoiseModel

SCHEMA_PATH = Path(__file__).resolve().parent.parent / "config" / "experiment_schema.json"

DEFAULT_SNR_GRID: Tuple[float, ...] = tuple(float(s) for s in range(-20, 1))


def load_schema() -> Dict[str, Any]:
    """Laad het JSON schema van de configuratie."""
    with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Alle parameters van een Monte Carlo experiment.

    Attributes:
        modulation: Modulatie en pulsvorm
        nominal_variance: Nominale ruisvariantie sigma_w^2
        uncertainties_db: Onzekerheidsniveaus U in dB
        detectors: Te vergelijken detectoren
        target_pf: Doel P_f
        snr_grid_db: SNR punten (oplopend)
        pf_trials: H0 trials per (detector, U)
        pd_trials: H1 trials per (detector, U, SNR)
        calibration_trials: H0 trials voor empirische drempels
        covariance: Covariantie parameters voor MME/EME
        master_seed: Experiment seed
    """
    modulation: ModulationConfig = field(default_factory=ModulationConfig)
    nominal_variance: float = 1.0
    uncertainties_db: Tuple[float, ...] = (0.0, 1.0, 2.0)
    detectors: Tuple[DetectorKind, ...] = tuple(TABLE_ORDER)
    target_pf: float = 0.1
    snr_grid_db: Tuple[float, ...] = DEFAULT_SNR_GRID
    pf_trials: int = 100_000
    pd_trials: int = 10_000
    calibration_trials: int = 100_000
    covariance: CovarianceSpec = field(default_factory=CovarianceSpec)
    master_seed: int = 20140601

    @property
    def num_samples(self) -> int:
        """K, samples per beslissing."""
        return self.modulation.num_samples

    def noise(self, uncertainty_db: float = 0.0) -> NoiseModel:
        """Ruismodel bij onzekerheid U (nominaal bij U = 0)."""
        return NoiseModel(self.nominal_variance, uncertainty_db)

    def validate(self) -> List[str]:
        """
        Valideer onderlinge consistentie van de parameters.

        Returns:
            Lijst van foutmeldingen (leeg als geldig)
        """
        errors = list(self.modulation.validate())
        k = self.num_samples

        if not self.snr_grid_db:
            errors.append("snr_grid_db mag niet leeg zijn")
        elif list(self.snr_grid_db) != sorted(self.snr_grid_db):
            errors.append("snr_grid_db moet oplopend gesorteerd zijn")

        if not 0 < self.target_pf < 1:
            errors.append("target_pf moet in (0, 1) liggen")
        elif self.calibration_trials < math.ceil(10.0 / self.target_pf):
            errors.append(f"calibration_trials moet >= {math.ceil(10.0 / self.target_pf)} zijn voor P_f = {self.target_pf}")

        for name in ("pf_trials", "pd_trials", "calibration_trials"):
            if getattr(self, name) < 100:
                errors.append(f"{name} moet >= 100 zijn")

        if DetectorKind.CD in self.detectors and k % 2:
            errors.append(f"CD detector vereist een even K, K = {k}")

        if {DetectorKind.MME, DetectorKind.EME} & set(self.detectors):
            if k < 2 * self.covariance.smoothing_factor:
                errors.append(f"MME/EME vereisen K >= 2L (K = {k}, L = {self.covariance.smoothing_factor})")

        if len(set(self.detectors)) != len(self.detectors):
            errors.append("detectors bevat dubbele waarden")

        return errors

    def to_dict(self) -> Dict[str, Any]:
        """Platte, JSON-serialiseerbare weergave (zelfde sleutels als het config bestand)."""
        return {
            "scheme": self.modulation.scheme,
            "samples_per_symbol": self.modulation.samples_per_symbol,
            "bt_product": self.modulation.bt_product,
            "pulse_span_symbols": self.modulation.pulse_span_symbols,
            "n_symbols": self.modulation.n_symbols,
            "nominal_variance": self.nominal_variance,
            "uncertainties_db": list(self.uncertainties_db),
            "detectors": [d.value for d in self.detectors],
            "target_pf": self.target_pf,
            "snr_grid_db": list(self.snr_grid_db),
            "pf_trials": self.pf_trials,
            "pd_trials": self.pd_trials,
            "calibration_trials": self.calibration_trials,
            "smoothing_factor": self.covariance.smoothing_factor,
            "master_seed": self.master_seed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], source: str = "<dict>") -> "ExperimentConfig":
        """
        Bouw een config uit een platte dictionary.

        Ontbrekende sleutels krijgen hun standaardwaarde.

        Raises:
            ConfigError: Bij schema of consistentie fouten
        """
        diagnostics = [
            f"veld '{'/'.join(str(p) for p in err.absolute_path) or '<root>'}': {err.message}"
            for err in sorted(Draft7Validator(load_schema()).iter_errors(data), key=lambda e: list(e.absolute_path))
        ]
        if diagnostics:
            raise ConfigError(f"Ongeldige configuratie in {source}", diagnostics)

        defaults = cls()
        modulation = ModulationConfig(
            scheme=data.get("scheme", defaults.modulation.scheme),
            samples_per_symbol=int(data.get("samples_per_symbol", defaults.modulation.samples_per_symbol)),
            bt_product=float(data.get("bt_product", defaults.modulation.bt_product)),
            pulse_span_symbols=int(data.get("pulse_span_symbols", defaults.modulation.pulse_span_symbols)),
            n_symbols=int(data.get("n_symbols", defaults.modulation.n_symbols)),
        )
        config = cls(
            modulation=modulation,
            nominal_variance=float(data.get("nominal_variance", defaults.nominal_variance)),
            uncertainties_db=tuple(float(u) for u in data.get("uncertainties_db", defaults.uncertainties_db)),
            detectors=tuple(DetectorKind(d) for d in data.get("detectors", defaults.detectors)),
            target_pf=float(data.get("target_pf", defaults.target_pf)),
            snr_grid_db=tuple(float(s) for s in data.get("snr_grid_db", defaults.snr_grid_db)),
            pf_trials=int(data.get("pf_trials", defaults.pf_trials)),
            pd_trials=int(data.get("pd_trials", defaults.pd_trials)),
            calibration_trials=int(data.get("calibration_trials", defaults.calibration_trials)),
            covariance=CovarianceSpec(int(data.get("smoothing_factor", defaults.covariance.smoothing_factor))),
            master_seed=int(data.get("master_seed", defaults.master_seed)),
        )

        errors = config.validate()
        if errors:
            raise ConfigError(f"Inconsistente configuratie in {source}", errors)
        return config

    @classmethod
    def from_file(cls, file_path: Path) -> "ExperimentConfig":
        """
        Laad een config van een key = value bestand of uit een manifest.json.

        Args:
            file_path: Pad naar het bestand

        Returns:
            ExperimentConfig object

        Raises:
            FileNotFoundError: Als het bestand niet bestaat
            ConfigError: Als het bestand ongeldig is
        """
        file_path = Path(file_path)
        try:
            text = file_path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise FileNotFoundError(f"Config bestand niet gevonden: {file_path}")

        if file_path.suffix == ".json":
            try:
                data = json.loads(text)
            except json.JSONDecodeError as e:
                raise ConfigError(f"Ongeldig JSON in {file_path}", [str(e)])
            if isinstance(data, dict) and "config" in data:
                data = data["config"]
            return cls.from_dict(data, source=str(file_path))

        return cls.from_dict(parse_config_text(text, source=str(file_path)), source=str(file_path))

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Kopie met platte sleutels vervangen, opnieuw gevalideerd."""
        data = self.to_dict()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return ExperimentConfig.from_dict(data, source="overrides")

    def preset_code(self) -> str:
        """
        Compacte run code.

        Returns:
            String zoals "BPSK-BT0.5-SPS2-K2000-PF0.1"
        """
        parts = [
            self.modulation.scheme,
            f"BT{self.modulation.bt_product:g}",
            f"SPS{self.modulation.samples_per_symbol}",
            f"K{self.num_samples}",
            f"PF{self.target_pf:g}",
        ]
        if {DetectorKind.MME, DetectorKind.EME} & set(self.detectors):
            parts.append(f"L{self.covariance.smoothing_factor}")
        return "-".join(parts)


def _coerce(raw: str, prop: Dict[str, Any], key: str) -> Any:
    """Zet een tekstwaarde om naar het type uit het schema."""
    kind = prop.get("type")
    if kind == "array":
        if key == "snr_grid_db" and ":" in raw:
            return _parse_range(raw)
        items = [item.strip() for item in raw.split(",") if item.strip()]
        return [_coerce(item, prop.get("items", {}), key) for item in items]
    if kind == "integer":
        return int(raw)
    if kind == "number":
        return float(raw)
    if key in ("detectors", "scheme"):
        return raw.upper()
    return raw


def _parse_range(raw: str) -> List[float]:
    """'start:stop:step' inclusief stop."""
    parts = [p.strip() for p in raw.split(":")]
    if len(parts) != 3:
        raise ValueError("bereik moet de vorm start:stop:step hebben")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValueError("bereik vereist step > 0 en stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def parse_config_text(text: str, source: str = "<text>") -> Dict[str, Any]:
    """
    Parse een key = value configuratie.

    Commentaar begint met '#'; lege regels worden overgeslagen. Onbekende of
    dubbele sleutels en regels zonder '=' zijn fouten.

    Args:
        text: Inhoud van het bestand
        source: Naam voor de foutmeldingen

    Returns:
        Platte dictionary met getypeerde waarden

    Raises:
        ConfigError: Met een melding per foute regel
    """
    properties = load_schema()["properties"]
    data: Dict[str, Any] = {}
    seen: Dict[str, int] = {}
    diagnostics = []

    for lineno, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            diagnostics.append(f"regel {lineno}: verwacht 'key = value', kreeg '{content}'")
            continue

        key, raw = (part.strip() for part in content.split("=", 1))
        if key not in properties:
            diagnostics.append(f"regel {lineno}: onbekende sleutel '{key}'")
            continue
        if key in seen:
            diagnostics.append(f"regel {lineno}: sleutel '{key}' al gezet op regel {seen[key]}")
            continue
        seen[key] = lineno

        try:
            data[key] = _coerce(raw, properties[key], key)
        except ValueError as e:
            diagnostics.append(f"regel {lineno}: ongeldige waarde voor '{key}': {raw!r} ({e})")

    if diagnostics:
        raise ConfigError(f"Ongeldige configuratie in {source}", diagnostics)
    return data


def default_config() -> ExperimentConfig:
    """De standaardinstellingen van het experiment."""
    return ExperimentConfig()
