"""
Run manifest voor sensing experimenten.

Een manifest wordt naast elke output geschreven en bevat alles wat nodig is
om de run bit-exact te herhalen: de volledige config, de seed, de gebruikte
drempels en de versie van de bibliotheek.
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

from . import __version__
from .config import ExperimentConfig
from .cyclic_stats import DetectorKind
from .detectors import Threshold

logger = logging.getLogger(__name__)

MANIFEST_FILENAME = "manifest.json"
GENERATOR_NAME = "Sensing Benchmark"

REQUIRED_KEYS = ("config", "version", "preset_code", "master_seed", "thresholds")


@dataclass
class RunManifest:
    """
    Herkomst van een run.

    Attributes:
        config: Platte config snapshot (ExperimentConfig.to_dict())
        version: Versie van de bibliotheek
        preset_code: Compacte run code
        master_seed: Experiment seed
        duration_s: Wandkloktijd van de run in seconden
        thresholds: Detector -> drempel gegevens
        command: Subcommando dat de run maakte
        timestamp: ISO tijdstip van schrijven
    """
    config: Dict[str, Any]
    version: str = __version__
    preset_code: str = ""
    master_seed: int = 0
    duration_s: float = 0.0
    thresholds: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    command: str = ""
    timestamp: str = ""

    @classmethod
    def build(cls,
              config: ExperimentConfig,
              thresholds: Mapping[DetectorKind, Threshold],
              duration_s: float,
              command: str = "") -> "RunManifest":
        """
        Maak een manifest voor een afgeronde run.

        Args:
            config: Gebruikte configuratie
            thresholds: Gebruikte drempels per detector
            duration_s: Looptijd in seconden
            command: Naam van het subcommando

        Returns:
            RunManifest object
        """
        return cls(
            config=config.to_dict(),
            preset_code=config.preset_code(),
            master_seed=config.master_seed,
            duration_s=round(float(duration_s), 3),
            thresholds={
                DetectorKind(kind).value: {
                    "value": t.value,
                    "provenance": t.provenance,
                    "target_pf": t.target_pf,
                    "trials": t.trials,
                    "seed": t.seed,
                }
                for kind, t in thresholds.items()
            },
            command=command,
            timestamp=datetime.now().isoformat(timespec="seconds"),
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        """
        Bouw een manifest uit een dictionary.

        Raises:
            ValueError: Als verplichte velden ontbreken
        """
        ok, errors = validate_manifest(data)
        if not ok:
            raise ValueError("Ongeldig manifest: " + "; ".join(errors))
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        return cls(**known)

    def experiment_config(self) -> ExperimentConfig:
        """De config snapshot als ExperimentConfig (opnieuw gevalideerd)."""
        return ExperimentConfig.from_dict(self.config, source="manifest")

    def write(self, out_dir: Path) -> Path:
        """
        Schrijf manifest.json in een output map.

        Returns:
            Pad van het geschreven bestand
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / MANIFEST_FILENAME
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        logger.info("Manifest geschreven: %s", path)
        return path


def validate_manifest(data: Any) -> Tuple[bool, List[str]]:
    """
    Controleer de structuur van een manifest dictionary.

    Returns:
        Tuple van (is_valid, errors)
    """
    if not isinstance(data, dict):
        return False, ["Manifest is geen JSON object"]

    errors = [f"Veld '{key}' ontbreekt" for key in REQUIRED_KEYS if key not in data]
    if "config" in data and not isinstance(data["config"], dict):
        errors.append("Veld 'config' moet een object zijn")
    if isinstance(data.get("thresholds"), dict):
        for name, entry in data["thresholds"].items():
            if name not in DetectorKind.__members__:
                errors.append(f"Onbekende detector '{name}' in thresholds")
            elif not isinstance(entry, dict) or "value" not in entry:
                errors.append(f"Drempel van {name} mist 'value'")
    elif "thresholds" in data:
        errors.append("Veld 'thresholds' moet een object zijn")
    return len(errors) == 0, errors


def load_manifest(path: Path) -> RunManifest:
    """
    Laad een manifest.json (of een map die er een bevat).

    Raises:
        FileNotFoundError: Als het bestand niet bestaat
        ValueError: Bij ongeldige JSON of structuur
    """
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_FILENAME
    if not path.exists():
        raise FileNotFoundError(f"Manifest niet gevonden: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValueError(f"Ongeldige JSON in {path}: {e}")
    return RunManifest.from_dict(data)


def manifest_summary(manifest: RunManifest) -> Dict[str, Optional[Any]]:
    """Korte samenvatting voor de info weergave."""
    cfg = manifest.config
    return {
        "preset_code": manifest.preset_code,
        "version": manifest.version,
        "command": manifest.command,
        "master_seed": manifest.master_seed,
        "duration_s": manifest.duration_s,
        "detectors": cfg.get("detectors"),
        "uncertainties_db": cfg.get("uncertainties_db"),
        "trials": (cfg.get("pf_trials"), cfg.get("pd_trials"), cfg.get("calibration_trials")),
    }
