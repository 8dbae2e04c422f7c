"""
Binaire I/Q sample bestanden.

Little-endian, interleaved I/Q paren als 32-bit (f32) of 64-bit (f64) floats.
"""

import logging
from pathlib import Path
from typing import Dict, Literal

import numpy as np

from .errors import SampleFileError
from .signal_model import Waveform

logger = logging.getLogger(__name__)

SampleFormat = Literal["f32", "f64"]

DTYPES: Dict[str, str] = {"f32": "<f4", "f64": "<f8"}


def _dtype(fmt: str) -> np.dtype:
    try:
        return np.dtype(DTYPES[fmt])
    except KeyError:
        raise SampleFileError(f"Onbekend sample formaat '{fmt}', kies uit {sorted(DTYPES)}")


def read_iq_file(path: Path, fmt: SampleFormat = "f32", samples_per_symbol: int = 2) -> Waveform:
    """
    Lees complexe samples uit een I/Q bestand.

    Args:
        path: Pad naar het bestand
        fmt: "f32" of "f64"
        samples_per_symbol: Metadata voor de Waveform

    Returns:
        Waveform met de samples

    Raises:
        SampleFileError: Bij een leeg, afgekapt of onleesbaar bestand
    """
    path = Path(path)
    dtype = _dtype(fmt)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise SampleFileError(f"Kan {path} niet lezen: {e}")

    if len(raw) == 0:
        raise SampleFileError(f"{path} is leeg")
    pair = 2 * dtype.itemsize
    if len(raw) % pair:
        raise SampleFileError(
            f"{path} is afgekapt: {len(raw)} bytes is geen veelvoud van {pair} ({fmt} I/Q paren)"
        )

    floats = np.frombuffer(raw, dtype=dtype).astype(np.float64)
    if not np.all(np.isfinite(floats)):
        raise SampleFileError(f"{path} bevat niet-eindige waarden")
    samples = floats[0::2] + 1j * floats[1::2]
    logger.debug("%d samples gelezen uit %s", samples.size, path)
    return Waveform(samples, samples_per_symbol=samples_per_symbol)


def write_iq_file(path: Path, samples: np.ndarray, fmt: SampleFormat = "f32") -> Path:
    """
    Schrijf complexe samples als interleaved I/Q.

    Returns:
        Pad van het bestand
    """
    path = Path(path)
    dtype = _dtype(fmt)
    samples = np.asarray(samples, dtype=np.complex128).reshape(-1)
    interleaved = np.empty(2 * samples.size, dtype=dtype)
    interleaved[0::2] = samples.real
    interleaved[1::2] = samples.imag
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(interleaved.tobytes())
    return path
