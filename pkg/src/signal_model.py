"""
Signaalmodel voor spectrum sensing.

Genereert ontvangen sample reeksen onder H0 (alleen ruis) en H1 (lineair
gemoduleerd signaal plus ruis), met Gaussische pulsvorming en optionele
onzekerheid in het ruisvermogen per trial.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Sequence, Union

import numpy as np
from scipy.signal import upfirdn

from .errors import ParameterError

SeedLike = Union[int, np.random.SeedSequence]

# Constellaties met eenheidsvermogen
ALPHABETS: Dict[str, np.ndarray] = {
    "BPSK": np.array([1.0, -1.0], dtype=complex),
    "QPSK": np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j], dtype=complex) / math.sqrt(2.0),
}


class Hypothesis(str, Enum):
    """Hypothese: H0 = alleen ruis, H1 = signaal plus ruis."""

    H0 = "H0"
    H1 = "H1"


@dataclass(frozen=True)
class ModulationConfig:
    """
    Modulatie parameters.

    Attributes:
        scheme: Constellatie naam (sleutel in ALPHABETS)
        samples_per_symbol: T / T_s
        bt_product: BT product van het Gaussische filter
        pulse_span_symbols: Lengte van de afgekapte puls in symbolen
        n_symbols: Aantal symbolen per trial
    """
    scheme: str = "BPSK"
    samples_per_symbol: int = 2
    bt_product: float = 0.5
    pulse_span_symbols: int = 4
    n_symbols: int = 1000

    def validate(self) -> List[str]:
        """
        Valideer de parameters.

        Returns:
            Lijst van foutmeldingen (leeg als geldig)
        """
        errors = []
        if self.scheme not in ALPHABETS:
            errors.append(f"Onbekende modulatie '{self.scheme}', kies uit {sorted(ALPHABETS)}")
        if self.samples_per_symbol < 1:
            errors.append("samples_per_symbol moet >= 1 zijn")
        if not self.bt_product > 0:
            errors.append("bt_product moet > 0 zijn")
        if self.pulse_span_symbols < 1:
            errors.append("pulse_span_symbols moet >= 1 zijn")
        if self.n_symbols < 1:
            errors.append("n_symbols moet >= 1 zijn")
        return errors

    def check(self) -> None:
        """Gooi ParameterError als de configuratie ongeldig is."""
        errors = self.validate()
        if errors:
            raise ParameterError("; ".join(errors))

    @property
    def guard_symbols(self) -> int:
        """Extra symbolen aan elke kant zodat elk behouden sample volledige puls support heeft."""
        return math.ceil(self.pulse_span_symbols / 2)

    @property
    def num_samples(self) -> int:
        """K = n_symbols * samples_per_symbol."""
        return self.n_symbols * self.samples_per_symbol

    @property
    def alphabet(self) -> np.ndarray:
        return ALPHABETS[self.scheme]


@dataclass(frozen=True)
class NoiseModel:
    """
    Ruismodel met onzekerheid in dB.

    Attributes:
        nominal_variance: Nominale ruisvariantie sigma_w^2 (lineair)
        uncertainty_db: Halve breedte U van het onzekerheidsinterval [-U, +U] dB
    """
    nominal_variance: float = 1.0
    uncertainty_db: float = 0.0

    def validate(self) -> List[str]:
        errors = []
        if not self.nominal_variance > 0:
            errors.append("nominal_variance moet > 0 zijn")
        if not self.uncertainty_db >= 0:
            errors.append("uncertainty_db moet >= 0 zijn")
        return errors

    def draw_variance(self, rng: np.random.Generator) -> float:
        """
        Trek de werkelijke ruisvariantie voor een trial.

        Args:
            rng: Generator van de trial

        Returns:
            sigma_w^2 * 10^(u/10) met u uniform op [-U, +U]; exact sigma_w^2 bij U = 0
        """
        if self.uncertainty_db == 0:
            return self.nominal_variance
        u = rng.uniform(-self.uncertainty_db, self.uncertainty_db)
        return self.nominal_variance * 10.0 ** (u / 10.0)


@dataclass(frozen=True, eq=False)
class SymbolSource:
    """
    I.i.d. uniforme symboolbron over een constellatie.

    Attributes:
        alphabet: Constellatiepunten met gemiddeld eenheidsvermogen
        rng_seed: 64-bit seed
    """
    alphabet: np.ndarray
    rng_seed: int = 0

    @classmethod
    def for_scheme(cls, scheme: str, rng_seed: int = 0) -> "SymbolSource":
        if scheme not in ALPHABETS:
            raise ParameterError(f"Onbekende modulatie '{scheme}'")
        return cls(alphabet=ALPHABETS[scheme], rng_seed=rng_seed)

    def draw(self, count: int) -> np.ndarray:
        """Trek `count` symbolen, deterministisch voor rng_seed."""
        return draw_symbols(self.alphabet, count, np.random.default_rng(self.rng_seed))


@dataclass(frozen=True, eq=False)
class Waveform:
    """
    Complexe basisband samples y(n) van een trial.

    De sample array is na constructie read-only.

    Attributes:
        samples: Complexe samples
        samples_per_symbol: Aantal samples per symbool (metadata)
    """
    samples: np.ndarray = field(repr=False)
    samples_per_symbol: int = 2

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.complex128).reshape(-1)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        if self.samples_per_symbol < 1:
            raise ParameterError("samples_per_symbol moet >= 1 zijn")

    @property
    def num_samples(self) -> int:
        """K, het aantal samples."""
        return self.samples.size

    def __len__(self) -> int:
        return self.samples.size


def draw_symbols(alphabet: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniforme i.i.d. trekking uit de constellatie."""
    return alphabet[rng.integers(0, alphabet.size, size=count)]


def derive_seed(master_seed: int, *key: int) -> np.random.SeedSequence:
    """
    Counter-based seed voor een trial.

    Dezelfde (master_seed, key) geeft altijd dezelfde stroom, onafhankelijk van
    de volgorde waarin trials worden verwerkt.

    Args:
        master_seed: Experiment seed (niet-negatief)
        key: Niet-negatieve integers, bijvoorbeeld (stroom, U, snr, trial)

    Returns:
        SeedSequence voor numpy.random.default_rng
    """
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in key))


def gaussian_pulse_taps(config: ModulationConfig) -> np.ndarray:
    """
    Bemonsterde Gaussische puls g(t) = exp(-2 pi^2 B^2 t^2 / ln 2), B = BT / T.

    Bemonsterd op t = n T_s over [-span T / 2, +span T / 2], middelste tap op
    t = 0. Niet genormaliseerd; de vermogensnormalisatie gebeurt in modulate.

    Args:
        config: Modulatie configuratie

    Returns:
        Symmetrische reële tap array

    Raises:
        ParameterError: Bij niet-positieve bt_product, span of samples_per_symbol
    """
    if not config.bt_product > 0:
        raise ParameterError("bt_product moet > 0 zijn")
    if config.pulse_span_symbols < 1:
        raise ParameterError("pulse_span_symbols moet >= 1 zijn")
    if config.samples_per_symbol < 1:
        raise ParameterError("samples_per_symbol moet >= 1 zijn")

    half = (config.pulse_span_symbols * config.samples_per_symbol) // 2
    t = np.arange(-half, half + 1) / config.samples_per_symbol  # in eenheden van T
    return np.exp(-2.0 * np.pi ** 2 * config.bt_product ** 2 * t ** 2 / np.log(2.0))


def modulate(symbols: Sequence[complex], config: ModulationConfig) -> Waveform:
    """
    Pulsgevormde lineaire modulatie x(n) = sum_k s_k g(n T_s - k T).

    De reeks bevat n_symbols nuttige symbolen plus guard_symbols aan elke kant;
    alleen de samples van de nuttige symbolen worden behouden, zodat elk sample
    volledige puls support heeft. Sample 0 valt op de piek van het eerste
    nuttige symbool. Het blok wordt met een globale constante geschaald tot
    gemiddeld vermogen 1 (een blok met vermogen 0 blijft nul).

    Args:
        symbols: n_symbols + 2 * guard_symbols symbolen
        config: Modulatie configuratie

    Returns:
        Waveform met n_symbols * samples_per_symbol samples

    Raises:
        ParameterError: Bij lege of verkeerd lange symboolreeks
    """
    s = np.asarray(symbols, dtype=complex).reshape(-1)
    if s.size == 0:
        raise ParameterError("Lege symboolreeks")
    guard = config.guard_symbols
    expected = config.n_symbols + 2 * guard
    if s.size != expected:
        raise ParameterError(
            f"Verwacht {expected} symbolen (n_symbols={config.n_symbols} + 2 x {guard} guard), kreeg {s.size}"
        )

    taps = gaussian_pulse_taps(config)
    sps = config.samples_per_symbol
    center = (taps.size - 1) // 2
    full = upfirdn(taps, s, up=sps)
    start = guard * sps + center
    x = full[start:start + config.n_symbols * sps]

    power = np.mean(np.abs(x) ** 2)
    if power > 0:
        x = x / np.sqrt(power)
    return Waveform(x, samples_per_symbol=sps)


def realize_trial(config: ModulationConfig,
                  noise: NoiseModel,
                  snr_db: float,
                  hypothesis: Hypothesis,
                  seed: SeedLike) -> Waveform:
    """
    Realiseer een trial: y = ruis onder H0, y = signaal + ruis onder H1.

    Onder H1 wordt het signaal geschaald tot SNR = mean|x|^2 / sigma_w^2 ten
    opzichte van de nominale ruisvariantie; de ruis gebruikt de per trial
    getrokken werkelijke variantie. Deterministisch gegeven seed.

    Args:
        config: Modulatie configuratie
        noise: Ruismodel
        snr_db: SNR per sample in dB (genegeerd onder H0)
        hypothesis: H0 of H1
        seed: Integer seed of SeedSequence

    Returns:
        Waveform met K samples
    """
    config.check()
    errors = noise.validate()
    if errors:
        raise ParameterError("; ".join(errors))

    rng = np.random.default_rng(seed)
    variance = noise.draw_variance(rng)
    k = config.num_samples

    iq = rng.standard_normal((2, k))
    y = np.sqrt(variance / 2.0) * (iq[0] + 1j * iq[1])

    if Hypothesis(hypothesis) is Hypothesis.H1:
        symbols = draw_symbols(config.alphabet, config.n_symbols + 2 * config.guard_symbols, rng)
        x = modulate(symbols, config).samples
        amplitude = np.sqrt(noise.nominal_variance * 10.0 ** (snr_db / 10.0))
        y = y + amplitude * x

    return Waveform(y, samples_per_symbol=config.samples_per_symbol)


def decimate_to_two_sps(w: Waveform, factor: int) -> Waveform:
    """
    Reduceer de sample rate naar 2 samples/symbool.

    Houdt elk factor-de sample vanaf offset 0, zonder anti-alias filter.

    Args:
        w: Waveform met samples_per_symbol = 2 * factor
        factor: Decimatiefactor

    Returns:
        Waveform met samples_per_symbol = 2

    Raises:
        ParameterError: Als factor niet past bij samples_per_symbol
    """
    if factor < 1 or w.samples_per_symbol != 2 * factor:
        raise ParameterError(
            f"Decimatiefactor {factor} past niet bij {w.samples_per_symbol} samples/symbool"
        )
    if factor == 1:
        return w
    return Waveform(w.samples[::factor], samples_per_symbol=2)
