#!/usr/bin/env python3
"""
CLI entrypoint voor de Spectrum Sensing Benchmark.

Gebruik:
    python -m src.main calibrate --config config/default.conf
    python -m src.main sense samples.iq --detector CD
    python -m src.main sweep --config config/default.conf --out results/
    python -m src.main table1 --xlsx results/table1.xlsx
"""

import argparse
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from .config import ExperimentConfig, default_config
from .cyclic_stats import TABLE_ORDER, DetectorKind, StatisticValue, compute_statistic
from .detectors import Threshold, cd_threshold, decide, ed_threshold
from .errors import ConfigError, DegenerateCovarianceError
from .iq_io import DTYPES, read_iq_file
from .manifest import RunManifest, load_manifest, manifest_summary
from .montecarlo import (
    ResultRow,
    SensingExperiment,
    published_table1_frame,
    plot_frame,
    required_snr_frame,
    rows_to_frame,
    table1_frame,
)
from .signal_model import Hypothesis, decimate_to_two_sps
from .workbook import read_workbook_manifest, validate_stamp, write_table1_workbook

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_SIGNAL = 10


def setup_argparser() -> argparse.ArgumentParser:
    """Setup command line argument parser."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", type=Path,
                        help="Config bestand (key = value) of manifest.json (default: ingebouwde standaard)")
    common.add_argument("--seed", type=int, help="Overschrijf master_seed")
    common.add_argument("--trials", type=int, help="Overschrijf pf_trials, pd_trials en calibration_trials")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                        help="Aantal processen voor de Monte Carlo trials (default: aantal CPU's)")
    common.add_argument("--verbose", "-v", action="store_true", help="Verbose output")

    parser = argparse.ArgumentParser(
        description="Spectrum Sensing Benchmark - CFAR detectoren onder ruisonzekerheid",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Voorbeelden:
    # Drempels bij de standaard instellingen
    python -m src.main calibrate

    # Beslis over een opgenomen I/Q bestand (exit 10 = signaal, 0 = ruis)
    python -m src.main sense opname.iq --detector CD --format f32

    # P_d curves en P_f tabel voor alle onzekerheden
    python -m src.main sweep --config config/default.conf --out results/

    # Benchmarktabel met gepubliceerde waarden, ook als werkboek
    python -m src.main table1 --trials 20000 --xlsx results/table1.xlsx

    # Info over een eerder geschreven werkboek of manifest
    python -m src.main info results/table1.xlsx
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    calibrate = sub.add_parser("calibrate", parents=[common], help="Bereken de drempels per detector")
    calibrate.add_argument("--out", "-o", type=Path, help="Map voor thresholds.csv en manifest.json")

    sense = sub.add_parser("sense", parents=[common], help="Beslis H0/H1 voor een I/Q sample bestand")
    sense.add_argument("input", type=Path, help="Binair I/Q bestand")
    sense.add_argument("--detector", "-d", default="CD", help="CD, ED, MME of EME (default: CD)")
    sense.add_argument("--format", "-f", dest="fmt", choices=sorted(DTYPES), default="f32",
                       help="Sample formaat (default: f32)")
    sense.add_argument("--sps", type=int, default=2,
                       help="Samples per symbool van de invoer; wordt gedecimeerd naar 2 (default: 2)")

    sweep = sub.add_parser("sweep", parents=[common], help="P_f en P_d over het volledige rooster")
    sweep.add_argument("--out", "-o", type=Path, default=Path("results"), help="Output map (default: results/)")
    sweep.add_argument("--target-pd", type=float, default=0.9,
                       help="P_d voor required_snr.csv (default: 0.9)")

    table1 = sub.add_parser("table1", parents=[common], help="Reproduceer de benchmarktabel (P_f en P_d bij -12/-10/-8 dB)")
    table1.add_argument("--out", "-o", type=Path, help="Map voor table1.csv en manifest.json")
    table1.add_argument("--xlsx", type=Path, help="Schrijf de tabel ook naar een Excel werkboek")

    bench = sub.add_parser("bench", parents=[common], help="Rekentijd per beslissing per detector")
    bench.add_argument("--repeats", type=int, default=200, help="Aantal herhalingen (default: 200)")

    info = sub.add_parser("info", help="Toon manifest en stempel van een werkboek of output map")
    info.add_argument("path", type=Path, help="Werkboek (.xlsx), manifest.json of output map")
    info.add_argument("--verbose", "-v", action="store_true", help="Verbose output")

    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Laad de config en pas --seed / --trials toe."""
    if args.config:
        if args.verbose:
            print(f"Config laden van: {args.config}")
        config = ExperimentConfig.from_file(args.config)
    else:
        config = default_config()

    trials = getattr(args, "trials", None)
    config = config.with_overrides(
        master_seed=getattr(args, "seed", None),
        pf_trials=trials,
        pd_trials=trials,
        calibration_trials=trials,
    )
    if args.verbose:
        print(f"Config: {config.preset_code()} (seed {config.master_seed})")
    return config


def print_thresholds(thresholds: Dict[DetectorKind, Threshold]) -> None:
    print(f"\n{'Detector':<9}{'lambda':>16}  Herkomst")
    print("-" * 60)
    for kind, t in thresholds.items():
        print(f"{kind.value:<9}{t.value:>16.6e}  {t.describe()}")


def thresholds_frame(thresholds: Dict[DetectorKind, Threshold]) -> pd.DataFrame:
    return pd.DataFrame(
        [{"detector": k.value, "target_pf": t.target_pf, "threshold": t.value,
          "provenance": t.provenance, "trials": t.trials, "seed": t.seed}
         for k, t in thresholds.items()],
        columns=["detector", "target_pf", "threshold", "provenance", "trials", "seed"],
    ).astype({"trials": "Int64", "seed": "Int64"})


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    """CSV zonder index; floats in volledige precisie."""
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=repr_float)
    return path


def repr_float(value: float) -> str:
    return repr(float(value))


# -- subcommando's -----------------------------------------------------------

def cmd_calibrate(args: argparse.Namespace) -> int:
    """Drempels per detector met herkomst."""
    config = load_config(args)
    start = time.perf_counter()
    with SensingExperiment(config, workers=args.workers, progress=args.verbose) as experiment:
        thresholds = experiment.calibrate()
    duration = time.perf_counter() - start

    print(f"Drempels voor {config.preset_code()} (P_f = {config.target_pf:g}, sigma_w^2 = {config.nominal_variance:g})")
    print_thresholds(thresholds)

    if args.out:
        path = write_csv(thresholds_frame(thresholds), args.out / "thresholds.csv")
        RunManifest.build(config, thresholds, duration, command="calibrate").write(args.out)
        print(f"\n✅ Drempels geschreven: {path}")
    return EXIT_OK


def _sense_threshold(config: ExperimentConfig, kind: DetectorKind, k: int, args: argparse.Namespace) -> Threshold:
    """Drempel bij het werkelijke aantal samples K van de invoer."""
    if kind is DetectorKind.CD:
        return cd_threshold(config.target_pf, config.nominal_variance, k)
    if kind is DetectorKind.ED:
        return ed_threshold(config.target_pf, config.nominal_variance, k)
    # H0 ruis hangt alleen van K af
    noise_only = replace(config.modulation, samples_per_symbol=1, n_symbols=k)
    calibration = replace(config, modulation=noise_only, detectors=(kind,))
    with SensingExperiment(calibration, workers=args.workers, progress=args.verbose) as experiment:
        return experiment.threshold(kind)


def cmd_sense(args: argparse.Namespace) -> int:
    """
    Beslis over een I/Q bestand.

    Returns:
        EXIT_SIGNAL (10) bij H1, EXIT_OK (0) bij H0
    """
    config = load_config(args)
    kind = DetectorKind.parse(args.detector)

    waveform = read_iq_file(args.input, args.fmt, samples_per_symbol=args.sps)
    waveform = decimate_to_two_sps(waveform, max(1, args.sps // 2))
    k = waveform.num_samples
    if args.verbose:
        print(f"{k} samples na decimatie ({args.input})")

    try:
        statistic = compute_statistic(kind, waveform, config.covariance)
    except DegenerateCovarianceError as e:
        print(f"⚠️  {e}; beslissing is NOISE")
        statistic = StatisticValue(kind, float("nan"))
        threshold = None
        hypothesis = Hypothesis.H0
    else:
        threshold = _sense_threshold(config, kind, k, args)
        hypothesis = decide(statistic, threshold).hypothesis

    print("SIGNAL" if hypothesis is Hypothesis.H1 else "NOISE")
    print(f"  detector:  {kind.value}")
    print(f"  statistic: {statistic.value:.6e}")
    if threshold is None:
        print("  threshold: niet gekalibreerd (gedegenereerde covariantie)")
    else:
        print(f"  threshold: {threshold.value:.6e} ({threshold.describe()})")
    print(f"  K:         {k}")
    return EXIT_SIGNAL if hypothesis is Hypothesis.H1 else EXIT_OK


def write_sweep_outputs(rows: List[ResultRow], out_dir: Path, target_pd: float) -> List[Path]:
    """
    Schrijf de CSV's en plotbestanden van een sweep.

    Returns:
        Lijst van geschreven paden
    """
    frame = rows_to_frame(rows)
    pf_mask = frame["snr_db"].isna()
    written = [
        write_csv(frame[~pf_mask], out_dir / "pd_curves.csv"),
        write_csv(frame[pf_mask], out_dir / "pfa_table.csv"),
        write_csv(required_snr_frame(rows, target_pd), out_dir / "required_snr.csv"),
    ]
    for u in sorted({r.uncertainty_db for r in rows}):
        path = out_dir / f"pd_plot_U{u:g}dB.dat"
        plot_frame(rows, u).to_csv(path, sep=" ", index=False, float_format=repr_float, na_rep="nan")
        written.append(path)
    return written


def cmd_sweep(args: argparse.Namespace) -> int:
    """P_d curves, P_f tabel, benodigde SNR en plotdata plus manifest."""
    config = load_config(args)
    start = time.perf_counter()
    with SensingExperiment(config, workers=args.workers, progress=args.verbose) as experiment:
        rows = experiment.sweep()
        thresholds = experiment.calibrate()
    duration = time.perf_counter() - start

    written = write_sweep_outputs(rows, args.out, args.target_pd)
    manifest_path = RunManifest.build(config, thresholds, duration, command="sweep").write(args.out)

    print(f"✅ Sweep klaar in {duration:.1f} s ({len(rows)} rijen)")
    for path in written + [manifest_path]:
        print(f"   {path}")
    return EXIT_OK


def print_table1(frame: pd.DataFrame, published: pd.DataFrame) -> None:
    """Tabel met halve breedtes, gepubliceerde waarden ernaast."""
    value_columns = [c for c in frame.columns if not c.endswith("_hw")]
    header = f"{'Schema':<14}" + "".join(f"{c:>18}" for c in value_columns) + "   | gepubliceerd"
    print(header)
    print("-" * len(header) + "-" * 28)
    for label, row in frame.iterrows():
        cells = "".join(f"{row[c]:>9.4f} ±{row[c + '_hw']:.4f}" for c in value_columns)
        reference = " ".join(f"{published.at[label, c]:.4f}" for c in value_columns) if label in published.index else ""
        print(f"{label:<14}{cells}   | {reference}")


def cmd_table1(args: argparse.Namespace) -> int:
    """Reproduceer de benchmarktabel en toon de gepubliceerde waarden ernaast."""
    config = load_config(args)
    start = time.perf_counter()
    with SensingExperiment(config, workers=args.workers, progress=args.verbose) as experiment:
        rows = experiment.reproduce_table1()
        thresholds = experiment.calibrate(TABLE_ORDER)
    duration = time.perf_counter() - start

    frame = table1_frame(rows)
    published = published_table1_frame()
    print_table1(frame, published)

    manifest = RunManifest.build(config, thresholds, duration, command="table1")
    if args.out:
        path = write_csv(frame.reset_index(), args.out / "table1.csv")
        write_csv(rows_to_frame(rows), args.out / "table1_rows.csv")
        manifest.write(args.out)
        print(f"\n✅ Tabel geschreven: {path}")
    if args.xlsx:
        write_table1_workbook(args.xlsx, frame, manifest, published)
        print(f"✅ Werkboek geschreven: {args.xlsx}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    """Rekentijd per beslissing, relatief aan energiedetectie."""
    config = load_config(args)
    with SensingExperiment(config) as experiment:
        costs = experiment.statistic_cost(repeats=args.repeats)

    reference = costs.get(DetectorKind.ED)
    print(f"Rekentijd per beslissing (K = {config.num_samples}, {args.repeats} herhalingen)")
    print("-" * 50)
    for kind, seconds in costs.items():
        ratio = f"{seconds / reference:6.2f} x ED" if reference else ""
        print(f"{kind.value:<6}{seconds * 1e6:>12.1f} us   {ratio}")
    return EXIT_OK


def cmd_info(args: argparse.Namespace) -> int:
    """Toon manifest en stempel van een werkboek of een output map."""
    path: Path = args.path
    print(f"\nRun Informatie: {path}")
    print("=" * 50)

    if not path.exists():
        print("❌ Bestand niet gevonden")
        return EXIT_ERROR

    if path.suffix == ".xlsx":
        stamp = read_workbook_manifest(path)
        if not stamp:
            print("❌ Geen stempel gevonden - geen werkboek van deze tool")
            return EXIT_ERROR
        data, preset_code = stamp
        is_valid, errors = validate_stamp(path)
        print("✅ Werkboek met stempel gevonden")
        print(f"📄 Preset Code: {preset_code or 'Onbekend'}")
        print(f"✔️  Geldig: {'Ja' if is_valid else 'Nee'}")
        for error in errors:
            print(f"   - {error}")
        if not data:
            return EXIT_ERROR
        try:
            manifest = RunManifest.from_dict(data)
        except ValueError as e:
            print(f"❌ {e}")
            return EXIT_ERROR
    else:
        manifest = load_manifest(path)
        print("✅ Manifest gevonden")

    summary = manifest_summary(manifest)
    print("\n📋 Run:")
    for key, value in summary.items():
        print(f"   {key}: {value}")
    if manifest.thresholds:
        print("\n📏 Drempels:")
        for name, entry in manifest.thresholds.items():
            print(f"   {name:<5} {entry['value']:.6e} ({entry.get('provenance', '?')})")
    return EXIT_OK


COMMANDS = {
    "calibrate": cmd_calibrate,
    "sense": cmd_sense,
    "sweep": cmd_sweep,
    "table1": cmd_table1,
    "bench": cmd_bench,
    "info": cmd_info,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI functie; geeft de exit code terug."""
    parser = setup_argparser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        return COMMANDS[args.command](args)
    except KeyboardInterrupt:
        print("\n❌ Onderbroken door gebruiker")
        return EXIT_ERROR
    except ConfigError as e:
        print(f"❌ {e}")
        return EXIT_USAGE
    except Exception as e:
        print(f"❌ Fout: {e}")
        if args.verbose:
            import traceback
            traceback.print_exc()
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
