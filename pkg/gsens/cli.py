"""
Command-line front end: `gsens <command> --config <file>` with per-field overrides.

Exit codes: 0 success (NoSolution rows included), 2 invalid configuration,
3 data or estimation error, 1 unexpected error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .analyzers import default_alpha_grid, fit_g_estimator, relevance_check, sweep_alpha
from .config import Command, GridConfig, RunConfig, RuntimeSettings, SolverConfig
from .core import ConfigError, DataError, EstimationError, ReportIOError
from .data import load_csv, save_csv
from .models import SmmSpec
from .processors import emit_report
from .simulation import calibrate, generate, replication_seed, run_monte_carlo

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_DATA = 3

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# argparse-destinasjon -> (seksjon, nøkkel) i konfigurasjonen
OVERRIDES = {
    "data_path": ("data", "path"),
    "x": ("data", "x"),
    "y": ("data", "y"),
    "z": ("data", "z"),
    "covariates": ("data", "covariates"),
    "standardize_exposure": ("data", "standardize_exposure"),
    "alpha": ("model", "alpha"),
    "level": ("model", "level"),
    "grid_center": ("grid", "center"),
    "grid_half_width": ("grid", "half_width"),
    "grid_step": ("grid", "step"),
    "psi": ("simulation", "psi"),
    "alpha_star": ("simulation", "alpha_star"),
    "p_z": ("simulation", "p_z"),
    "p_x": ("simulation", "p_x"),
    "p_y": ("simulation", "p_y"),
    "sigma": ("simulation", "sigma"),
    "n": ("simulation", "n"),
    "m": ("simulation", "m"),
    "seed": ("simulation", "master_seed"),
    "output": ("output", "path"),
    "format": ("output", "format"),
    "sample_output": ("output", "sample_path"),
}


def _name_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in _name_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"forventet kommaseparerte tall, fikk {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsens",
        description="G-estimering med sensitivitetsanalyse for ugyldige instrumenter",
    )
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument("--config", type=Path, help="TOML- eller JSON-fil (se docs/config_schema.toml)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Logg på DEBUG-nivå")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Logg bare advarsler og feil")

    data = parser.add_argument_group("data")
    data.add_argument("--data", dest="data_path")
    data.add_argument("--x")
    data.add_argument("--y")
    data.add_argument("--z")
    data.add_argument("--covariates", type=_name_list, help="Kommaseparerte kolonnenavn")
    data.add_argument("--standardize-exposure", action="store_const", const=True, default=None)

    model = parser.add_argument_group("modell")
    model.add_argument("--link", choices=["identity", "log", "logit"])
    model.add_argument("--alpha", type=float)
    model.add_argument("--level", type=float)

    grid = parser.add_argument_group("alpha-grid")
    grid.add_argument("--grid-center", type=float)
    grid.add_argument("--grid-half-width", type=float)
    grid.add_argument("--grid-step", type=float)
    grid.add_argument("--grid-values", type=_float_list, help="Kommaseparerte alpha-verdier")

    sim = parser.add_argument_group("simulering")
    sim.add_argument("--psi", type=float)
    sim.add_argument("--alpha-star", type=float)
    sim.add_argument("--p-z", type=float)
    sim.add_argument("--p-x", type=float)
    sim.add_argument("--p-y", type=float)
    sim.add_argument("--sigma", type=float)
    sim.add_argument("--n", type=int)
    sim.add_argument("--m", type=int)
    sim.add_argument("--seed", type=int)

    out = parser.add_argument_group("utdata")
    out.add_argument("--output", "-o")
    out.add_argument("--format", choices=["csv", "json"])
    out.add_argument("--sample-output", help="Skriv et datasett fra den kalibrerte DGP-en (calibrate)")
    return parser


def load_config_file(path: Path) -> Dict[str, Any]:
    """
    Leser konfigurasjonsfilen; formatet velges fra filendelsen.

    Raises:
        ConfigError: Filen mangler, har ukjent format eller kan ikke tolkes
    """
    suffix = path.suffix.lower()
    try:
        if suffix == ".toml":
            with open(path, "rb") as f:
                return tomllib.load(f)
        if suffix == ".json":
            with open(path, "r", encoding="utf-8") as f:
                content = json.load(f)
            if not isinstance(content, dict):
                raise ConfigError("config", "JSON-filen må inneholde et objekt")
            return content
    except OSError as e:
        raise ConfigError("config", f"kunne ikke lese {path}: {e}")
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigError("config", f"kunne ikke tolke {path}: {e}")
    raise ConfigError("config", f"ukjent filformat {suffix!r} (bruk .toml eller .json)")


def apply_overrides(mapping: Dict[str, Any], args: argparse.Namespace) -> Dict[str, Any]:
    """Legger kommandolinjeflagg oppå verdiene fra filen"""
    merged = {name: dict(section) if isinstance(section, dict) else section for name, section in mapping.items()}

    def put(section: str, key: str, value: Any) -> None:
        target = merged.setdefault(section, {})
        if not isinstance(target, dict):
            raise ConfigError(section, "må være en tabell")
        target[key] = value

    for dest, (section, key) in OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is not None:
            put(section, key, value)

    if args.link is not None:
        section = "simulation" if args.command in (Command.SIMULATE.value, Command.CALIBRATE.value) else "model"
        put(section, "link", args.link)
    if args.grid_values is not None:
        merged["grid"] = {"values": args.grid_values}
    return merged


def resolve_grid(grid: Optional[GridConfig], default_center: float):
    grid = grid or GridConfig()
    if grid.values is not None:
        return grid.values
    center = default_center if grid.center is None else grid.center
    return default_alpha_grid(center, grid.half_width, grid.step)


def execute(config: RunConfig):
    """Utfører kommandoen og returnerer rapportobjektet"""
    command = config.command

    if command in (Command.FIT, Command.SWEEP, Command.RELEVANCE):
        data = load_csv(config.data.path, config.data.column_map, config.data.standardize_exposure)
        if command is Command.RELEVANCE:
            return relevance_check(data)

        spec = SmmSpec(link=config.link)
        solver = SolverConfig(level=config.level)
        if command is Command.FIT:
            estimate = fit_g_estimator(data, spec, config.alpha, solver)
            logger.info(f"alpha={estimate.alpha}: psi={estimate.psi:.4f} ({estimate.status.value})")
            return estimate

        result = sweep_alpha(data, spec, resolve_grid(config.grid, 0.0), solver)
        logger.info(f"Sweep ferdig; løsbart område for alpha: {result.solvable_range}")
        return result

    sim = config.simulation
    dgp = calibrate(sim)
    if command is Command.CALIBRATE:
        if config.sample_path is not None:
            sample = generate(dgp, sim.n, replication_seed(sim.master_seed, 0))
            save_csv(sample, config.sample_path)
            logger.info(f"Skrev utvalg med n={sample.n} til {config.sample_path}")
        return dgp

    grid = resolve_grid(config.grid, sim.alpha_star)
    return run_monte_carlo(
        dgp, SmmSpec(link=sim.link), sim.n, sim.m, grid, sim.master_seed,
        workers=RuntimeSettings().threads,
    )


def run(config: RunConfig) -> int:
    """
    Kjører en validert konfigurasjon og skriver rapporten.

    Returns:
        Exit-kode (0, 1, 2 eller 3)
    """
    try:
        report = execute(config)
        emit_report(report, config.output_format, config.output_path, config, __version__)
    except ConfigError as e:
        logger.error(f"Ugyldig konfigurasjon: {str(e)}")
        return EXIT_CONFIG
    except (DataError, EstimationError, ReportIOError) as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        return EXIT_DATA
    except Exception:
        logger.exception("Uventet feil")
        return EXIT_UNEXPECTED
    return EXIT_OK


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=[logging.StreamHandler(sys.stderr)], force=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose, args.quiet)
    try:
        mapping = load_config_file(args.config) if args.config is not None else {}
        mapping = apply_overrides(mapping, args)
        config = RunConfig.from_mapping(mapping, command=args.command)
    except ConfigError as e:
        logger.error(f"Ugyldig konfigurasjon: {str(e)}")
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
