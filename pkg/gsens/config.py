"""
Configuration for gsens: enums, solver settings and the validated run config.

Solver defaults match the tolerances in the simulation acceptance tests;
change them together.
"""

import os
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import psutil

from .core import ConfigError


class Link(Enum):
    IDENTITY = "identity"
    LOG = "log"
    LOGIT = "logit"


class Command(Enum):
    FIT = "fit"
    SWEEP = "sweep"
    SIMULATE = "simulate"
    CALIBRATE = "calibrate"
    RELEVANCE = "relevance"


class OutputFormat(Enum):
    CSV = "csv"
    JSON = "json"


class EstimateStatus(Enum):
    SOLVED = "solved"
    NO_SOLUTION = "no_solution"
    SINGULAR_COVARIANCE = "singular_covariance"


@dataclass(frozen=True)
class SolverConfig:
    """Innstillinger for rotløser, Jacobi-matrise og konfidensintervall"""

    bracket: Tuple[float, float] = (-10.0, 10.0)
    scan_points: int = 101
    tol: float = 1e-10
    jacobian_step: float = 1e-6   # h_j = max(step, step * |theta_j|)
    pivot_tol: float = 1e-12
    warm_start_width: float = 1.0
    level: float = 0.95
    residual_tol: float = 1e-8    # maks |gjennomsnittlig Q| for en godkjent løsning

    def __post_init__(self):
        lower, upper = self.bracket
        if not lower < upper:
            raise ConfigError("bracket", f"nedre grense må være mindre enn øvre, fikk {self.bracket}")
        if self.scan_points < 2:
            raise ConfigError("scan_points", "trenger minst to punkter")
        if not 0.0 < self.level < 1.0:
            raise ConfigError("level", f"må ligge i (0, 1), fikk {self.level}")


@dataclass(frozen=True)
class RuntimeSettings:
    """Miljøstyrte innstillinger"""

    THREADS_VARIABLE: str = "GSENS_THREADS"

    @property
    def threads(self) -> int:
        """Henter maks antall arbeidere fra GSENS_THREADS eller antall kjerner"""
        raw = os.getenv(self.THREADS_VARIABLE)
        if raw:
            try:
                threads = int(raw)
            except ValueError:
                raise ConfigError(self.THREADS_VARIABLE, f"må være et heltall, fikk {raw!r}")
            if threads < 1:
                raise ConfigError(self.THREADS_VARIABLE, f"må være minst 1, fikk {threads}")
            return threads
        cores = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
        return int(cores)


@dataclass
class DataSection:
    path: Path
    x: str
    z: str
    y: Optional[str] = None
    covariates: Tuple[str, ...] = ()
    standardize_exposure: bool = False

    @property
    def column_map(self) -> Dict[str, Any]:
        return {"y": self.y, "x": self.x, "z": self.z, "l": list(self.covariates)}


@dataclass
class GridConfig:
    center: Optional[float] = None   # None: 0 for sweep, alpha_star for simulate
    half_width: float = 0.2
    step: float = 0.02
    values: Optional[Tuple[float, ...]] = None


@dataclass
class SimulationConfig:
    link: Link
    psi: float
    alpha_star: float
    p_z: float = 0.5
    p_x: float = 0.6
    p_y: Optional[float] = None
    sigma: float = 1.0
    n: int = 1000
    m: int = 1000
    master_seed: int = 2023


@dataclass
class RunConfig:
    """Validert kjørekonfigurasjon for CLI-et"""

    command: Command
    data: Optional[DataSection] = None
    link: Optional[Link] = None
    alpha: float = 0.0
    level: float = 0.95
    grid: Optional[GridConfig] = None
    simulation: Optional[SimulationConfig] = None
    output_path: Optional[Path] = None
    output_format: OutputFormat = OutputFormat.CSV
    sample_path: Optional[Path] = None

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any], command: Optional[str] = None) -> "RunConfig":
        """
        Bygger og validerer en RunConfig fra en nøstet mapping (TOML/JSON).

        Args:
            mapping: Seksjoner som i docs/config_schema.toml
            command: Kommando fra kommandolinjen; overstyrer nøkkelen "command"

        Returns:
            RunConfig

        Raises:
            ConfigError: Med navnet på første manglende, ukjente eller ugyldige felt
        """
        mapping = dict(mapping)
        raw_command = command if command is not None else mapping.get("command")
        if raw_command is None:
            raise ConfigError("command", "mangler")
        cmd = _parse_enum(Command, raw_command, "command")
        mapping.pop("command", None)

        sections = _SECTIONS[cmd]
        for name in mapping:
            if name not in sections:
                raise ConfigError(name, f"seksjonen brukes ikke av kommandoen '{cmd.value}'")
        for name, (required, allowed) in sections.items():
            section = mapping.get(name)
            if section is None:
                if required:
                    raise ConfigError(name, "seksjonen mangler")
                continue
            if not isinstance(section, Mapping):
                raise ConfigError(name, "må være en tabell")
            for key in section:
                if key not in allowed:
                    raise ConfigError(f"{name}.{key}", "ukjent felt")
            for key in required:
                if section.get(key) is None:
                    raise ConfigError(f"{name}.{key}", "mangler")

        config = cls(command=cmd)

        if "data" in mapping:
            data = mapping["data"]
            covariates = data.get("covariates", [])
            if isinstance(covariates, str) or not all(isinstance(c, str) for c in covariates):
                raise ConfigError("data.covariates", "må være en liste med kolonnenavn")
            config.data = DataSection(
                path=Path(_parse_str(data["path"], "data.path")),
                x=_parse_str(data["x"], "data.x"),
                z=_parse_str(data["z"], "data.z"),
                y=_parse_str(data["y"], "data.y") if data.get("y") is not None else None,
                covariates=tuple(covariates),
                standardize_exposure=_parse_bool(
                    data.get("standardize_exposure", False), "data.standardize_exposure"
                ),
            )

        if "model" in mapping:
            model = mapping["model"]
            config.link = _parse_enum(Link, model["link"], "model.link")
            config.alpha = _parse_float(model.get("alpha", 0.0), "model.alpha")
            config.level = _parse_float(model.get("level", 0.95), "model.level")
            if not 0.0 < config.level < 1.0:
                raise ConfigError("model.level", f"må ligge i (0, 1), fikk {config.level}")

        if "simulation" in mapping:
            config.simulation = _parse_simulation(mapping["simulation"])

        if "grid" in mapping:
            config.grid = _parse_grid(mapping["grid"])

        output = mapping.get("output", {})
        if output.get("path") is not None:
            config.output_path = Path(_parse_str(output["path"], "output.path"))
        if output.get("sample_path") is not None:
            config.sample_path = Path(_parse_str(output["sample_path"], "output.sample_path"))
        config.output_format = _parse_enum(OutputFormat, output.get("format", "csv"), "output.format")
        return config

    def to_mapping(self) -> Dict[str, Any]:
        """Serialiserbar gjengivelse for rapportmetadata"""

        def convert(value):
            if isinstance(value, Enum):
                return value.value
            if isinstance(value, Path):
                return str(value)
            if isinstance(value, dict):
                return {k: convert(v) for k, v in value.items()}
            if isinstance(value, (list, tuple)):
                return [convert(v) for v in value]
            return value

        return convert(asdict(self))


# (påkrevde felt, tillatte felt) per seksjon; seksjoner med tomt påkrevd-sett er valgfrie
_DATA_KEYS = {"path", "y", "x", "z", "covariates", "standardize_exposure"}
_OUTPUT_KEYS = {"path", "format"}
_SIM_KEYS = {"link", "psi", "alpha_star", "p_z", "p_x", "p_y", "sigma", "n", "m", "master_seed"}

_SECTIONS: Dict[Command, Dict[str, Tuple[Tuple[str, ...], set]]] = {
    Command.FIT: {
        "data": (("path", "y", "x", "z"), _DATA_KEYS),
        "model": (("link",), {"link", "alpha", "level"}),
        "output": ((), _OUTPUT_KEYS),
    },
    Command.SWEEP: {
        "data": (("path", "y", "x", "z"), _DATA_KEYS),
        "model": (("link",), {"link", "level"}),
        "grid": ((), {"center", "half_width", "step", "values"}),
        "output": ((), _OUTPUT_KEYS),
    },
    Command.RELEVANCE: {
        "data": (("path", "x", "z"), _DATA_KEYS),
        "output": ((), _OUTPUT_KEYS),
    },
    Command.SIMULATE: {
        "simulation": (("link", "psi", "alpha_star"), _SIM_KEYS),
        "grid": ((), {"center", "half_width", "step", "values"}),
        "output": ((), _OUTPUT_KEYS),
    },
    Command.CALIBRATE: {
        "simulation": (("link", "psi", "alpha_star"), _SIM_KEYS),
        "output": ((), _OUTPUT_KEYS | {"sample_path"}),
    },
}


def _parse_enum(enum_cls, value: Any, field_name: str):
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(member.value for member in enum_cls)
        raise ConfigError(field_name, f"ugyldig verdi {value!r} (gyldige: {choices})")


def _parse_str(value: Any, field_name: str) -> str:
    if not isinstance(value, str) or not value:
        raise ConfigError(field_name, f"forventet tekst, fikk {value!r}")
    return value


def _parse_bool(value: Any, field_name: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(field_name, f"forventet true/false, fikk {value!r}")
    return value


def _parse_float(value: Any, field_name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(field_name, f"forventet et tall, fikk {value!r}")
    return float(value)


def _parse_int(value: Any, field_name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(field_name, f"forventet et heltall, fikk {value!r}")
    if value < minimum:
        raise ConfigError(field_name, f"må være minst {minimum}, fikk {value}")
    return value


def _parse_probability(value: Any, field_name: str) -> float:
    p = _parse_float(value, field_name)
    if not 0.0 < p < 1.0:
        raise ConfigError(field_name, f"må ligge i (0, 1), fikk {p}")
    return p


def _parse_simulation(section: Mapping[str, Any]) -> SimulationConfig:
    link = _parse_enum(Link, section["link"], "simulation.link")
    if link is Link.LOG:
        raise ConfigError("simulation.link", "log-link har ingen kalibrert DGP")
    if link is Link.LOGIT and section.get("p_y") is None:
        raise ConfigError("simulation.p_y", "påkrevd for logit-link")
    if link is Link.IDENTITY and section.get("p_y") is not None:
        raise ConfigError("simulation.p_y", "brukes ikke med identity-link")
    if link is Link.LOGIT and section.get("sigma") is not None:
        raise ConfigError("simulation.sigma", "brukes ikke med logit-link")

    sim = SimulationConfig(
        link=link,
        psi=_parse_float(section["psi"], "simulation.psi"),
        alpha_star=_parse_float(section["alpha_star"], "simulation.alpha_star"),
        p_z=_parse_probability(section.get("p_z", 0.5), "simulation.p_z"),
        p_x=_parse_probability(section.get("p_x", 0.6), "simulation.p_x"),
        sigma=_parse_float(section.get("sigma", 1.0), "simulation.sigma"),
        n=_parse_int(section.get("n", 1000), "simulation.n", 1),
        m=_parse_int(section.get("m", 1000), "simulation.m", 1),
        master_seed=_parse_int(section.get("master_seed", 2023), "simulation.master_seed", 0),
    )
    if section.get("p_y") is not None:
        sim.p_y = _parse_probability(section["p_y"], "simulation.p_y")
    if sim.sigma <= 0:
        raise ConfigError("simulation.sigma", f"må være positiv, fikk {sim.sigma}")
    return sim


def _parse_grid(section: Mapping[str, Any]) -> GridConfig:
    if section.get("values") is not None:
        if any(k in section for k in ("center", "half_width", "step")):
            raise ConfigError("grid.values", "kan ikke kombineres med center/half_width/step")
        raw = section["values"]
        if isinstance(raw, (str, bytes)) or not hasattr(raw, "__iter__"):
            raise ConfigError("grid.values", "må være en liste med tall")
        values = tuple(_parse_float(v, "grid.values") for v in raw)
        if not values:
            raise ConfigError("grid.values", "kan ikke være tom")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError("grid.values", "må være strengt stigende")
        return GridConfig(values=values)

    grid = GridConfig(
        center=_parse_float(section["center"], "grid.center") if section.get("center") is not None else None,
        half_width=_parse_float(section.get("half_width", 0.2), "grid.half_width"),
        step=_parse_float(section.get("step", 0.02), "grid.step"),
    )
    if grid.half_width < 0:
        raise ConfigError("grid.half_width", "kan ikke være negativ")
    if grid.step <= 0:
        raise ConfigError("grid.step", "må være positiv")
    return grid
