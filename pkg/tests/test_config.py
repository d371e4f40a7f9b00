from pathlib import Path

import pytest

from gsens.cli import load_config_file
from gsens.config import Command, Link, OutputFormat, RunConfig, RuntimeSettings, SolverConfig
from gsens.core import ConfigError

DATA = {"path": "vitd.csv", "y": "death", "x": "vitd", "z": "filaggrin"}


def field_of(excinfo):
    return excinfo.value.field


def test_fit_config():
    config = RunConfig.from_mapping({
        "command": "fit",
        "data": DATA,
        "model": {"link": "logit", "alpha": -0.1},
        "output": {"format": "json", "path": "out.json"},
    })
    assert config.command is Command.FIT
    assert config.link is Link.LOGIT
    assert config.alpha == -0.1
    assert config.data.path == Path("vitd.csv")
    assert config.data.column_map == {"y": "death", "x": "vitd", "z": "filaggrin", "l": []}
    assert config.output_format is OutputFormat.JSON


def test_command_argument_overrides_mapping():
    config = RunConfig.from_mapping({"command": "fit", "data": DATA, "model": {"link": "identity"}}, command="sweep")
    assert config.command is Command.SWEEP


def test_sweep_grid_values_keep_their_order():
    config = RunConfig.from_mapping({
        "command": "sweep",
        "data": DATA,
        "model": {"link": "logit"},
        "grid": {"values": [-0.15, -0.1, 0.0, 0.5]},
    })
    assert config.grid.values == (-0.15, -0.1, 0.0, 0.5)


def test_grid_center_defaults_to_none():
    config = RunConfig.from_mapping({"command": "sweep", "data": DATA, "model": {"link": "identity"}, "grid": {}})
    assert config.grid.center is None
    assert config.grid.step == 0.02


def test_simulation_config():
    config = RunConfig.from_mapping({
        "command": "simulate",
        "simulation": {"link": "logit", "psi": 0.5, "alpha_star": 0.5, "p_y": 0.3, "m": 10},
    })
    sim = config.simulation
    assert sim.link is Link.LOGIT
    assert (sim.p_z, sim.p_x, sim.p_y) == (0.5, 0.6, 0.3)
    assert sim.n == 1000
    assert sim.m == 10
    assert sim.master_seed == 2023


def test_relevance_needs_no_outcome_column():
    config = RunConfig.from_mapping({"command": "relevance", "data": {"path": "d.csv", "x": "vitd", "z": "filaggrin"}})
    assert config.data.y is None


def test_invalid_link_names_the_field():
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.from_mapping({"command": "fit", "data": DATA, "model": {"link": "probit"}})
    assert field_of(excinfo) == "model.link"
    assert "probit" in str(excinfo.value)


@pytest.mark.parametrize("mapping, field", [
    ({"command": "fit", "data": DATA}, "model"),
    ({"command": "fit", "data": {**DATA, "z": None}, "model": {"link": "logit"}}, "data.z"),
    ({"command": "fit", "data": DATA, "model": {"link": "logit", "colour": 1}}, "model.colour"),
    ({"command": "fit", "data": DATA, "model": {"link": "logit"}, "simulation": {}}, "simulation"),
    ({"command": "launch"}, "command"),
    ({}, "command"),
    ({"command": "simulate", "simulation": {"link": "logit", "psi": 0, "alpha_star": 0}}, "simulation.p_y"),
    ({"command": "simulate", "simulation": {"link": "log", "psi": 0, "alpha_star": 0}}, "simulation.link"),
    ({"command": "simulate", "simulation": {"link": "identity", "psi": 0, "alpha_star": 0, "p_x": 1.2}}, "simulation.p_x"),
    ({"command": "simulate", "simulation": {"link": "identity", "psi": 0, "alpha_star": 0, "m": 0}}, "simulation.m"),
    ({"command": "simulate", "simulation": {"link": "identity", "psi": "0", "alpha_star": 0}}, "simulation.psi"),
    ({"command": "sweep", "data": DATA, "model": {"link": "logit"}, "grid": {"values": [0.1, 0.0]}}, "grid.values"),
    ({"command": "sweep", "data": DATA, "model": {"link": "logit"}, "grid": {"step": 0}}, "grid.step"),
    ({"command": "fit", "data": DATA, "model": {"link": "logit", "level": 1.5}}, "model.level"),
    ({"command": "fit", "data": DATA, "model": {"link": "logit"}, "output": {"format": "xml"}}, "output.format"),
])
def test_invalid_configs_name_the_first_bad_field(mapping, field):
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.from_mapping(mapping)
    assert field_of(excinfo) == field


def test_config_echo_is_plain_data():
    config = RunConfig.from_mapping({
        "command": "simulate",
        "simulation": {"link": "identity", "psi": 1.5, "alpha_star": 0.5},
    })
    echo = config.to_mapping()
    assert echo["command"] == "simulate"
    assert echo["simulation"]["link"] == "identity"
    assert echo["output_format"] == "csv"


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv("GSENS_THREADS", "3")
    assert RuntimeSettings().threads == 3
    monkeypatch.setenv("GSENS_THREADS", "zero")
    with pytest.raises(ConfigError):
        RuntimeSettings().threads
    monkeypatch.delenv("GSENS_THREADS")
    assert RuntimeSettings().threads >= 1


def test_solver_config_validation():
    with pytest.raises(ConfigError):
        SolverConfig(bracket=(1.0, -1.0))
    with pytest.raises(ConfigError):
        SolverConfig(level=1.0)


def test_load_toml_and_json(tmp_path):
    toml_path = tmp_path / "run.toml"
    toml_path.write_text('command = "fit"\n\n[model]\nlink = "identity"\nalpha = 0.25\n')
    assert load_config_file(toml_path)["model"] == {"link": "identity", "alpha": 0.25}

    json_path = tmp_path / "run.json"
    json_path.write_text('{"command": "fit", "model": {"link": "logit"}}')
    assert load_config_file(json_path)["model"]["link"] == "logit"


def test_load_rejects_unknown_format_and_bad_syntax(tmp_path):
    yaml_path = tmp_path / "run.yaml"
    yaml_path.write_text("command: fit\n")
    with pytest.raises(ConfigError):
        load_config_file(yaml_path)

    broken = tmp_path / "run.toml"
    broken.write_text("command = \n")
    with pytest.raises(ConfigError):
        load_config_file(broken)

    with pytest.raises(ConfigError):
        load_config_file(tmp_path / "missing.toml")
