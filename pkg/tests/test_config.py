from __future__ import annotations

import argparse
from pathlib import Path

import pytest

from dimlift.config import RunConfig, load_config
from dimlift.errors import InputError, ParseError
from dimlift.exactnum import Caps


def _args(**overrides) -> argparse.Namespace:
    values = {
        "command": "lift",
        "inputs": ["sample:square"],
        "seed": None,
        "max_dim": None,
        "max_vars": None,
        "out": None,
        "fmt": None,
        "trials": None,
    }
    values.update(overrides)
    return argparse.Namespace(**values)


def test_load_config_missing_file_returns_empty(tmp_path: Path):
    assert load_config(str(tmp_path / "nope.yml")) == {}
    assert load_config(None) == {}


def test_load_config_reads_yaml(tmp_path: Path):
    p = tmp_path / "dimlift.yml"
    p.write_text("caps: {max_dim: 50}\nrun: {seed: 3}\n")
    cfg = load_config(str(p))
    assert cfg["caps"]["max_dim"] == 50


def test_load_config_reports_position(tmp_path: Path):
    p = tmp_path / "bad.yml"
    p.write_text("caps:\n  max_dim: [1\n")
    with pytest.raises(ParseError) as exc:
        load_config(str(p))
    assert exc.value.line is not None
    assert exc.value.source == str(p)


def test_load_config_needs_mapping(tmp_path: Path):
    p = tmp_path / "list.yml"
    p.write_text("- 1\n- 2\n")
    with pytest.raises(ParseError):
        load_config(str(p))


def test_example_config_loads():
    example = Path(__file__).resolve().parent.parent / "config.example.yml"
    config = RunConfig.resolve(_args(), load_config(str(example)))
    assert config.caps == Caps()
    assert config.seed == 0


def test_defaults():
    config = RunConfig.resolve(_args())
    assert config.caps == Caps()
    assert config.fmt == "json"
    assert config.trials is None


def test_precedence_flag_env_file():
    file_config = {"caps": {"max_dim": 10, "max_vars": 5}, "run": {"seed": 4, "format": "dot"}}
    env = {"DIMLIFT_MAX_DIM": "20"}

    config = RunConfig.resolve(_args(), file_config, env)
    assert config.max_dim == 20
    assert config.max_vars == 5
    assert config.seed == 4
    assert config.fmt == "dot"

    config = RunConfig.resolve(_args(max_dim=30, seed=9), file_config, env)
    assert config.max_dim == 30
    assert config.seed == 9


def test_caps_must_be_positive():
    with pytest.raises(InputError):
        RunConfig.resolve(_args(max_vars=0))
    with pytest.raises(InputError):
        RunConfig.resolve(_args(), environ={"DIMLIFT_MAX_DIM": "lots"})


def test_sections_must_be_mappings():
    with pytest.raises(ParseError):
        RunConfig.resolve(_args(), {"caps": [1, 2]})


def test_header():
    header = RunConfig.resolve(_args(seed=5)).to_header("0.1.0")
    assert header["tool"] == "dimlift"
    assert header["seed"] == 5
    assert header["caps"]["max_vars"] == 12
