"""
Run configuration.

Values come from CLI flags, the DIMLIFT_MAX_DIM environment variable, the
`caps:` and `run:` sections of a YAML file, and built-in defaults, in that
order of precedence.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

import yaml

from .errors import InputError, ParseError
from .exactnum import (
    DEFAULT_MAX_DIM,
    DEFAULT_MAX_POSET_ELEMENTS,
    DEFAULT_MAX_VARS,
    DEFAULT_POWERSET_CAP,
    Caps,
)

ENV_MAX_DIM = "DIMLIFT_MAX_DIM"
CAP_KEYS = ("max_dim", "max_vars", "powerset_cap", "max_poset_elements")


def load_config(config_path: Optional[str]) -> dict:
    """Load configuration from YAML file; a missing file gives {}."""
    if not config_path:
        return {}
    path = Path(config_path)
    if not path.exists():
        return {}
    try:
        with open(path) as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ParseError(
            f"invalid YAML: {getattr(e, 'problem', None) or e}",
            line=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None,
            source=str(path),
        ) from e
    if not isinstance(data, dict):
        raise ParseError("config file must be a mapping", source=str(path))
    return data


def _positive_int(name: str, value) -> int:
    if isinstance(value, bool):
        raise InputError(f"{name} must be a positive integer, got {value!r}")
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a positive integer, got {value!r}") from None
    if number <= 0 or (isinstance(value, float) and value != number):
        raise InputError(f"{name} must be a positive integer, got {value!r}")
    return number


@dataclass
class RunConfig:
    command: str = ""
    inputs: list[str] = field(default_factory=list)
    seed: int = 0
    max_dim: int = DEFAULT_MAX_DIM
    max_vars: int = DEFAULT_MAX_VARS
    powerset_cap: int = DEFAULT_POWERSET_CAP
    max_poset_elements: int = DEFAULT_MAX_POSET_ELEMENTS
    out: Optional[str] = None
    fmt: str = "json"
    trials: Optional[int] = None

    def __post_init__(self):
        for key in CAP_KEYS:
            setattr(self, key, _positive_int(key, getattr(self, key)))
        if self.fmt not in ("json", "dot"):
            raise InputError(f"format must be 'json' or 'dot', got {self.fmt!r}")
        if self.trials is not None:
            self.trials = _positive_int("trials", self.trials)

    @property
    def caps(self) -> Caps:
        return Caps(
            max_dim=self.max_dim,
            max_vars=self.max_vars,
            powerset_cap=self.powerset_cap,
            max_poset_elements=self.max_poset_elements,
        )

    @classmethod
    def resolve(
        cls,
        args: argparse.Namespace,
        file_config: Optional[Mapping] = None,
        environ: Optional[Mapping[str, str]] = None,
    ) -> "RunConfig":
        file_config = file_config or {}
        environ = environ or {}
        caps_section = file_config.get("caps") or {}
        run_section = file_config.get("run") or {}
        if not isinstance(caps_section, Mapping) or not isinstance(run_section, Mapping):
            raise ParseError("'caps' and 'run' sections must be mappings")

        values: dict = {}
        for key in CAP_KEYS:
            if key in caps_section:
                values[key] = caps_section[key]
        for key in ("seed", "trials", "out"):
            if key in run_section:
                values[key] = run_section[key]
        if "format" in run_section:
            values["fmt"] = run_section["format"]
        if environ.get(ENV_MAX_DIM):
            values["max_dim"] = environ[ENV_MAX_DIM]

        for key in CAP_KEYS + ("seed", "trials", "out", "fmt"):
            flag = getattr(args, key, None)
            if flag is not None:
                values[key] = flag

        seed = values.pop("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int):
            try:
                seed = int(seed)
            except (TypeError, ValueError):
                raise InputError(f"seed must be an integer, got {seed!r}") from None
        return cls(
            command=getattr(args, "command", "") or "",
            inputs=list(getattr(args, "inputs", None) or []),
            seed=seed,
            **values,
        )

    def to_header(self, version: str) -> dict:
        """The header block written at the top of JSON output."""
        return {
            "tool": "dimlift",
            "version": version,
            "seed": self.seed,
            "caps": self.caps.to_dict(),
        }
