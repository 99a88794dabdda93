"""Run configuration: flat key=value files, overrides, canonical digests.

The config format is a flat text file of `key = value` lines (# comments and
blank lines ignored). Command-line overrides win over file values. A sha256
digest over the physics/numerics keys ties checkpoints to the configuration
that produced them; output locations, t_end and serialization toggles are
excluded so a run can be resumed to a later time or from a relocated
directory.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

ENV_OUTPUT_DIR = "MHD2B_OUTPUT_DIR"


class ConfigError(ValueError):
    """Malformed configuration input."""


@dataclass
class RunConfig:
    n: int = 64
    beta: float = 1.5
    t_end: float = 1.0
    output_interval: float = 0.01
    checkpoint_interval: float = 0.5
    cfl_number: float = 0.4
    dt_max: float = 0.01
    dealias_fraction: float = 2.0 / 3.0
    ic: str = "orszag_tang_like"
    ic_seed: int = 0
    ic_params: dict = field(default_factory=dict)
    q_list: list = field(default_factory=lambda: [2.0, 4.0])
    s_list: list = field(default_factory=list)
    r_list: list = field(default_factory=lambda: [2.0, 4.0])
    nonlinear_enabled: bool = True
    diffusion_enabled: bool = True
    determinism: bool = True
    ndjson: bool = False
    output_dir: str | None = None

    def __post_init__(self):
        if self.t_end < 0.0:
            raise ConfigError(f"t_end must be >= 0, got {self.t_end!r}")
        if self.output_interval <= 0.0:
            raise ConfigError(f"output_interval must be > 0, got {self.output_interval!r}")
        if self.checkpoint_interval <= 0.0:
            raise ConfigError(
                f"checkpoint_interval must be > 0, got {self.checkpoint_interval!r}"
            )
        if not (0.0 < self.beta <= 2.0):
            raise ConfigError(f"beta must lie in (0, 2], got {self.beta!r}")
        if not (0.0 < self.cfl_number <= 1.0):
            raise ConfigError(f"cfl_number must lie in (0, 1], got {self.cfl_number!r}")
        if self.dt_max <= 0.0:
            raise ConfigError(f"dt_max must be > 0, got {self.dt_max!r}")

    def resolved_output_dir(self) -> Path:
        if self.output_dir:
            return Path(self.output_dir)
        return Path(os.environ.get(ENV_OUTPUT_DIR, "mhd2b_out"))


# keys excluded from the checkpoint digest (locations, horizons, mirrors)
_DIGEST_EXCLUDE = {"output_dir", "t_end", "ndjson"}

_LIST_KEYS = {"q_list", "s_list", "r_list"}
_BOOL_KEYS = {"nonlinear_enabled", "diffusion_enabled", "determinism", "ndjson"}
_INT_KEYS = {"n", "ic_seed"}
_STR_KEYS = {"ic", "output_dir"}
_IC_PARAM_PREFIX = "ic_"
_IC_PARAM_KEYS = {"amplitude", "kmax", "slope", "amp_omega", "amp_b"}


def _parse_scalar(key: str, raw: str):
    raw = raw.strip()
    if key in _BOOL_KEYS:
        if raw.lower() in ("true", "1", "yes", "on"):
            return True
        if raw.lower() in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError as err:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}") from err
    if key in _STR_KEYS:
        return raw
    if key in _LIST_KEYS:
        if not raw:
            return []
        try:
            return [math.inf if v.strip() == "inf" else float(v) for v in raw.split(",")]
        except ValueError as err:
            raise ConfigError(f"{key}: expected comma-separated numbers, got {raw!r}") from err
    try:
        return float(raw)
    except ValueError as err:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from err


def parse_config_text(text: str) -> dict:
    """Parse `key = value` lines into a raw option dict."""
    options: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        options[key] = raw
    return options


def build_config(options: dict[str, str]) -> RunConfig:
    """Turn raw string options into a validated RunConfig."""
    kwargs: dict = {}
    ic_params: dict = {}
    valid_keys = set(RunConfig.__dataclass_fields__) - {"ic_params"}
    for key, raw in options.items():
        if key.startswith(_IC_PARAM_PREFIX) and key[len(_IC_PARAM_PREFIX):] in _IC_PARAM_KEYS:
            ic_params[key[len(_IC_PARAM_PREFIX):]] = float(raw)
        elif key in valid_keys:
            kwargs[key] = _parse_scalar(key, str(raw))
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    return RunConfig(ic_params=ic_params, **kwargs)


def load_config(path: Path | None = None, overrides: dict[str, str] | None = None) -> RunConfig:
    options: dict = {}
    if path is not None:
        try:
            options.update(parse_config_text(Path(path).read_text()))
        except OSError as err:
            raise ConfigError(f"cannot read config file {path}: {err}") from err
    if overrides:
        options.update(overrides)
    return build_config(options)


def config_to_text(cfg: RunConfig) -> str:
    """Canonical snapshot: sorted keys, repr values (round-trips bitwise)."""
    items: dict[str, str] = {}
    for key, fdef in cfg.__dataclass_fields__.items():
        val = getattr(cfg, key)
        if key == "ic_params":
            for pk in sorted(val):
                items[_IC_PARAM_PREFIX + pk] = repr(float(val[pk]))
        elif key in _LIST_KEYS:
            items[key] = ",".join("inf" if v == math.inf else repr(float(v)) for v in val)
        elif key in _BOOL_KEYS:
            items[key] = "true" if val else "false"
        elif val is None:
            continue
        elif isinstance(val, float):
            items[key] = repr(val)
        else:
            items[key] = str(val)
    return "\n".join(f"{k} = {items[k]}" for k in sorted(items)) + "\n"


def config_digest(cfg: RunConfig) -> bytes:
    """sha256 over the digest-relevant canonical lines (32 bytes)."""
    lines = [
        line
        for line in config_to_text(cfg).splitlines()
        if line.split(" =", 1)[0] not in _DIGEST_EXCLUDE
    ]
    return hashlib.sha256("\n".join(lines).encode()).digest()


def with_overrides(cfg: RunConfig, **kwargs) -> RunConfig:
    return replace(cfg, **kwargs)
