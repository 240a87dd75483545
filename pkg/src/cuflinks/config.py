"""Tool configuration: defaults, config file, environment, flags.

The config file is a flat sequence of ``key = "value"`` lines (a strict
subset of TOML), project-local by convention as ``cuflinks.toml``.
Precedence, lowest to highest: built-in defaults, config file,
environment variables, command-line flags. Path-valued settings are
absolute after loading.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping

from cuflinks.errors import ConfigError

CONFIG_FILENAME = "cuflinks.toml"

_LINE_RE = re.compile(r'^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*"([^"]*)"\s*$')

_ENV_PREFIX = "CUFLINKS_"

_PATH_KEYS = ("store", "ledger", "dictionary")
_INT_KEYS = ("parallelism",)


@dataclass(frozen=True)
class Config:
    resolver_url: str | None = None
    registry_token: str | None = None
    algorithms: str = "sha256"
    parallelism: int = 4
    store: str | None = None
    ledger: str = "cuflinks-ledger.jsonl"
    dictionary: str | None = None

    def algorithm_list(self) -> tuple[str, ...]:
        return tuple(part.strip().lower()
                     for part in self.algorithms.split(",")
                     if part.strip())


def _parse_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for number, line in enumerate(path.read_text(encoding="utf-8")
                                  .split("\n"), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        match = _LINE_RE.match(stripped)
        if not match:
            raise ConfigError(
                f'{path}:{number}: expected key = "value", got {line!r}')
        values[match.group(1)] = match.group(2)
    return values


def load_config(config_file: Path | None = None,
                environ: Mapping[str, str] | None = None,
                overrides: Mapping[str, object] | None = None) -> Config:
    """Merge the three configuration layers over the defaults.

    With no explicit config_file, a ``cuflinks.toml`` in the working
    directory is used when present.
    """
    environ = os.environ if environ is None else environ
    known = {f.name for f in fields(Config)}
    merged: dict[str, object] = {}

    if config_file is None:
        candidate = Path.cwd() / CONFIG_FILENAME
        config_file = candidate if candidate.is_file() else None
    if config_file is not None:
        config_file = Path(config_file)
        if not config_file.is_file():
            raise ConfigError(f"config file {config_file} does not exist")
        for key, value in _parse_file(config_file).items():
            if key not in known:
                raise ConfigError(
                    f"{config_file}: unknown setting {key!r}")
            merged[key] = value

    for key in known:
        env_value = environ.get(_ENV_PREFIX + key.upper())
        if env_value is not None:
            merged[key] = env_value

    for key, value in (overrides or {}).items():
        if key not in known:
            raise ConfigError(f"unknown setting {key!r}")
        if value is not None:
            merged[key] = value

    for key in _INT_KEYS:
        if key in merged and not isinstance(merged[key], int):
            try:
                merged[key] = int(str(merged[key]))
            except ValueError as exc:
                raise ConfigError(
                    f"setting {key!r} must be an integer, got "
                    f"{merged[key]!r}") from exc
    defaults = Config()
    for key in _PATH_KEYS:
        value = merged.get(key)
        if value is None:
            value = getattr(defaults, key)
        if value:
            merged[key] = str(Path(str(value)).expanduser().resolve())

    config = Config(**merged)  # type: ignore[arg-type]
    if config.parallelism < 1:
        raise ConfigError("parallelism must be a positive integer")
    return config
