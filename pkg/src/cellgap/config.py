"""Numeric limits for the bounded searches.

Values come from, in increasing priority: the built-in defaults, a JSON
config file (``--config`` or ``$CELLGAP_CONFIG``), and the environment
variables ``CELLGAP_BOX`` / ``CELLGAP_MAX_STABILIZATION`` / ``CELLGAP_REGISTRY``.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .groupring import MalformedInputError


@dataclass(frozen=True)
class Config:
    # coefficient bound for candidate witness columns in class_is_trivial
    box: int = 4
    # largest free summand added while searching for a stable-freeness witness
    max_stabilization: int = 2
    # registry of known reduced K_0 groups; None means the shipped file
    registry: str | None = None

    def to_json(self) -> dict:
        return asdict(self)


_ENV = {"box": "CELLGAP_BOX", "max_stabilization": "CELLGAP_MAX_STABILIZATION",
        "registry": "CELLGAP_REGISTRY"}


def _coerce(name: str, value):
    if name == "registry":
        return None if value in (None, "") else str(value)
    try:
        out = int(value)
    except (TypeError, ValueError):
        raise MalformedInputError(f"config value {name!r} must be an integer") from None
    if out < 0:
        raise MalformedInputError(f"config value {name!r} must be nonnegative")
    return out


def load_config(path: str | Path | None = None, environ=None) -> Config:
    environ = os.environ if environ is None else environ
    cfg = Config()
    path = path or environ.get("CELLGAP_CONFIG")
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedInputError(f"cannot read config {path}: {exc}") from None
        known = {f.name for f in fields(Config)}
        unknown = set(data) - known
        if unknown:
            raise MalformedInputError(f"unknown config keys: {sorted(unknown)}")
        cfg = replace(cfg, **{k: _coerce(k, v) for k, v in data.items()})
    for name, var in _ENV.items():
        if var in environ:
            cfg = replace(cfg, **{name: _coerce(name, environ[var])})
    return cfg
