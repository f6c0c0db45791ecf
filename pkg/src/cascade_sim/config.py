#  -*- mode: python; mode: fold -*-
#
#  License: MIT
#
#  Part of cascade-sim
#
#  See the README.md in the repository for more info
#
#  Parameter document:
#
#    {"a": {"g": .., "kappa": .., "kappa_loss": .., "gamma": .., "delta": ..},
#     "b": {...},
#     "phi": ..}                      phi optional, defaults to 0
#
#  Every error message starts with the key path of the offending entry.
#

"""JSON parameter documents"""

import hashlib
import json
import math
from typing import Any, Mapping

from .exceptions import ConfigError, InvalidParameterError
from .model import CascadeParams, SubsystemParams

SUBSYSTEM_KEYS = ("g", "kappa", "kappa_loss", "gamma", "delta")
TOP_KEYS = ("a", "b", "phi")


def _number(path: str, value: Any) -> float:
    #  bool is an int subclass, json true/false must not pass as 1/0
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {json.dumps(value)}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{path}: must be finite, got {value}")
    return value


def _subsystem(path: str, doc: Any) -> SubsystemParams:
    if not isinstance(doc, Mapping):
        raise ConfigError(f"{path}: expected an object")
    for key in doc:
        if key not in SUBSYSTEM_KEYS:
            raise ConfigError(f"{path}.{key}: unknown key")
    values = {}
    for key in SUBSYSTEM_KEYS:
        if key not in doc:
            raise ConfigError(f"{path}.{key}: missing")
        values[key] = _number(f"{path}.{key}", doc[key])
        if key != "delta" and values[key] < 0:
            raise ConfigError(f"{path}.{key}: must be >= 0, got {values[key]}")
    try:
        return SubsystemParams(**values)
    except InvalidParameterError as exc:
        raise ConfigError(f"{path}: {exc.message}") from exc


def parse_config(doc: Any) -> CascadeParams:
    """CascadeParams from an already decoded document"""
    if not isinstance(doc, Mapping):
        raise ConfigError("<root>: expected an object")
    for key in doc:
        if key not in TOP_KEYS:
            raise ConfigError(f"{key}: unknown key")
    for key in ("a", "b"):
        if key not in doc:
            raise ConfigError(f"{key}: missing")
    phi = _number("phi", doc["phi"]) if "phi" in doc else 0.0
    return CascadeParams(a=_subsystem("a", doc["a"]), b=_subsystem("b", doc["b"]), phi=phi)


def load_config(path: str) -> CascadeParams:
    """Read and validate the JSON document at path"""
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as exc:
        raise ConfigError(f"<file>: cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"<file>: invalid JSON in {path}: {exc.msg} line {exc.lineno}"
        ) from exc
    return parse_config(doc)


def canonical_json(doc: Mapping[str, Any]) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def config_digest(p: CascadeParams) -> str:
    """sha256 of the canonical form of the validated parameters"""
    return hashlib.sha256(canonical_json(p.as_dict())).hexdigest()

