"""Run configuration: schema, defaults and loading.

Configs are YAML (JSON is valid YAML). Unknown keys are rejected. Every
default mirrors the baseline parameters: kp_s = 5.6e-9 s/m,
kp_i = 5.2e-9 s/m, pump at extended phase matching, sigma = 1e9, crystal
length from the special condition.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from pathlib import Path

import re

import jsonschema
import yaml

from .errors import ConfigError

__all__ = ["SCHEMA", "DEFAULTS", "load_config", "resolve", "config_hash"]

_POS = {"type": "number", "exclusiveMinimum": 0}
_PROB = {"type": "number", "minimum": 0, "maximum": 1}
_AMP = {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": ["number", "string"]}}


def _obj(props: dict) -> dict:
    return {"type": "object", "additionalProperties": False, "properties": props}


SCHEMA = _obj({
    "profile": _obj({"kp_s": _POS, "kp_i": _POS, "kp_p": {"oneOf": [_POS, {"type": "null"}]}}),
    "sigma": _POS,
    "crystal": _obj({
        "L": {"oneOf": [_POS, {"const": "special"}]},
        "rabi_angle": {"type": "number", "minimum": 0},
    }),
    "frame": {"enum": ["centered", "entrance"]},
    "f2": _obj({"extent": {"type": "number", "minimum": 2, "maximum": 20},
                "rel_tol": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.1},
                "grid": {"oneOf": [{"type": "integer", "minimum": 16, "maximum": 4096}, {"type": "null"}]}}),
    "surface": _obj({"grid": {"type": "integer", "minimum": 2, "maximum": 5001},
                     "extent": _POS}),
    "poling": _obj({
        "n_list": {"type": "array", "minItems": 1,
                   "items": {"type": "integer", "minimum": 1, "maximum": 10000}},
        "method": {"enum": ["erf", "wedge"]},
        "flat_sinc": {"type": "boolean"},
    }),
    "gate": _obj({
        "p_odd": {"oneOf": [_PROB, {"type": "null"}]},
        "p_list": {"oneOf": [{"type": "array", "minItems": 1, "items": _PROB}, {"type": "null"}]},
        "trials": {"type": "integer", "minimum": 1, "maximum": 100_000_000},
        "bell_trials": {"type": "integer", "minimum": 1, "maximum": 100_000_000},
        "control": _AMP,
        "target": _AMP,
    }),
    "validate": _obj({"grid": {"type": "integer", "minimum": 16, "maximum": 4096}}),
    "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
})

DEFAULTS = {
    "profile": {"kp_s": 5.6e-9, "kp_i": 5.2e-9, "kp_p": None},
    "sigma": 1.0e9,
    "crystal": {"L": "special", "rabi_angle": math.pi / 2},
    "frame": "centered",
    "f2": {"extent": 6.0, "rel_tol": 1e-6, "grid": None},
    "surface": {"grid": 201, "extent": 2.0},
    "poling": {"n_list": [1, 2, 3, 5, 8, 13], "method": "erf", "flat_sinc": False},
    "gate": {"p_odd": None, "p_list": None, "trials": 100_000, "bell_trials": 100_000,
             "control": [0.6, 0.8], "target": [1, 0]},
    "validate": {"grid": 512},
    "seed": 0,
}


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads exponent floats without a dot (1e9)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"^[-+]?(?:[0-9][0-9_]*(?:\.[0-9_]*)?|\.[0-9_]+)(?:[eE][-+]?[0-9]+)?$|^[-+]?\.(?:inf|Inf|INF)$|^\.(?:nan|NaN|NAN)$"),
    list("-+0123456789."),
)


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _validate(doc) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at '{where}': {err.message}")


def load_config(path: str | Path | None) -> dict:
    """Read, validate and merge a config file over the defaults."""
    if path is None:
        return copy.deepcopy(DEFAULTS)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML/JSON: {exc}") from exc
    if doc is None:
        doc = {}
    _validate(doc)
    return _merge(DEFAULTS, doc)


def resolve(cfg: dict, *, seed=None, grid=None, tol=None, command: str = "") -> dict:
    """Apply command-line overrides; the result is what gets echoed and hashed."""
    cfg = copy.deepcopy(cfg)
    if seed is not None:
        cfg["seed"] = seed
    if tol is not None:
        cfg["f2"]["rel_tol"] = tol
    if grid is not None:
        section = {"validate": "validate", "f2-baseline": "f2"}.get(command, "surface")
        cfg[section]["grid"] = grid
    _validate(cfg)
    return cfg


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
