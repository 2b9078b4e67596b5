"""Analysis configuration: JSON schema, parsing and defaults."""
from __future__ import annotations

import copy
import json

import jsonschema

from .theory import VARIANT_NAMES


class ConfigError(ValueError):
    """Invalid or unreadable analysis configuration."""


_POS = {"type": "number", "exclusiveMinimum": 0}

_POINT = {
    "type": "object",
    "additionalProperties": False,
    "required": ["quantity", "x", "y", "z"],
    "properties": {
        "quantity": {"enum": ["u", "v", "w", "sxx", "syy", "sxy", "sxz", "syz"]},
        "x": {"type": "number", "minimum": 0, "maximum": 1},
        "y": {"type": "number", "minimum": 0, "maximum": 1},
        "z": {"type": "number", "minimum": -0.5, "maximum": 0.5},
        "side": {"enum": ["above", "below"]},
        "label": {"type": "string"},
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "cntplate analysis",
    "type": "object",
    "additionalProperties": False,
    "required": ["analysis", "geometry", "layup", "variant", "mesh"],
    "properties": {
        "name": {"type": "string"},
        "analysis": {"enum": ["static", "modal"]},
        "geometry": {
            "type": "object",
            "additionalProperties": False,
            "required": ["a"],
            "properties": {
                "a": _POS,
                "b": _POS,
                "h": _POS,
                "a_h": _POS,
                "a_b": _POS,
            },
            "oneOf": [{"required": ["h"]}, {"required": ["a_h"]}],
            "not": {"required": ["b", "a_b"]},
        },
        "layup": {
            "type": "object",
            "additionalProperties": False,
            "required": ["type", "v_star"],
            "properties": {
                "type": {"enum": ["single", "sandwich"]},
                "grading": {"enum": ["UD", "FG-V", "FG-X"]},
                "core_to_face": _POS,
                "distribution": {"enum": ["FG", "UD"]},
                "v_star": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5},
            },
        },
        "materials": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "cnt": {"type": "string"},
                "matrix": {"type": "string"},
                "core": {"type": "string"},
                "efficiency": {"type": "array", "items": _POS, "minItems": 3, "maxItems": 3},
                "library": {"type": "string"},
            },
        },
        "temperature": _POS,
        "variant": {"enum": list(VARIANT_NAMES)},
        "closure": {"enum": ["reduced", "full3d", "by-variant"]},
        "shear_factor": {"oneOf": [_POS, {"const": "auto"}]},
        "mesh": {
            "type": "object",
            "additionalProperties": False,
            "required": ["nx", "ny"],
            "properties": {
                "nx": {"type": "integer", "minimum": 1},
                "ny": {"type": "integer", "minimum": 1},
            },
        },
        "load": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "amplitude"],
            "properties": {
                "kind": {"enum": ["sinusoidal", "uniform", "thermal"]},
                "amplitude": {"type": "number", "not": {"const": 0}},
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "center_deflection": {"type": "boolean"},
                "table_quantities": {"type": "boolean"},
                "points": {"type": "array", "items": _POINT},
                "profiles": {
                    "type": "array",
                    "items": {"enum": ["u", "v", "w", "sxx", "sxz"]},
                    "uniqueItems": True,
                },
                "profile_samples": {"type": "integer", "minimum": 2},
                "n_modes": {"type": "integer", "minimum": 1},
                "nondim": {"enum": ["tables", "printed", "none"]},
                "thermal_stress": {"enum": ["subtract", "retain"]},
            },
        },
    },
}

DEFAULTS = {
    "materials": {"cnt": "SWCNT-10-10", "matrix": "PMMA", "core": "Ti-6Al-4V"},
    "temperature": 300.0,
    "closure": "reduced",
    "shear_factor": "auto",
    "outputs": {
        "center_deflection": True,
        "table_quantities": False,
        "points": [],
        "profiles": [],
        "profile_samples": 11,
        "n_modes": 6,
        "nondim": "tables",
        "thermal_stress": "subtract",
    },
}


def _check_semantics(cfg):
    lay = cfg["layup"]
    if lay["type"] == "single" and "grading" not in lay:
        raise ConfigError("layup.grading is required for a single-layer plate")
    if lay["type"] == "sandwich" and "core_to_face" not in lay:
        raise ConfigError("layup.core_to_face is required for a sandwich plate")
    if cfg["analysis"] == "static" and "load" not in cfg:
        raise ConfigError("static analysis needs a load block")


def validate(cfg: dict) -> dict:
    """Validate a raw config dict and return a copy with defaults filled in."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {err.message}")
    _check_semantics(cfg)
    out = copy.deepcopy(cfg)
    for key, value in DEFAULTS.items():
        if isinstance(value, dict):
            merged = copy.deepcopy(value)
            merged.update(out.get(key, {}))
            out[key] = merged
        else:
            out.setdefault(key, value)
    return out


def loads(text: str, source: str = "<string>") -> dict:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}"
        ) from exc
    return validate(raw)


def load(path) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return loads(text, str(path))


def dumps(cfg: dict) -> str:
    """Canonical JSON text of a config (sorted keys, fixed indent)."""
    return json.dumps(cfg, indent=2, sort_keys=True)


SWEEP_AXES = {
    "a_h": ("geometry", "a_h"),
    "core_to_face": ("layup", "core_to_face"),
    "v_star": ("layup", "v_star"),
    "temperature": ("temperature",),
    "variant": ("variant",),
}


def with_axis(cfg: dict, axis: str, value) -> dict:
    """Copy of ``cfg`` with one sweep axis set."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {sorted(SWEEP_AXES)}")
    out = copy.deepcopy(cfg)
    path = SWEEP_AXES[axis]
    node = out
    for key in path[:-1]:
        node = node.setdefault(key, {})
    node[path[-1]] = value
    if axis == "a_h":
        out["geometry"].pop("h", None)
    return out
