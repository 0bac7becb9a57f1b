"""Run configuration for the ``geoharm`` CLI (a single JSON document)."""

from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any, Dict, Union

import jsonschema

SUITES = ("metric", "geodesic", "harmonic", "hopf", "schwarz", "sharpness", "fuzz")

DEFAULT_TOLERANCES = {
    "closed_form": 1e-10,
    "ad_fd": 1e-6,
    "geodesic_y": 1e-9,
    "speed": 1e-7,
    "arclength": 1e-8,
    "residual": 1e-6,
    "control": 1e-3,
    "holomorphy": 1e-6,
    "square": 1e-8,
    "distance_identity": 1e-8,
    "path_independence": 1e-9,
    "margin": 1e-9,
    "sharpness": 1e-8,
    "gradient_sharpness": 1e-6,
    "covariance": 1e-6,
}

DEFAULTS: Dict[str, Any] = {
    "metric": {"profile": "hyperbolic", "chart_radius": 1.0},
    "suites": list(SUITES),
    "families": ["hyperbolic", "spherical"],
    "fuzz": {"seed": 42, "n_maps": 20, "n_points": 50, "degree_cap": 6},
    "samples": {
        "n_radii": 1000,
        "n_maps": 10,
        "n_points": 100,
        "n_random_metrics": 5,
        "geodesic_s_max": 5.0,
        "integrator_tol": 1e-12,
    },
    "tolerances": dict(DEFAULT_TOLERANCES),
    "sweep": {"family": "extremal", "kind": "hyperbolic", "r": 1.0, "seed": 0, "degree_cap": 6, "w": [0.0, 0.0]},
    "output_dir": "geoharm-out",
    "emit": {"csv": True, "json": True, "svg": False},
}

_POS = {"type": "number", "exclusiveMinimum": 0}
_COUNT = {"type": "integer", "minimum": 0}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "metric": {
            "type": "object",
            "additionalProperties": False,
            "required": ["profile"],
            "properties": {
                "profile": {"type": "string", "minLength": 1},
                "chart_radius": {"anyOf": [_POS, {"const": "inf"}]},
            },
        },
        "suites": {"type": "array", "items": {"enum": list(SUITES)}, "uniqueItems": True},
        "families": {
            "type": "array",
            "items": {"enum": ["hyperbolic", "spherical"]},
            "uniqueItems": True,
        },
        "fuzz": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
                "n_maps": _COUNT,
                "n_points": _COUNT,
                "degree_cap": {"type": "integer", "minimum": 1},
            },
        },
        "samples": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_radii": {"type": "integer", "minimum": 1},
                "n_maps": {"type": "integer", "minimum": 1},
                "n_points": {"type": "integer", "minimum": 1},
                "n_random_metrics": _COUNT,
                "geodesic_s_max": _POS,
                "integrator_tol": _POS,
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: _POS for k in DEFAULT_TOLERANCES},
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "family": {"enum": ["extremal", "random"]},
                "kind": {"enum": ["hyperbolic", "spherical"]},
                "r": _POS,
                "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
                "degree_cap": {"type": "integer", "minimum": 1},
                "w": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            },
        },
        "output_dir": {"type": "string", "minLength": 1},
        "emit": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": "boolean"} for k in ("csv", "json", "svg")},
        },
    },
}


class ConfigError(Exception):
    """Unreadable or invalid configuration."""


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "metric":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def validate(raw: dict) -> dict:
    """Validate a raw config and fill defaults."""
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from None
    return _merge(DEFAULTS, raw)


def load_config(path: Union[str, Path]) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return validate(raw)
