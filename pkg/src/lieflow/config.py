"""Run configuration: JSON schema, validation and construction of objects."""

from __future__ import annotations

import hashlib
import json
from typing import Any

import jsonschema
import numpy as np

from . import library
from .fourier import FourierCoefficients, constant
from .generator import Characteristics, LevyMeasure, ModulatedKernel, PowerDensity
from .groups import Chart, GroupId, haar_quadrature, exp_params, resolution_rule

SCHEMA_ID = "lieflow/1"

_number = {"type": "number"}
_vector = {"type": "array", "items": _number}

_coefficient = {
    "type": "object",
    "properties": {
        "weight": {"oneOf": [{"type": "integer"}, {"type": "array", "items": {"type": "integer"}, "minItems": 1}]},
        "matrix": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}},
        },
    },
    "required": ["weight", "matrix"],
    "additionalProperties": False,
}

_spec = {
    "oneOf": [
        _number,
        {"type": "string"},
        {
            "type": "object",
            "properties": {
                "name": {"type": "string"},
                "scale": _number,
                "offset": _number,
                "radius": {"type": "number", "exclusiveMinimum": 0},
                "center": _vector,
                "rate": _number,
            },
            "required": ["name"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "coefficients": {"type": "array", "items": _coefficient},
                "real": {"type": "boolean"},
                "cutoff": _number,
            },
            "required": ["coefficients"],
            "additionalProperties": False,
        },
    ]
}

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "lieflow run configuration",
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA_ID},
        "group": {"enum": ["torus", "su2"]},
        "dim": {"type": "integer", "minimum": 1},
        "chart_radius": {"type": "number", "exclusiveMinimum": 0},
        "max_weight_norm": {"type": "number", "minimum": 0},
        "resolution": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "function": _spec,
        "points": {"type": "array", "items": _vector},
        "t": _number,
        "characteristics": {
            "type": "object",
            "properties": {
                "c": _spec,
                "b": {"type": "array", "items": _spec},
                "a": {"type": "array", "items": {"type": "array", "items": _spec}},
                "levy": {
                    "type": "object",
                    "properties": {
                        "atoms": {
                            "type": "array",
                            "items": {
                                "type": "object",
                                "properties": {"w": _number, "point": _vector},
                                "required": ["w", "point"],
                                "additionalProperties": False,
                            },
                        },
                        "density": {
                            "type": "object",
                            "properties": {
                                "kind": {"const": "power"},
                                "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 2},
                                "eps": {"type": "number", "exclusiveMinimum": 0},
                                "scale": {"type": "number", "minimum": 0},
                                "outer": {"type": "number", "exclusiveMinimum": 0},
                                "n_radial": {"type": "integer", "minimum": 1},
                                "n_angular": {"type": "integer", "minimum": 1},
                            },
                            "required": ["kind", "alpha", "eps"],
                            "additionalProperties": False,
                        },
                        "modulation": _spec,
                    },
                    "additionalProperties": False,
                },
            },
            "additionalProperties": False,
        },
        "simulation": {
            "type": "object",
            "properties": {
                "t": {"type": "number", "exclusiveMinimum": 0},
                "steps": {"type": "integer", "minimum": 1},
                "paths": {"type": "integer", "minimum": 1},
                "start": _vector,
            },
            "additionalProperties": False,
        },
        "pmp": {
            "type": "object",
            "properties": {
                "corpus_seed": {"type": "integer", "minimum": 0},
                "n_functions": {"type": "integer", "minimum": 1},
                "tol": {"type": "number", "minimum": 0},
                "grid": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "extraction": {
            "type": "object",
            "properties": {
                "delta": {"type": "number", "exclusiveMinimum": 0},
                "resolution": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "config_hash": {"type": "string"},
    },
    "required": ["schema", "group"],
    "additionalProperties": False,
}


class ConfigError(Exception):
    """Invalid configuration (CLI exit code 2)."""


def load(text: str) -> dict:
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    validate(cfg)
    return cfg


def validate(cfg: Any) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"field {where}: {err.message}")
    if cfg["group"] == "su2" and "dim" in cfg and cfg["dim"] != 3:
        raise ConfigError("field dim: su2 has no dim parameter other than 3")


def config_hash(cfg: dict) -> str:
    body = {k: v for k, v in cfg.items() if k != "config_hash"}
    canon = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------


class Context:
    """Objects built from a validated configuration."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.group = GroupId.torus(cfg.get("dim", 1)) if cfg["group"] == "torus" else GroupId.su2()
        try:
            self.chart = Chart(cfg.get("chart_radius", 0.9 * np.pi))
        except ValueError as exc:
            raise ConfigError(f"field chart_radius: {exc}") from None
        self.max_norm = float(cfg.get("max_weight_norm", 8 if self.group.is_torus else 4))
        self.resolution = int(cfg.get("resolution", resolution_rule(self.group, self.max_norm)))
        self.seed = int(cfg.get("seed", 0))

    def function(self, spec=None) -> FourierCoefficients:
        spec = self.cfg.get("function", "cos_theta") if spec is None else spec
        return self._function(spec, "function")

    def _function(self, spec, where: str) -> FourierCoefficients:
        g = self.group
        try:
            if isinstance(spec, (int, float)):
                return constant(g, float(spec))
            if isinstance(spec, str):
                return library.named(g, spec, self.max_norm, self.resolution)
            if "coefficients" in spec:
                return coefficients_from_json(g, spec)
            opts = {k: spec[k] for k in ("radius", "center", "rate") if k in spec}
            f = library.named(g, spec["name"], self.max_norm, self.resolution, **opts)
            out = f * float(spec.get("scale", 1.0))
            if spec.get("offset", 0.0):
                out = out + constant(g, float(spec["offset"]))
            return out
        except ConfigError:
            raise
        except (ValueError, TypeError, IndexError) as exc:
            raise ConfigError(f"field {where}: {exc}") from None

    def _field(self, spec, where: str):
        if isinstance(spec, (int, float)):
            return float(spec), True
        return self._function(spec, where), False

    def characteristics(self) -> Characteristics:
        block = self.cfg.get("characteristics", {})
        g, dim = self.group, self.group.dim
        c, _ = self._field(block.get("c", 0.0), "characteristics/c")
        b_specs = block.get("b", [0.0] * dim)
        a_specs = block.get("a", [[0.0] * dim for _ in range(dim)])
        if len(b_specs) != dim:
            raise ConfigError(f"field characteristics/b: expected {dim} entries")
        if len(a_specs) != dim or any(len(row) != dim for row in a_specs):
            raise ConfigError(f"field characteristics/a: expected a {dim}x{dim} array")
        b_fields = [self._field(s, f"characteristics/b/{i}") for i, s in enumerate(b_specs)]
        a_fields = [[self._field(s, f"characteristics/a/{i}/{j}") for j, s in enumerate(row)]
                    for i, row in enumerate(a_specs)]
        b = _stack_field([v for v in b_fields], (dim,))
        a = _stack_field([v for row in a_fields for v in row], (dim, dim))
        mu = self._levy(block.get("levy", {}))
        return Characteristics(g, c=c, b=b, a=a, mu=mu, chart=self.chart)

    def _levy(self, block: dict):
        g = self.group
        atoms = []
        for i, atom in enumerate(block.get("atoms", [])):
            if len(atom["point"]) != g.dim:
                raise ConfigError(f"field characteristics/levy/atoms/{i}/point: expected {g.dim} entries")
            atoms.append((atom["w"], atom["point"]))
        density = None
        if "density" in block:
            d = dict(block["density"])
            d.pop("kind")
            density = PowerDensity(**d)
        mu = LevyMeasure.atoms(g, atoms, density)
        if "modulation" in block:
            m, _ = self._field(block["modulation"], "characteristics/levy/modulation")
            if isinstance(m, float):
                mod = lambda p, m=m: np.full(len(np.atleast_2d(p)), m)  # noqa: E731
            else:
                mod = m
            return ModulatedKernel(mu, mod)
        return mu

    def points(self) -> np.ndarray:
        if "points" in self.cfg:
            v = np.asarray(self.cfg["points"], dtype=float)
            if v.ndim != 2 or v.shape[1] != self.group.dim:
                raise ConfigError(f"field points: expected vectors of length {self.group.dim}")
            return exp_params(self.group, v)
        n = 8 if self.group.is_torus and self.group.d == 1 else 4
        return haar_quadrature(self.group, n).points


def _stack_field(items, shape):
    if all(is_const for _, is_const in items):
        return np.array([v for v, _ in items], dtype=float).reshape(shape)

    def field(points, items=items, shape=shape):
        n = len(np.atleast_2d(points))
        cols = [np.full(n, v) if is_const else np.asarray(v(points), dtype=float) for v, is_const in items]
        return np.stack(cols, axis=-1).reshape((n,) + shape)

    return field


def coefficients_from_json(group: GroupId, spec: dict) -> FourierCoefficients:
    entries = {}
    for item in spec["coefficients"]:
        label = item["weight"]
        label = (label,) if isinstance(label, int) else tuple(label)
        m = np.array([[complex(re, im) for re, im in row] for row in item["matrix"]])
        entries[label] = m
    out = FourierCoefficients(group, entries, spec.get("cutoff", 0.0), real=spec.get("real", True))
    if "cutoff" not in spec:
        out = FourierCoefficients(group, out.entries, out.band_limit, out.real)
    return out


def coefficients_to_json(f: FourierCoefficients) -> dict:
    items = []
    for lab in f.labels:
        m = f.entries[lab]
        items.append({
            "weight": list(lab),
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
        })
    return {"coefficients": items, "real": bool(f.real), "cutoff": float(f.cutoff)}
