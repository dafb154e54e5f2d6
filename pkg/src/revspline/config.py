"""JSON problem configuration: schema, parsing and problem assembly."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import jsonschema
import numpy as np
import sympy

from .errors import ConfigError, ValidationError
from .geometry import (
    BoundarySpec,
    CapSpec,
    Generatrix,
    LayerGrid,
    Problem,
    make_layer_grid,
    sample_to_trigpoly,
    uniform_layer_grid,
    validate_problem,
)
from .polyharmonic import PolyharmonicFn, TrigPoly

_NUM = {"type": "number"}
_NUMS = {"type": "array", "items": _NUM}
_REF_FLAG = {"type": "boolean"}

_CAP = {
    "oneOf": [
        {"type": "object", "additionalProperties": False, "required": ["kind"],
         "properties": {"kind": {"const": "vertex"}, "value": _NUM, "from_reference": _REF_FLAG}},
        {"type": "object", "additionalProperties": False, "required": ["kind"],
         "properties": {"kind": {"const": "disk"},
                        "alpha": {"type": "array", "items": _NUMS},
                        "beta": {"type": "array", "items": _NUMS},
                        "from_reference": _REF_FLAG,
                        "degree": {"type": "integer", "minimum": 0},
                        "radial_order": {"type": "integer", "minimum": 0}}},
    ]
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["geometry", "levels", "boundary", "method"],
    "properties": {
        "geometry": {
            "type": "object", "additionalProperties": False, "required": ["kind"],
            "properties": {
                "kind": {"enum": ["sphere", "cone", "cylinder", "sampled"]},
                "parameters": {"type": "object"},
                "axis_interval": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
            },
        },
        "levels": {
            "oneOf": [
                _NUMS,
                {"type": "object", "additionalProperties": False, "required": ["uniform"],
                 "properties": {"uniform": {"type": "integer", "minimum": 1}}},
            ]
        },
        "reference": {"type": "string"},
        "boundary": {
            "type": "object", "additionalProperties": False, "required": ["cap_low", "cap_high"],
            "properties": {
                "levels": {
                    "type": "array",
                    "items": {
                        "type": "object", "additionalProperties": False, "required": ["cos"],
                        "properties": {
                            "h": _NUM, "cos": _NUMS, "sin": _NUMS,
                            "constant_convention": {"enum": ["plain", "halved"]},
                        },
                    },
                },
                "from_reference": {
                    "type": "object", "additionalProperties": False,
                    "properties": {"degree": {"type": "integer", "minimum": 0},
                                   "samples": {"type": "integer", "minimum": 1}},
                },
                "cap_low": _CAP,
                "cap_high": _CAP,
            },
        },
        "method": {
            "type": "object", "additionalProperties": False, "required": ["kind"],
            "properties": {
                "kind": {"enum": ["linear", "ends", "smoothing"]},
                "order": {"type": "integer", "minimum": 0},
                "direction": {"enum": ["up", "down"]},
                "alpha": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
        "external": {
            "type": "object", "additionalProperties": False,
            "properties": {"kelvin": {"type": "boolean"}, "samples": {"type": "integer", "minimum": 2}},
        },
        "output": {
            "type": "object", "additionalProperties": False,
            "properties": {"grid": {"type": "string", "pattern": r"^\d+x\d+x\d+$"},
                           "formats": {"type": "array", "items": {"enum": ["csv", "vtk"]}}},
        },
    },
}

_GEOMETRY_PARAMS = {
    "sphere": {"radius"},
    "cone": {"apex", "slope"},
    "cylinder": {"radius"},
    "sampled": {"samples"},
}
_GEOMETRY_OPTIONAL = {"sphere": {"center"}, "cone": set(), "cylinder": set(), "sampled": set()}


@dataclass(frozen=True)
class Reference:
    """Closed-form function of ``x, y, h`` given as a sympy expression."""

    text: str
    expr: sympy.Expr
    value: Callable
    gradient: Callable

    def __call__(self, x, y, h):
        out = self.value(x, y, h)
        return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast(x, y, h).shape).copy()


def parse_reference(text: str) -> Reference:
    x, y, h = sympy.symbols("x y h", real=True)
    try:
        expr = sympy.sympify(text, locals={"x": x, "y": y, "h": h})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise ConfigError(f"cannot parse reference expression {text!r}: {exc}") from exc
    extra = expr.free_symbols - {x, y, h}
    if extra:
        raise ConfigError(f"reference expression uses unknown symbols {sorted(map(str, extra))}")
    value = sympy.lambdify((x, y, h), expr, "numpy")
    grads = [sympy.lambdify((x, y, h), sympy.diff(expr, v), "numpy") for v in (x, y, h)]

    def gradient(px, py, ph):
        shape = np.broadcast(px, py, ph).shape
        return tuple(np.broadcast_to(np.asarray(g(px, py, ph), dtype=float), shape).copy() for g in grads)

    return Reference(text, expr, value, gradient)


@dataclass(frozen=True, eq=False)
class ProblemConfig:
    """Parsed configuration; ``problem`` is ready for the solver (or for inversion)."""

    raw: dict
    generatrix: Generatrix
    grid: LayerGrid
    level_data: tuple[TrigPoly, ...]
    cap_low: CapSpec
    cap_high: CapSpec
    reference: Reference | None
    method: dict
    kelvin: bool
    kelvin_samples: int
    output: dict

    def problem(self) -> Problem:
        return validate_problem(self.generatrix, self.grid,
                                BoundarySpec(self.level_data, self.cap_low, self.cap_high))

    @property
    def levels(self) -> np.ndarray:
        return self.grid.levels


def load_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from exc


def check_schema(raw: dict) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    e = jsonschema.exceptions.best_match(validator.iter_errors(raw))
    if e is not None:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"schema violation at {where}: {e.message}")


def _build_generatrix(geo: dict) -> Generatrix:
    kind = geo["kind"]
    params = dict(geo.get("parameters", {}))
    missing = _GEOMETRY_PARAMS[kind] - params.keys()
    unknown = params.keys() - _GEOMETRY_PARAMS[kind] - _GEOMETRY_OPTIONAL[kind]
    if missing or unknown:
        raise ConfigError(f"geometry {kind}: missing {sorted(missing)}, unknown {sorted(unknown)}")
    interval = geo.get("axis_interval")
    if kind == "sampled":
        g = Generatrix.sampled(params["samples"])
        if interval is not None and (interval[0] != g.A or interval[1] != g.B):
            raise ValidationError("interval-mismatch", "axis_interval differs from the sampled abscissae")
        return g
    if kind == "sphere":
        A, B = (None, None) if interval is None else interval
        return Generatrix.sphere(params["radius"], params.get("center", 0.0), A, B)
    if interval is None:
        raise ConfigError(f"geometry {kind} needs axis_interval")
    if kind == "cone":
        return Generatrix.cone(params["apex"], params["slope"], *interval)
    return Generatrix.cylinder(params["radius"], *interval)


def _grid(spec, g: Generatrix) -> LayerGrid:
    if isinstance(spec, dict):
        return uniform_layer_grid(g.A, g.B, spec["uniform"])
    return make_layer_grid(g.A, g.B, spec)


def _need_reference(ref: Reference | None, what: str) -> Reference:
    if ref is None:
        raise ConfigError(f"{what} uses from_reference but no reference expression is given")
    return ref


def _fit_disk(ref: Reference, h: float, R: float, degree: int, order: int) -> PolyharmonicFn:
    """Least-squares fit of ``ref(., ., h)`` on the disk of radius ``R``."""
    xg, _ = np.polynomial.legendre.leggauss(2 * (degree + 2 * order) + 4)
    r = 0.5 * R * (xg + 1.0)
    th = 2.0 * np.pi * np.arange(4 * degree + 4) / (4 * degree + 4)
    rr, tt = (a.ravel() for a in np.meshgrid(r, th, indexing="ij"))
    cols, index = [], []
    for k in range(degree + 1):
        for p in range(order + 1):
            cols.append(rr ** (k + 2 * p) * np.cos(k * tt))
            index.append(("a", k, p))
            if k > 0:
                cols.append(rr ** (k + 2 * p) * np.sin(k * tt))
                index.append(("b", k, p))
    vals = ref(rr * np.cos(tt), rr * np.sin(tt), np.full_like(rr, h))
    coef = np.linalg.lstsq(np.column_stack(cols), vals, rcond=None)[0]
    alpha = np.zeros((degree + 1, order + 1))
    beta = np.zeros_like(alpha)
    for c, (which, k, p) in zip(coef, index):
        (alpha if which == "a" else beta)[k, p] = c
    return PolyharmonicFn(alpha, beta)


def _cap(spec: dict, end: str, g: Generatrix, ref: Reference | None) -> CapSpec:
    h = g.A if end == "low" else g.B
    if spec["kind"] == "vertex":
        if spec.get("from_reference"):
            return CapSpec.vertex(float(_need_reference(ref, f"cap_{end}")(0.0, 0.0, h)))
        if "value" not in spec:
            raise ConfigError(f"cap_{end}: vertex needs value or from_reference")
        return CapSpec.vertex(spec["value"])
    if spec.get("from_reference"):
        R = float(g.radius(h))
        return CapSpec.disk(_fit_disk(_need_reference(ref, f"cap_{end}"), h, R,
                                      spec.get("degree", 4), spec.get("radial_order", 0)))
    if "alpha" not in spec:
        raise ConfigError(f"cap_{end}: disk needs alpha (and optional beta) or from_reference")
    try:
        alpha = np.array(spec["alpha"], dtype=float)
        beta = np.array(spec.get("beta", np.zeros_like(alpha)), dtype=float)
        return CapSpec.disk(PolyharmonicFn(alpha, beta))
    except ValueError as exc:
        raise ConfigError(f"cap_{end}: {exc}") from exc


def _level_data(bnd: dict, g: Generatrix, levels: np.ndarray, ref: Reference | None) -> tuple[TrigPoly, ...]:
    if "levels" in bnd and "from_reference" in bnd:
        raise ConfigError("boundary: give either levels or from_reference, not both")
    if "from_reference" in bnd:
        ref = _need_reference(ref, "boundary")
        degree = bnd["from_reference"].get("degree", 8)
        n = bnd["from_reference"].get("samples", 4 * degree + 4)
        th = 2.0 * np.pi * np.arange(n) / n
        out = []
        for h in levels:
            R = float(g.radius(h))
            vals = ref(R * np.cos(th), R * np.sin(th), np.full_like(th, h))
            out.append(sample_to_trigpoly(np.column_stack([th, vals]), degree))
        return tuple(out)
    entries = bnd.get("levels", [])
    if len(entries) != levels.size:
        raise ValidationError("count-mismatch", f"{levels.size} levels but {len(entries)} boundary entries")
    out = []
    for j, e in enumerate(entries):
        if "h" in e and abs(e["h"] - levels[j]) > 1e-12 * (g.B - g.A):
            raise ValidationError("level-data-mismatch", f"boundary entry {j} is for h={e['h']}, level is {levels[j]}")
        sin = e.get("sin", [])
        out.append(TrigPoly.from_coeffs(e["cos"], sin, e.get("constant_convention", "plain")))
    return tuple(out)


def parse_config(raw: dict) -> ProblemConfig:
    """Schema-check ``raw`` and build every problem ingredient."""
    check_schema(raw)
    ref = parse_reference(raw["reference"]) if "reference" in raw else None
    g = _build_generatrix(raw["geometry"])
    grid = _grid(raw["levels"], g)
    levels = grid.levels
    bnd = raw["boundary"]
    ext = raw.get("external", {})
    return ProblemConfig(
        raw=raw,
        generatrix=g,
        grid=grid,
        level_data=_level_data(bnd, g, levels, ref),
        cap_low=_cap(bnd["cap_low"], "low", g, ref),
        cap_high=_cap(bnd["cap_high"], "high", g, ref),
        reference=ref,
        method=dict(raw["method"]),
        kelvin=bool(ext.get("kelvin", False)),
        kelvin_samples=int(ext.get("samples", 129)),
        output=dict(raw.get("output", {})),
    )


def load_config(path: str | Path) -> ProblemConfig:
    return parse_config(load_json(path))
