"""Problem definition: generatrix, level grid, caps and boundary data."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    InsufficientSamplesError,
    InvalidGeometryError,
    InvalidGridError,
    OutOfRangeError,
    ValidationError,
)
from .polyharmonic import PolyharmonicFn, TrigPoly

# Phi(endpoint) below VERTEX_RTOL * (radius scale) counts as a vertex.
VERTEX_RTOL = 1e-9
# consecutive edges closer than this fraction of (B - A) are rejected
MIN_STEP_RTOL = 1e-12

GENERATRIX_KINDS = ("sphere", "cone", "cylinder", "sampled")


@dataclass(frozen=True, eq=False)
class Generatrix:
    """Profile curve ``x = Phi(h)`` on the axis interval ``[A, B]``.

    Use the constructors :meth:`sphere`, :meth:`cone`, :meth:`cylinder` and
    :meth:`sampled` rather than the raw initializer.
    """

    kind: str
    A: float
    B: float
    params: dict = field(default_factory=dict)
    _spline: CubicSpline | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in GENERATRIX_KINDS:
            raise InvalidGeometryError(f"unknown generatrix kind {self.kind!r}")
        if not (np.isfinite(self.A) and np.isfinite(self.B) and self.A < self.B):
            raise InvalidGeometryError(f"axis interval must satisfy A < B, got [{self.A}, {self.B}]")
        if self.kind == "sampled" and self._spline is None:
            hs, rs = self.params["h"], self.params["r"]
            object.__setattr__(self, "_spline", CubicSpline(hs, rs, bc_type="natural"))

    @classmethod
    def sphere(cls, radius: float, center: float = 0.0, A: float | None = None,
               B: float | None = None) -> "Generatrix":
        if radius <= 0:
            raise InvalidGeometryError("sphere radius must be positive")
        A = center - radius if A is None else A
        B = center + radius if B is None else B
        if A < center - radius - 1e-12 * radius or B > center + radius + 1e-12 * radius:
            raise InvalidGeometryError("axis interval exceeds the sphere")
        return cls("sphere", float(A), float(B), {"radius": float(radius), "center": float(center)})

    @classmethod
    def cone(cls, apex: float, slope: float, A: float, B: float) -> "Generatrix":
        """``Phi(h) = slope * |h - apex|``; the apex must not lie inside (A, B)."""
        if slope <= 0:
            raise InvalidGeometryError("cone slope must be positive")
        if A < apex < B:
            raise InvalidGeometryError("cone apex lies strictly inside the axis interval")
        return cls("cone", float(A), float(B), {"apex": float(apex), "slope": float(slope)})

    @classmethod
    def cylinder(cls, radius: float, A: float, B: float) -> "Generatrix":
        if radius <= 0:
            raise InvalidGeometryError("cylinder radius must be positive")
        return cls("cylinder", float(A), float(B), {"radius": float(radius)})

    @classmethod
    def sampled(cls, samples: Sequence[tuple[float, float]]) -> "Generatrix":
        """Natural cubic interpolation through ``(h, radius)`` pairs."""
        arr = np.asarray(samples, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
            raise InvalidGeometryError("sampled generatrix needs at least two (h, radius) pairs")
        hs, rs = arr[:, 0], arr[:, 1]
        if np.any(np.diff(hs) <= 0):
            raise InvalidGeometryError("sampled generatrix abscissae must be strictly increasing")
        if np.any(rs < 0) or np.any(rs[1:-1] <= 0):
            raise InvalidGeometryError("sampled radii must be positive inside the interval")
        return cls("sampled", float(hs[0]), float(hs[-1]), {"h": hs, "r": rs})

    @property
    def radius_scale(self) -> float:
        if self.kind in ("sphere", "cylinder"):
            return self.params["radius"]
        if self.kind == "cone":
            return self.params["slope"] * max(abs(self.A - self.params["apex"]), abs(self.B - self.params["apex"]))
        return float(np.max(self.params["r"]))

    def radius(self, h):
        """``Phi(h)``; raises :class:`OutOfRangeError` outside ``[A, B]``."""
        h_arr = np.asarray(h, dtype=float)
        span = self.B - self.A
        tol = 1e-12 * span
        if np.any(h_arr < self.A - tol) or np.any(h_arr > self.B + tol):
            raise OutOfRangeError(f"h outside axis interval [{self.A}, {self.B}]")
        h_arr = np.clip(h_arr, self.A, self.B)
        if self.kind == "sphere":
            d = h_arr - self.params["center"]
            out = np.sqrt(np.maximum(self.params["radius"] ** 2 - d * d, 0.0))
        elif self.kind == "cone":
            out = self.params["slope"] * np.abs(h_arr - self.params["apex"])
        elif self.kind == "cylinder":
            out = np.full_like(h_arr, self.params["radius"])
        else:
            out = np.maximum(self._spline(h_arr), 0.0)
        return out if out.ndim else float(out)

    def is_vertex(self, end: str) -> bool:
        h = self.A if end == "low" else self.B
        return self.radius(h) < VERTEX_RTOL * self.radius_scale

    def mirrored(self) -> "Generatrix":
        """Generatrix of the body reflected by ``h -> A + B - h``."""
        s = self.A + self.B
        if self.kind == "sphere":
            return Generatrix("sphere", self.A, self.B,
                              {"radius": self.params["radius"], "center": s - self.params["center"]})
        if self.kind == "cone":
            return Generatrix("cone", self.A, self.B,
                              {"apex": s - self.params["apex"], "slope": self.params["slope"]})
        if self.kind == "cylinder":
            return self
        hs = (s - self.params["h"])[::-1]
        hs[0], hs[-1] = self.A, self.B
        return Generatrix.sampled(np.column_stack([hs, self.params["r"][::-1]]))


def generatrix_radius(g: Generatrix, h):
    return g.radius(h)


@dataclass(frozen=True)
class CapSpec:
    """Closure of the solid at an axis endpoint: a vertex value or end-disk data."""

    kind: str
    value: float | None = None
    data: PolyharmonicFn | None = None

    @classmethod
    def vertex(cls, value: float) -> "CapSpec":
        return cls("vertex", value=float(value))

    @classmethod
    def disk(cls, data: PolyharmonicFn) -> "CapSpec":
        return cls("disk", data=data)

    @property
    def radial_order(self) -> int:
        return 0 if self.kind == "vertex" else self.data.trimmed().radial_order


@dataclass(frozen=True, eq=False)
class LayerGrid:
    A: float
    B: float
    levels: np.ndarray

    @property
    def m(self) -> int:
        return self.levels.size

    @property
    def edges(self) -> np.ndarray:
        """``[A, h_1, ..., h_m, B]``."""
        return np.concatenate([[self.A], self.levels, [self.B]])

    @property
    def spacing(self) -> np.ndarray:
        return np.diff(self.edges)


def make_layer_grid(A: float, B: float, levels: Sequence[float]) -> LayerGrid:
    """Validated grid with explicit (possibly non-uniform) levels."""
    lv = np.asarray(levels, dtype=float).ravel()
    if lv.size < 1:
        raise InvalidGridError("empty-levels", "at least one level is required")
    if np.any(np.diff(lv) <= 0):
        raise InvalidGridError("levels-not-increasing", "levels not increasing")
    if not (A < lv[0] and lv[-1] < B):
        raise InvalidGridError("levels-outside-interval", f"levels must lie strictly inside ({A}, {B})")
    if np.min(np.diff(np.concatenate([[A], lv, [B]]))) < MIN_STEP_RTOL * (B - A):
        raise InvalidGridError("degenerate-step", "two consecutive planes practically coincide")
    lv.setflags(write=False)
    return LayerGrid(float(A), float(B), lv)


def uniform_layer_grid(A: float, B: float, m: int) -> LayerGrid:
    """Levels ``A + j t`` with ``t = (B - A)/(m + 1)``."""
    t = (B - A) / (m + 1)
    return make_layer_grid(A, B, A + t * np.arange(1, m + 1))


def sample_to_trigpoly(samples, degree: int) -> TrigPoly:
    """Least-squares trigonometric fit of degree ``degree`` to ``(theta, value)`` pairs."""
    arr = np.asarray(samples, dtype=float)
    theta, vals = arr[:, 0], arr[:, 1]
    ncol = 2 * degree + 1
    if theta.size < ncol:
        raise InsufficientSamplesError(f"need at least {ncol} samples for degree {degree}, got {theta.size}")
    k = np.arange(1, degree + 1)
    kt = np.multiply.outer(theta, k)
    design = np.hstack([np.ones((theta.size, 1)), np.cos(kt), np.sin(kt)])
    coef, _, rank, _ = np.linalg.lstsq(design, vals, rcond=None)
    if rank < ncol:
        raise InsufficientSamplesError("sample angles do not determine the fit (duplicates modulo 2 pi?)")
    return TrigPoly(coef[: degree + 1], np.concatenate([[0.0], coef[degree + 1:]]))


@dataclass(frozen=True, eq=False)
class BoundarySpec:
    level_data: tuple[TrigPoly, ...]
    cap_low: CapSpec
    cap_high: CapSpec


@dataclass(frozen=True, eq=False)
class Problem:
    """Sealed, validated problem; produce with :func:`validate_problem`."""

    generatrix: Generatrix
    grid: LayerGrid
    boundary: BoundarySpec

    @property
    def A(self) -> float:
        return self.grid.A

    @property
    def B(self) -> float:
        return self.grid.B

    @property
    def level_radii(self) -> np.ndarray:
        return np.asarray(self.generatrix.radius(self.grid.levels), dtype=float).reshape(-1)

    def mirrored(self) -> "Problem":
        """Same problem seen through ``h -> A + B - h`` (caps swapped)."""
        s = self.A + self.B
        grid = LayerGrid(self.A, self.B, (s - self.grid.levels)[::-1].copy())
        bnd = BoundarySpec(tuple(reversed(self.boundary.level_data)),
                           self.boundary.cap_high, self.boundary.cap_low)
        return Problem(self.generatrix.mirrored(), grid, bnd)


def validate_problem(g: Generatrix, grid: LayerGrid, b: BoundarySpec) -> Problem:
    """Check cross-object consistency and return a sealed :class:`Problem`."""
    if abs(grid.A - g.A) > 1e-12 * (g.B - g.A) or abs(grid.B - g.B) > 1e-12 * (g.B - g.A):
        raise ValidationError("interval-mismatch", "grid [A, B] differs from the generatrix axis interval")
    if len(b.level_data) != grid.m:
        raise ValidationError("count-mismatch",
                              f"{grid.m} levels but {len(b.level_data)} boundary polynomials")
    radii = np.atleast_1d(g.radius(grid.levels))
    if np.any(radii <= VERTEX_RTOL * g.radius_scale):
        raise ValidationError("nonpositive-radius", "section radius vanishes at a data level")
    for end, cap in (("low", b.cap_low), ("high", b.cap_high)):
        vertex = g.is_vertex(end)
        if cap.kind == "vertex" and not vertex:
            raise ValidationError("cap-mismatch", f"vertex cap at the {end} end but the section radius is positive")
        if cap.kind == "disk" and vertex:
            raise ValidationError("cap-mismatch", f"disk cap at the {end} end but the generatrix closes to a point")
        if cap.kind not in ("vertex", "disk"):
            raise ValidationError("cap-kind", f"unknown cap kind {cap.kind!r}")
    return Problem(g, grid, b)
