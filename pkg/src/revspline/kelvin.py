"""Exterior problems through inversion in the unit sphere centered at the origin.

If ``u`` is harmonic inside the inverted body then ``v(p) = u(p/|p|^2)/|p|`` is
harmonic outside the original one and decays like ``1/|p|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidGeometryError, NotRepresentableError, SingularPointError, SolverConfigError
from .geometry import BoundarySpec, CapSpec, Generatrix, Problem, make_layer_grid, validate_problem
from .polyharmonic import TrigPoly
from .solver import SplineSolution

DEFAULT_SAMPLES = 129
# |p| may undershoot 1 by this much before kelvin_evaluate complains
UNIT_RTOL = 1e-12


@dataclass(frozen=True)
class KelvinFrame:
    """Inversion sphere; fixed at the origin with unit radius."""

    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    radius: float = 1.0


def _norm_sq(p: np.ndarray) -> np.ndarray:
    return p[..., 0] * p[..., 0] + p[..., 1] * p[..., 1] + p[..., 2] * p[..., 2]


def invert_point(p) -> np.ndarray:
    """``p / |p|^2`` for a point or an ``(n, 3)`` array of points."""
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise ValueError("points must have three coordinates")
    rr = _norm_sq(p)
    if np.any(rr == 0.0):
        raise SingularPointError("inversion is undefined at the origin")
    return p / rr[..., None]


def kelvin_evaluate(inner_eval: Callable, p) -> np.ndarray | float:
    """``u(p/|p|^2)/|p|`` with ``u = inner_eval(x, y, h)``; requires ``|p| >= 1``."""
    p = np.asarray(p, dtype=float)
    q = invert_point(p)
    r = np.sqrt(_norm_sq(p))
    if np.any(r < 1.0 - UNIT_RTOL):
        raise InvalidGeometryError("exterior points must lie outside the unit ball")
    val = np.asarray(inner_eval(q[..., 0], q[..., 1], q[..., 2]), dtype=float) / r
    return val if val.ndim else float(val)


def invert_boundary_data(samples: Sequence[tuple[Sequence[float], float]]) -> list[tuple[np.ndarray, float]]:
    """Map each ``(s, U0)`` to ``(s/|s|^2, |s| U0)``."""
    out = []
    for s, val in samples:
        s = np.asarray(s, dtype=float)
        out.append((invert_point(s), float(np.sqrt(_norm_sq(s)) * val)))
    return out


def _sample_heights(g: Generatrix, n: int, extra: Sequence[float] = ()) -> np.ndarray:
    # cosine spacing concentrates samples near the ends where vertices curve fastest
    s = 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, n)))
    hs = g.A + (g.B - g.A) * s
    hs[0], hs[-1] = g.A, g.B
    return np.unique(np.concatenate([hs, np.asarray(extra, dtype=float)]))


def invert_generatrix(g: Generatrix, n_samples: int = DEFAULT_SAMPLES,
                      include: Sequence[float] = ()) -> Generatrix:
    """Sampled generatrix of the inverted lateral surface.

    Each profile point ``(Phi, h)`` becomes ``(Phi/rho^2, h/rho^2)`` with
    ``rho^2 = Phi^2 + h^2``. Heights listed in ``include`` are always used as
    samples, so their images are interpolation knots.
    """
    if n_samples < 2:
        raise ValueError("need at least two samples")
    hs = _sample_heights(g, n_samples, include)
    phi = np.asarray(g.radius(hs), dtype=float)
    rho2 = phi * phi + hs * hs
    if np.any(rho2 == 0.0):
        raise SingularPointError("the generatrix passes through the inversion center")
    new_h = hs / rho2
    new_r = phi / rho2
    d = np.diff(new_h)
    if np.all(d < 0):
        new_h, new_r = new_h[::-1], new_r[::-1]
    elif not np.all(d > 0):
        raise NotRepresentableError("inverted axial coordinate is not monotone along the profile")
    return Generatrix.sampled(np.column_stack([new_h, new_r]))


@dataclass(frozen=True, eq=False)
class ExteriorProblem:
    """Exterior data on the original body together with its inverted interior problem."""

    generatrix: Generatrix
    levels: np.ndarray
    level_data: tuple[TrigPoly, ...]
    vertex_low: float
    vertex_high: float
    inner: Problem
    # inner level j corresponds to outer level order[j]
    order: np.ndarray


def _check_contains_unit_ball(g: Generatrix, n: int) -> None:
    hs = _sample_heights(g, n)
    phi = np.asarray(g.radius(hs), dtype=float)
    inside = phi * phi + hs * hs
    # the unit ball is inside the solid iff every lateral point is at distance >= 1
    if g.A > -1.0 or g.B < 1.0 or np.any(inside < 1.0 - 1e-12):
        raise InvalidGeometryError("the solid must contain the closed unit ball for the exterior problem")


def invert_exterior_problem(g: Generatrix, levels: Sequence[float], level_data: Sequence[TrigPoly],
                            vertex_low: float, vertex_high: float,
                            n_samples: int = DEFAULT_SAMPLES) -> ExteriorProblem:
    """Interior problem whose Kelvin image solves the exterior problem.

    The body must close to vertices at both ends: an end disk would invert to
    a spherical cap, which is not a plane section. Level ``h_j`` with data
    ``f_j`` maps to level ``h_j/rho_j^2`` with data ``rho_j f_j`` (angles are
    unchanged); the vertex ``(0, 0, A)`` maps to ``(0, 0, 1/A)`` with value
    ``|A| u_A``.
    """
    if not (g.is_vertex("low") and g.is_vertex("high")):
        raise SolverConfigError("unsupported-configuration",
                                "exterior problems need a body that closes to vertices at both ends")
    _check_contains_unit_ball(g, n_samples)
    levels = np.asarray(levels, dtype=float)
    if len(level_data) != levels.size:
        raise ValueError("one boundary polynomial per level is required")
    phi = np.asarray(g.radius(levels), dtype=float).reshape(-1)
    rho2 = phi * phi + levels * levels
    rho = np.sqrt(rho2)
    new_levels = levels / rho2
    order = np.argsort(new_levels)
    inv = invert_generatrix(g, n_samples, include=levels)
    grid = make_layer_grid(inv.A, inv.B, new_levels[order])
    data = tuple(level_data[i] * rho[i] for i in order)
    # A <= -1 < 1 <= B, so 1/A is still the low end of the image
    bnd = BoundarySpec(data, CapSpec.vertex(abs(g.A) * vertex_low), CapSpec.vertex(abs(g.B) * vertex_high))
    inner = validate_problem(inv, grid, bnd)
    return ExteriorProblem(g, levels, tuple(level_data), float(vertex_low), float(vertex_high), inner, order)


@dataclass(frozen=True, eq=False)
class ExteriorSolution:
    """Kelvin image of an interior spline solution."""

    exterior: ExteriorProblem
    inner: SplineSolution

    def evaluate(self, x, y, h):
        p = np.stack(np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, h))), axis=-1)
        return kelvin_evaluate(self.inner.evaluate, p)


def solve_exterior(ext: ExteriorProblem, build: Callable[[Problem], SplineSolution]) -> ExteriorSolution:
    """Solve the inverted problem with ``build`` and wrap the result."""
    return ExteriorSolution(ext, build(ext.inner))
