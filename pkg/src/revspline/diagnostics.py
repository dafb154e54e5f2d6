"""Quantitative checks of built solutions: jumps, boundary errors, FD residuals, energy."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import OutOfDomainError, OutOfRangeError
from .polyharmonic import radial_l2_norm_sq
from .solver import SplineSolution

DEFAULT_SEED = 20240917
RADIAL_NODES = 32
ANGULAR_NODES = 128


def disk_quadrature(R: float, radial_nodes: int = RADIAL_NODES,
                    angular_nodes: int = ANGULAR_NODES) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes ``(x, y)`` and weights for integrals over the disk of radius ``R``.

    Gauss-Legendre in ``r`` (the area factor ``r`` folded into the weights)
    times the trapezoid rule in ``theta``.
    """
    xg, wg = np.polynomial.legendre.leggauss(radial_nodes)
    r = 0.5 * R * (xg + 1.0)
    wr = 0.5 * R * wg * r
    th = 2.0 * np.pi * np.arange(angular_nodes) / angular_nodes
    rr, tt = np.meshgrid(r, th, indexing="ij")
    w = np.outer(wr, np.full(angular_nodes, 2.0 * np.pi / angular_nodes))
    return (rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel(), w.ravel()


@dataclass(frozen=True)
class JumpReport:
    """Per-interface mismatch of ``du/dh`` across the level planes."""

    levels: list[float]
    radii: list[float]
    l2: list[float]
    l2_exact: list[float]
    max_abs: list[float]
    radial_nodes: int
    angular_nodes: int

    @property
    def max_l2(self) -> float:
        return max(self.l2, default=0.0)

    def to_dict(self) -> dict:
        return asdict(self)


def interface_jump(s: SplineSolution, radial_nodes: int = RADIAL_NODES,
                   angular_nodes: int = ANGULAR_NODES) -> JumpReport:
    """L2 and max norms over each section disk of ``u_h(above) - u_h(below)``.

    ``l2`` comes from the disk quadrature, ``l2_exact`` from the closed-form
    coefficient-space norm of the same difference.
    """
    levels, radii = s.problem.grid.levels, s.problem.level_radii
    l2, l2x, mx = [], [], []
    for j, (h, R) in enumerate(zip(levels, radii)):
        x, y, w = disk_quadrature(R, radial_nodes, angular_nodes)
        hh = np.full_like(x, h)
        d = s.layers[j + 1].evaluate_dh(x, y, hh) - s.layers[j].evaluate_dh(x, y, hh)
        l2.append(float(np.sqrt(np.sum(w * d * d))))
        diff = s.layers[j + 1].dh_at(h) - s.layers[j].dh_at(h)
        l2x.append(float(np.sqrt(max(radial_l2_norm_sq(diff, R), 0.0))))
        mx.append(float(np.max(np.abs(d))))
    return JumpReport([float(h) for h in levels], [float(R) for R in radii], l2, l2x, mx,
                      radial_nodes, angular_nodes)


@dataclass(frozen=True)
class BoundaryErrorReport:
    """``max_theta |u - f|`` on the boundary circle of each scanned level."""

    levels: list[float]
    errors: list[float]
    angular_nodes: int

    def to_dict(self) -> dict:
        return asdict(self)


def boundary_error_scan(s: SplineSolution, f_cont: Callable, levels: Sequence[float],
                        angular_nodes: int = 256) -> BoundaryErrorReport:
    """Compare the solution with ``f_cont(theta, h)`` on the lateral surface."""
    g = s.problem.generatrix
    th = 2.0 * np.pi * np.arange(angular_nodes) / angular_nodes
    errs = []
    for h in levels:
        if not s.problem.A <= h <= s.problem.B:
            raise OutOfRangeError(f"scan level {h} outside [{s.problem.A}, {s.problem.B}]")
        R = float(g.radius(h))
        u = s.evaluate(R * np.cos(th), R * np.sin(th), np.full_like(th, h))
        ref = np.asarray(f_cont(th, np.full_like(th, h)), dtype=float)
        errs.append(float(np.max(np.abs(u - ref))))
    return BoundaryErrorReport([float(h) for h in levels], errs, angular_nodes)


@dataclass(frozen=True)
class ResidualStats:
    max: float
    mean: float
    n_points: int
    delta: float

    def to_dict(self) -> dict:
        return asdict(self)


_STENCIL = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float)


def laplacian_residual_fd(s: SplineSolution, points, delta: float = 1e-3) -> ResidualStats:
    """Seven-point finite-difference Laplacian of the solution at ``points`` (shape ``(n, 3)``).

    Every stencil must stay inside the solid and inside one layer; points whose
    stencil crosses a level plane are rejected with :class:`OutOfDomainError`.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        return ResidualStats(0.0, 0.0, 0, float(delta))
    edges = s.problem.grid.edges
    h = pts[:, 2]
    crossing = np.any((edges[None, 1:-1] > h[:, None] - delta) & (edges[None, 1:-1] < h[:, None] + delta), axis=1)
    if np.any(crossing):
        raise OutOfDomainError("finite-difference stencil crosses a level plane")
    nbrs = pts[:, None, :] + delta * _STENCIL[None, :, :]
    allp = np.concatenate([pts[:, None, :], nbrs], axis=1).reshape(-1, 3)
    vals = np.asarray(s.evaluate(allp[:, 0], allp[:, 1], allp[:, 2])).reshape(len(pts), 7)
    lap = (vals[:, 1:].sum(axis=1) - 6.0 * vals[:, 0]) / (delta * delta)
    res = np.abs(lap)
    return ResidualStats(float(res.max()), float(res.mean()), len(pts), float(delta))


def random_interior_points(s: SplineSolution, n: int, seed: int = DEFAULT_SEED,
                           margin: float = 1e-2, avoid_levels: float = 0.0) -> np.ndarray:
    """``n`` points drawn uniformly by volume fraction of radius, kept ``margin`` inside.

    ``avoid_levels`` keeps the axial coordinate that far away from every level
    plane (use the FD step for :func:`laplacian_residual_fd`).
    """
    rng = np.random.default_rng(seed)
    g = s.problem.generatrix
    A, B = s.problem.A, s.problem.B
    levels = s.problem.grid.levels
    out = []
    while len(out) < n:
        h = rng.uniform(A + margin, B - margin)
        if avoid_levels > 0 and np.any(np.abs(levels - h) <= 2 * avoid_levels):
            continue
        lo, hi = max(A, h - margin), min(B, h + margin)
        R = float(np.min(g.radius(np.linspace(lo, hi, 5)))) - margin
        if R <= 0:
            continue
        r = R * np.sqrt(rng.uniform())
        th = rng.uniform(0.0, 2.0 * np.pi)
        out.append((r * np.cos(th), r * np.sin(th), h))
    return np.array(out).reshape(-1, 3)


@dataclass(frozen=True)
class OracleReport:
    max: float
    mean: float
    rms: float
    n_points: int
    # distance of each point to the lateral surface in its section
    boundary_distance: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def oracle_compare(s: SplineSolution, oracle: Callable, points) -> OracleReport:
    """Error statistics of ``s - oracle`` at ``points`` (shape ``(n, 3)``)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        return OracleReport(0.0, 0.0, 0.0, 0, [])
    u = np.asarray(s.evaluate(pts[:, 0], pts[:, 1], pts[:, 2]))
    ref = np.asarray(oracle(pts[:, 0], pts[:, 1], pts[:, 2]), dtype=float)
    e = np.abs(u - ref)
    dist = np.asarray(s.problem.generatrix.radius(pts[:, 2])) - np.hypot(pts[:, 0], pts[:, 1])
    return OracleReport(float(e.max()), float(e.mean()), float(np.sqrt(np.mean(e * e))), len(pts),
                        [float(d) for d in np.atleast_1d(dist)])


@dataclass(frozen=True)
class EnergyReport:
    """Interface term ``sum_j int_{E_j} |jump|`` and, with an oracle, ``int_M |grad(u - u*)|^2``."""

    interface_terms: list[float]
    interface_total: float
    gradient_energy: float | None
    axial_nodes: int

    def to_dict(self) -> dict:
        return asdict(self)


def _fd_gradient(f: Callable, x, y, h, step: float = 1e-6):
    gx = (f(x + step, y, h) - f(x - step, y, h)) / (2 * step)
    gy = (f(x, y + step, h) - f(x, y - step, h)) / (2 * step)
    gh = (f(x, y, h + step) - f(x, y, h - step)) / (2 * step)
    return gx, gy, gh


def energy_report(s: SplineSolution, oracle: Callable | None = None,
                  oracle_gradient: Callable | None = None, axial_nodes: int = 8,
                  radial_nodes: int = RADIAL_NODES, angular_nodes: int = ANGULAR_NODES) -> EnergyReport:
    """Gradient-energy bookkeeping.

    The volume integral uses Gauss-Legendre in ``h`` per layer times the disk
    rule on each section. Without ``oracle_gradient`` the oracle gradient is
    taken by central differences.
    """
    terms = []
    for j, (h, R) in enumerate(zip(s.problem.grid.levels, s.problem.level_radii)):
        x, y, w = disk_quadrature(R, radial_nodes, angular_nodes)
        hh = np.full_like(x, h)
        d = s.layers[j + 1].evaluate_dh(x, y, hh) - s.layers[j].evaluate_dh(x, y, hh)
        terms.append(float(np.sum(w * np.abs(d))))
    energy = None
    if oracle is not None:
        grad_ref = oracle_gradient or (lambda x, y, h: _fd_gradient(oracle, x, y, h))
        xg, wg = np.polynomial.legendre.leggauss(axial_nodes)
        g = s.problem.generatrix
        energy = 0.0
        for layer in s.layers:
            a, b = layer.h_lo, layer.h_hi
            for xi, wi in zip(xg, wg):
                h = 0.5 * (b - a) * xi + 0.5 * (a + b)
                R = float(g.radius(h))
                if R <= 0:
                    continue
                x, y, w = disk_quadrature(R, radial_nodes, angular_nodes)
                hh = np.full_like(x, h)
                ux, uy = layer.gradient_xy(x, y, hh)
                uh = layer.evaluate_dh(x, y, hh)
                rx, ry, rh = grad_ref(x, y, hh)
                dens = (ux - rx) ** 2 + (uy - ry) ** 2 + (uh - rh) ** 2
                energy += 0.5 * (b - a) * wi * float(np.sum(w * dens))
    return EnergyReport(terms, float(sum(terms)), energy, axial_nodes)
