"""Layer splines, assembled solutions, evaluation and exactness checks."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from ..errors import OutOfDomainError, OutOfRangeError
from ..geometry import Problem
from ..polyharmonic import (
    PolyharmonicFn,
    max_coeff_diff,
    ph_combine,
    ph_eval,
    ph_gradient,
    ph_laplacian,
    ph_restrict_circle,
)

# relative tolerance of the point-in-solid test
DOMAIN_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class LayerSpline:
    """``u(x, y, h) = sum_q coeffs[q](x, y) (h - h_ref)^q`` on ``[h_lo, h_hi]``."""

    h_lo: float
    h_hi: float
    h_ref: float
    coeffs: tuple[PolyharmonicFn, ...]

    def __post_init__(self):
        if not self.h_lo < self.h_hi:
            raise ValueError("layer interval must satisfy h_lo < h_hi")
        if len(self.coeffs) < 2:
            object.__setattr__(self, "coeffs", tuple(self.coeffs) + (PolyharmonicFn.zero(),) * (2 - len(self.coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def value_at(self, h: float) -> PolyharmonicFn:
        """The 2D function ``u(., ., h)`` (layer collapsed onto a plane)."""
        tau = h - self.h_ref
        return ph_combine((tau ** q, c) for q, c in enumerate(self.coeffs))

    def dh_at(self, h: float) -> PolyharmonicFn:
        """The 2D function ``du/dh(., ., h)``."""
        tau = h - self.h_ref
        return ph_combine((q * tau ** (q - 1), c) for q, c in enumerate(self.coeffs) if q > 0)

    def reanchored(self, h_ref: float) -> "LayerSpline":
        """Same polynomial expanded in powers of ``h - h_ref``."""
        d = h_ref - self.h_ref
        if d == 0.0:
            return self
        new = []
        for i in range(len(self.coeffs)):
            new.append(ph_combine((comb(q, i) * d ** (q - i), self.coeffs[q])
                                  for q in range(i, len(self.coeffs))))
        return LayerSpline(self.h_lo, self.h_hi, h_ref, tuple(new))

    def padded(self, degree: int) -> "LayerSpline":
        extra = max(0, degree - self.degree)
        return LayerSpline(self.h_lo, self.h_hi, self.h_ref, self.coeffs + (PolyharmonicFn.zero(),) * extra)

    def evaluate(self, x, y, h):
        tau = np.asarray(h, dtype=float) - self.h_ref
        out = ph_eval(self.coeffs[-1], x, y) + 0.0 * tau
        for c in self.coeffs[-2::-1]:
            out = out * tau + ph_eval(c, x, y)
        return out

    def evaluate_dh(self, x, y, h):
        tau = np.asarray(h, dtype=float) - self.h_ref
        n = self.degree
        out = n * ph_eval(self.coeffs[n], x, y) + 0.0 * tau
        for q in range(n - 1, 0, -1):
            out = out * tau + q * ph_eval(self.coeffs[q], x, y)
        return out

    def gradient_xy(self, x, y, h):
        tau = np.asarray(h, dtype=float) - self.h_ref
        gx, gy = ph_gradient(self.coeffs[-1], x, y)
        gx, gy = gx + 0.0 * tau, gy + 0.0 * tau
        for c in self.coeffs[-2::-1]:
            cx, cy = ph_gradient(c, x, y)
            gx, gy = gx * tau + cx, gy * tau + cy
        return gx, gy

    def harmonicity_defect(self) -> tuple[float, float]:
        """Largest coefficient of the 3D Laplacian in coefficient space, and its scale.

        The 3D Laplacian of the layer has h-coefficients
        ``(q+2)(q+1) c_{q+2} + Delta_2 c_q`` (with ``c_q = 0`` beyond the degree).
        """
        worst = 0.0
        scale = 1.0
        n = self.degree
        for q in range(n + 1):
            lap = ph_laplacian(self.coeffs[q])
            scale = max(scale, lap.max_abs(), self.coeffs[q].max_abs())
            nxt = self.coeffs[q + 2] * ((q + 2) * (q + 1)) if q + 2 <= n else PolyharmonicFn.zero()
            worst = max(worst, (nxt + lap).max_abs())
        return worst, scale


def harmonic_layer(h_lo: float, h_hi: float, h_ref: float,
                   c0: PolyharmonicFn, c1: PolyharmonicFn) -> LayerSpline:
    """Harmonic layer generated by its value ``c0`` and slope ``c1`` at ``h_ref``.

    ``c_{2p} = (-1)^p Delta^p c0 / (2p)!`` and ``c_{2p+1} = (-1)^p Delta^p c1 / (2p+1)!``.
    """
    c0 = c0.trimmed()
    c1 = c1.trimmed()
    degree = max(2 * c0.radial_order, 2 * c1.radial_order + 1)
    coeffs: list[PolyharmonicFn] = [c0, c1]
    for q in range(2, degree + 1):
        coeffs.append(ph_laplacian(coeffs[q - 2]) * (-1.0 / (q * (q - 1))))
    return LayerSpline(h_lo, h_hi, h_ref, tuple(c.trimmed() for c in coeffs))


def even_collapse(c0: PolyharmonicFn, tau: float) -> PolyharmonicFn:
    """``sum_p (-1)^p Delta^p c0 tau^(2p) / (2p)!``: even part of a harmonic layer at offset ``tau``."""
    terms = []
    f = c0
    for p in range(c0.radial_order + 1):
        terms.append(((-1) ** p * tau ** (2 * p) / factorial(2 * p), f))
        f = ph_laplacian(f)
    return ph_combine(terms)


def odd_collapse(c1: PolyharmonicFn, tau: float) -> PolyharmonicFn:
    """``sum_p (-1)^p Delta^p c1 tau^(2p+1) / (2p+1)!``."""
    terms = []
    f = c1
    for p in range(c1.radial_order + 1):
        terms.append(((-1) ** p * tau ** (2 * p + 1) / factorial(2 * p + 1), f))
        f = ph_laplacian(f)
    return ph_combine(terms)


@dataclass(frozen=True, eq=False)
class SplineSolution:
    """Ordered layer splines covering ``[A, B]`` with the problem they solve."""

    problem: Problem
    layers: tuple[LayerSpline, ...]
    method: str

    @property
    def edges(self) -> np.ndarray:
        return self.problem.grid.edges

    def _layer_index(self, h, side: str):
        levels = self.problem.grid.levels
        idx = np.searchsorted(levels, h, side="left" if side == "below" else "right")
        return np.clip(idx, 0, len(self.layers) - 1)

    def _check_domain(self, x, y, h):
        g = self.problem.generatrix
        span = self.problem.B - self.problem.A
        if np.any(h < self.problem.A - 1e-12 * span) or np.any(h > self.problem.B + 1e-12 * span):
            raise OutOfDomainError("h outside [A, B]")
        try:
            R = g.radius(h)
        except OutOfRangeError as exc:  # pragma: no cover - guarded above
            raise OutOfDomainError(str(exc)) from exc
        rr = np.sqrt(x * x + y * y)
        if np.any(rr > R + DOMAIN_RTOL * g.radius_scale):
            raise OutOfDomainError("point lies outside the solid")

    def _dispatch(self, fn_name: str, x, y, h, side: str):
        x, y, h = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, h)))
        self._check_domain(x, y, h)
        idx = self._layer_index(h, side)
        out = np.empty(x.shape)
        for j in np.unique(idx):
            mask = idx == j
            out[mask] = getattr(self.layers[j], fn_name)(x[mask], y[mask], h[mask])
        return out if out.ndim else float(out)

    def evaluate(self, x, y, h):
        return self._dispatch("evaluate", x, y, h, "below")

    def evaluate_dh(self, x, y, h, side: str = "below"):
        if side not in ("below", "above"):
            raise ValueError("side must be 'below' or 'above'")
        return self._dispatch("evaluate_dh", x, y, h, side)

    def gradient(self, x, y, h):
        """Full 3D gradient ``(u_x, u_y, u_h)`` from the owning (lower) layer."""
        x, y, h = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, h)))
        self._check_domain(x, y, h)
        idx = self._layer_index(h, "below")
        gx, gy, gh = (np.empty(x.shape) for _ in range(3))
        for j in np.unique(idx):
            mask = idx == j
            layer = self.layers[j]
            gx[mask], gy[mask] = layer.gradient_xy(x[mask], y[mask], h[mask])
            gh[mask] = layer.evaluate_dh(x[mask], y[mask], h[mask])
        return gx, gy, gh

    def coefficient_scale(self) -> float:
        return max([1.0] + [c.max_abs() for L in self.layers for c in L.coeffs])


def evaluate_solution(s: SplineSolution, x, y, h):
    """Value of the spline solution; interface planes belong to the lower layer."""
    return s.evaluate(x, y, h)


def evaluate_dh(s: SplineSolution, x, y, h, side: str = "below"):
    """One-sided ``du/dh`` taken from the layer on ``side`` of the point."""
    return s.evaluate_dh(x, y, h, side)


@dataclass(frozen=True)
class ExactnessReport:
    harmonicity: float
    continuity: float
    boundary: float
    caps: float
    scale: float

    def passed(self, rtol: float = 1e-12, boundary_tol: float = 1e-10) -> bool:
        return (self.harmonicity <= rtol * self.scale and self.continuity <= rtol * self.scale
                and self.boundary <= boundary_tol and self.caps <= boundary_tol)


def check_exactness(s: SplineSolution) -> ExactnessReport:
    """Coefficient-space residuals of the three structural invariants.

    ``harmonicity``: 3D Laplacian recurrence; ``continuity``: mismatch of
    adjacent layers on shared planes; ``boundary``: mismatch with the level
    data on each circle; ``caps``: vertex values / end-disk data.
    """
    prob = s.problem
    harm = 0.0
    scale = s.coefficient_scale()
    for L in s.layers:
        d, sc = L.harmonicity_defect()
        harm = max(harm, d)
        scale = max(scale, sc)
    cont = 0.0
    for lo, hi in zip(s.layers[:-1], s.layers[1:]):
        cont = max(cont, max_coeff_diff(lo.value_at(lo.h_hi), hi.value_at(hi.h_lo)))
    bnd = 0.0
    for j, (h, R, f) in enumerate(zip(prob.grid.levels, prob.level_radii, prob.boundary.level_data)):
        for L in (s.layers[j], s.layers[j + 1]):
            bnd = max(bnd, max_coeff_diff(ph_restrict_circle(L.value_at(h), R), f))
    caps = 0.0
    for cap, L, h in ((prob.boundary.cap_low, s.layers[0], prob.A), (prob.boundary.cap_high, s.layers[-1], prob.B)):
        if cap.kind == "vertex":
            caps = max(caps, abs(float(ph_eval(L.value_at(h), 0.0, 0.0)) - cap.value))
        else:
            caps = max(caps, max_coeff_diff(L.value_at(h), cap.data))
    return ExactnessReport(harm, cont, bnd, caps, scale)
