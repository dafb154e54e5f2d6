"""Smoothing construction: (N+1)-harmonic slopes that damp the h-derivative jumps."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from ..errors import SolverConfigError
from ..geometry import Problem
from ..polyharmonic import PolyharmonicFn, TrigPoly, ph_restrict_circle
from .layers import LayerSpline, SplineSolution, even_collapse, harmonic_layer, odd_collapse
from .sweeps import _directed, sweep

# Per-mode residual of the boundary identity on the top circle of a layer:
# cosine targets in ``.cos``, sine targets in ``.sin``.
ModeResidual = TrigPoly


@dataclass(frozen=True)
class LegendreWeights:
    """Minimizer of ``int_0^1 (sum_p a_p r^(2p))^2 r dr`` subject to ``sum_p a_p = 1``.

    ``weights[p]`` multiplies ``t^p`` with ``t = r^2``; ``exact`` holds the
    same numbers as fractions and ``source`` the shifted-Legendre coefficients.
    """

    order: int
    weights: np.ndarray
    exact: tuple[Fraction, ...]
    source: tuple[Fraction, ...]

    @property
    def minimum(self) -> Fraction:
        return Fraction(1, 2 * (self.order + 1) ** 2)

    def form_value(self) -> Fraction:
        """Exact value of the quadratic form at the weights."""
        a = self.exact
        return sum((a[p] * a[q] / (2 * (p + q + 1)) for p in range(len(a)) for q in range(len(a))),
                   Fraction(0))


def shifted_legendre_monomials(k: int) -> list[Fraction]:
    """Monomial coefficients of ``P_k(2t - 1)``."""
    return [Fraction((-1) ** (k + i) * comb(k, i) * comb(k + i, i)) for i in range(k + 1)]


@lru_cache(maxsize=None)
def legendre_min_weights(N: int) -> LegendreWeights:
    if N < 0:
        raise ValueError("order must be non-negative")
    src = tuple(Fraction(2 * k + 1, (N + 1) ** 2) for k in range(N + 1))
    a = [Fraction(0)] * (N + 1)
    for k, b in enumerate(src):
        for i, c in enumerate(shifted_legendre_monomials(k)):
            a[i] += b * c
    w = np.array([float(x) for x in a])
    w.setflags(write=False)
    return LegendreWeights(N, w, tuple(a), src)


def smoothing_step(u1_prev: PolyharmonicFn, residual: ModeResidual, t: float, R: float,
                   N: int) -> PolyharmonicFn:
    """Slope generator ``u_1`` of the next layer.

    ``residual`` is the boundary requirement on the odd part of the layer:
    ``odd_collapse(u_1, t)`` restricted to radius ``R`` must equal it. The
    correction ``u_1 - u1_prev`` puts the exact per-mode shortfall into its
    higher radial terms with minimizing weights (order ``N`` for the
    axisymmetric mode, order ``N - 1`` shifted by one for ``k >= 1``) and
    solves the harmonic term of each mode so the requirement holds exactly.
    """
    short = residual - ph_restrict_circle(odd_collapse(u1_prev, t), R)
    l = short.degree
    alpha = np.zeros((l + 1, N + 1))
    beta = np.zeros((l + 1, N + 1))
    if N > 0:
        w0 = legendre_min_weights(N).weights
        wk = legendre_min_weights(N - 1).weights
        for k in range(l + 1):
            for p in range(1, N + 1):
                w = w0[p] if k == 0 else wk[p - 1]
                scale = w * R ** -(k + 2 * p) / t
                alpha[k, p] = short.cos[k] * scale
                beta[k, p] = short.sin[k] * scale
    partial = ph_restrict_circle(odd_collapse(PolyharmonicFn(alpha, beta), t), R)
    k = np.arange(l + 1)
    alpha[:, 0] = (short.cos - partial.cos) / (t * R ** k)
    beta[:, 0] = (short.sin - partial.sin) / (t * R ** k)
    return u1_prev + PolyharmonicFn(alpha, beta)


def build_smoothing(problem: Problem, N: int, direction: str = "up") -> SplineSolution:
    """Layers of degree ``2N + 1`` whose slopes are smoothed against the previous layer.

    The opening layer has no predecessor and uses the continuous rule (vertex
    slope or end-disk data); the closing layer uses the vertex rule or the end
    identity. Bodies with two end disks are rejected.
    """
    if N < 0:
        raise ValueError("smoothing order must be non-negative")
    caps = (problem.boundary.cap_low, problem.boundary.cap_high)
    if all(c.kind == "disk" for c in caps):
        raise SolverConfigError("unsupported-configuration",
                                "smoothing is defined for bodies with at most one end disk")
    for c in caps:
        if c.kind == "disk" and c.radial_order > N:
            raise SolverConfigError("unsupported-configuration",
                                    f"end data radial order {c.radial_order} exceeds N = {N}")

    def build(prob: Problem) -> list[LayerSpline]:
        levels = prob.grid.levels
        radii = prob.level_radii
        data = prob.boundary.level_data

        def rule(prev: LayerSpline, j: int) -> LayerSpline:
            h_lo, h_hi = levels[j - 1], levels[j]
            t = h_hi - h_lo
            c0 = prev.value_at(h_lo)
            target = data[j] - ph_restrict_circle(even_collapse(c0, t), radii[j])
            c1 = smoothing_step(prev.dh_at(h_lo), target, t, radii[j], N)
            return harmonic_layer(h_lo, h_hi, h_lo, c0, c1)

        return sweep(prob, N, rule)

    layers = _directed(problem, direction, build)
    tag = f"smoothing({N})" if direction == "up" else f"smoothing({N})[{direction}]"
    return SplineSolution(problem, tuple(layers), tag)
