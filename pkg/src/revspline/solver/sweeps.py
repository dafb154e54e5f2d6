"""Continuous spline constructions: linear layers, polyharmonic ends, blending."""

from __future__ import annotations

from math import factorial
from typing import Callable

import numpy as np

from ..errors import IncompatibleSolutionsError, InvalidIntervalError, SolverConfigError
from ..geometry import Problem
from ..polyharmonic import (
    PolyharmonicFn,
    harmonic_extension,
    max_coeff_diff,
    ph_combine,
    ph_eval,
    ph_iterated_laplacian,
    ph_laplacian,
    ph_restrict_circle,
)
from .layers import LayerSpline, SplineSolution, even_collapse, harmonic_layer, odd_collapse

DIRECTIONS = ("up", "down")


def end_identity_chain(F_B: PolyharmonicFn, tau: float, n: int) -> list[PolyharmonicFn]:
    """Back-substitution over the Laplacian chain ``v_q = Delta^q u`` (``q = 0..n``).

    The top element is ``Delta^n F_B / tau``; each lower one follows from the
    identity with ``Delta^q`` applied to both sides.
    """
    if not tau > 0:
        raise InvalidIntervalError(f"layer thickness must be positive, got {tau!r}")
    if F_B.trimmed().radial_order > n:
        raise SolverConfigError("order-mismatch",
                                f"end data has radial order {F_B.trimmed().radial_order} > {n}")
    rhs = [F_B]
    for _ in range(n):
        rhs.append(ph_laplacian(rhs[-1]))
    v: list[PolyharmonicFn | None] = [None] * (n + 1)
    v[n] = rhs[n] / tau
    for q in range(n - 1, -1, -1):
        terms = [(1.0, rhs[q])]
        for k in range(1, n - q + 1):
            terms.append((-((-1) ** k) * tau ** (2 * k + 1) / factorial(2 * k + 1), v[q + k]))
        v[q] = ph_combine(terms) / tau
    return v


def solve_end_identity(F_B: PolyharmonicFn, tau: float, n: int) -> PolyharmonicFn:
    """Find ``u`` (radial order <= n) with ``sum_k (-1)^k tau^(2k+1) Delta^k u / (2k+1)! = F_B``."""
    v = end_identity_chain(F_B, tau, n)
    for q in range(n):
        chain = max_coeff_diff(ph_laplacian(v[q]), v[q + 1])
        assert chain <= 1e-9 * max(1.0, v[q + 1].max_abs(), ph_laplacian(v[q]).max_abs()), chain
    return v[0]


def identity_lhs(u: PolyharmonicFn, tau: float) -> PolyharmonicFn:
    """Left-hand side of the end identity (the odd part of a layer at offset ``tau``)."""
    return odd_collapse(u, tau)


# ---------------------------------------------------------------------------
# layer rules shared by every construction
# ---------------------------------------------------------------------------

def _first_layer_vertex(prob: Problem) -> LayerSpline:
    h1 = prob.grid.levels[0]
    c0 = harmonic_extension(prob.boundary.level_data[0], prob.level_radii[0])
    slope = (prob.boundary.cap_low.value - float(ph_eval(c0, 0.0, 0.0))) / (prob.A - h1)
    return harmonic_layer(prob.A, h1, h1, c0, PolyharmonicFn.constant(slope))


def _first_layer_disk(prob: Problem) -> LayerSpline:
    h1 = prob.grid.levels[0]
    c0 = prob.boundary.cap_low.data
    return _step_layer(prob.A, h1, c0, prob.boundary.level_data[0], prob.level_radii[0])


def _step_layer(h_lo, h_hi, c0, f_next, R_next) -> LayerSpline:
    tau = h_hi - h_lo
    trace = ph_restrict_circle(even_collapse(c0, tau), R_next)
    c1 = harmonic_extension((f_next - trace) / tau, R_next)
    return harmonic_layer(h_lo, h_hi, h_lo, c0, c1)


def _last_layer_vertex(prob: Problem, prev: LayerSpline) -> LayerSpline:
    hm = prob.grid.levels[-1]
    c0 = prev.value_at(hm)
    tau = prob.B - hm
    slope = (prob.boundary.cap_high.value - float(ph_eval(even_collapse(c0, tau), 0.0, 0.0))) / tau
    return harmonic_layer(hm, prob.B, hm, c0, PolyharmonicFn.constant(slope))


def _last_layer_disk(prob: Problem, prev: LayerSpline, n: int) -> LayerSpline:
    hm = prob.grid.levels[-1]
    c0 = prev.value_at(hm)
    tau = prob.B - hm
    F_B = prob.boundary.cap_high.data - even_collapse(c0, tau)
    c1 = solve_end_identity(F_B, tau, n)
    return harmonic_layer(hm, prob.B, hm, c0, c1)


def first_layer(prob: Problem) -> LayerSpline:
    if prob.boundary.cap_low.kind == "vertex":
        return _first_layer_vertex(prob)
    return _first_layer_disk(prob)


def last_layer(prob: Problem, prev: LayerSpline, n: int) -> LayerSpline:
    if prob.boundary.cap_high.kind == "vertex":
        return _last_layer_vertex(prob, prev)
    return _last_layer_disk(prob, prev, n)


def sweep(prob: Problem, n: int,
          interior_rule: Callable[[LayerSpline, int], LayerSpline] | None = None) -> list[LayerSpline]:
    """Upward construction; ``interior_rule(prev, j)`` builds layer ``j`` (1..m-1)."""
    levels = prob.grid.levels
    radii = prob.level_radii
    data = prob.boundary.level_data
    layers = [first_layer(prob)]
    for j in range(1, prob.grid.m):
        prev = layers[-1]
        if interior_rule is None:
            layers.append(_step_layer(levels[j - 1], levels[j], prev.value_at(levels[j - 1]), data[j], radii[j]))
        else:
            layers.append(interior_rule(prev, j))
    layers.append(last_layer(prob, layers[-1], n))
    return layers


def mirror_layers(layers: list[LayerSpline], prob: Problem) -> list[LayerSpline]:
    """Map layers built for ``prob.mirrored()`` back to ``prob``'s coordinates."""
    edges = prob.grid.edges
    out = []
    for i, L in enumerate(reversed(layers)):
        h_lo, h_hi = edges[i], edges[i + 1]
        # anchored at its low edge in mirrored coordinates -> high edge here
        h_ref = h_hi if L.h_ref == L.h_lo else h_lo
        coeffs = tuple(c * (-1.0) ** q for q, c in enumerate(L.coeffs))
        out.append(LayerSpline(h_lo, h_hi, h_ref, coeffs))
    return out


def _directed(prob: Problem, direction: str, build: Callable[[Problem], list[LayerSpline]]) -> list[LayerSpline]:
    if direction == "up":
        return build(prob)
    if direction == "down":
        return mirror_layers(build(prob.mirrored()), prob)
    raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")


def build_linear(problem: Problem, direction: str = "up") -> SplineSolution:
    """Layers linear in ``h`` with harmonic coefficients.

    Vertex caps use a constant slope in the adjacent layer; harmonic end-disk
    data are accepted (the end layer is then also linear).
    """
    for cap in (problem.boundary.cap_low, problem.boundary.cap_high):
        if cap.kind == "disk" and cap.radial_order > 0:
            raise SolverConfigError("must-use-ends",
                                    "end-disk data is polyharmonic; use the ends construction")
    layers = _directed(problem, direction, lambda p: sweep(p, 0))
    return SplineSolution(problem, tuple(layers), "linear" if direction == "up" else f"linear[{direction}]")


def build_with_ends(problem: Problem, n: int, direction: str = "up") -> SplineSolution:
    """Layers of degree ``2n`` (``2n + 1`` in the closing layer) for (n+1)-harmonic end data."""
    if n < 0:
        raise ValueError("end order must be non-negative")
    for name, cap in (("low", problem.boundary.cap_low), ("high", problem.boundary.cap_high)):
        if cap.kind == "disk" and cap.radial_order > n:
            raise SolverConfigError("order-mismatch",
                                    f"{name} end data has radial order {cap.radial_order} > n = {n}")
    layers = _directed(problem, direction, lambda p: sweep(p, n))
    tag = f"ends({n})" if direction == "up" else f"ends({n})[{direction}]"
    return SplineSolution(problem, tuple(layers), tag)


def blend(s1: SplineSolution, s2: SplineSolution, alpha: float) -> SplineSolution:
    """Layer-wise ``alpha * s1 + (1 - alpha) * s2``; layers of ``s2`` are re-anchored as needed."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    g1, g2 = s1.problem.grid, s2.problem.grid
    if (s1.problem is not s2.problem
            and (g1.m != g2.m or g1.A != g2.A or g1.B != g2.B or np.any(g1.levels != g2.levels))):
        raise IncompatibleSolutionsError("solutions were built for different problems")
    if len(s1.layers) != len(s2.layers):
        raise IncompatibleSolutionsError("layer counts differ")
    layers = []
    for L1, L2 in zip(s1.layers, s2.layers):
        L2 = L2.reanchored(L1.h_ref)
        deg = max(L1.degree, L2.degree)
        L1p, L2p = L1.padded(deg), L2.padded(deg)
        coeffs = tuple(ph_combine([(alpha, a), (1.0 - alpha, b)]) for a, b in zip(L1p.coeffs, L2p.coeffs))
        layers.append(LayerSpline(L1.h_lo, L1.h_hi, L1.h_ref, coeffs))
    return SplineSolution(s1.problem, tuple(layers), f"blend({alpha:g})")


def end_even_coefficients(c0: PolyharmonicFn, n: int) -> list[PolyharmonicFn]:
    """``[(-1)^k Delta^k c0 / (2k)! for k = 0..n]``."""
    return [ph_iterated_laplacian(c0, k) * ((-1) ** k / factorial(2 * k)) for k in range(n + 1)]
