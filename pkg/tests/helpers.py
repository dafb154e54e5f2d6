"""Problem builders and independent oracles shared by the test modules."""

from fractions import Fraction

import numpy as np
import sympy as sp

from revspline import (
    BoundarySpec,
    CapSpec,
    Generatrix,
    PolyharmonicFn,
    TrigPoly,
    make_layer_grid,
    sample_to_trigpoly,
    uniform_layer_grid,
    validate_problem,
)


def sampled_level_data(g, levels, ustar, degree, n=None):
    """Fit each level circle's trace of ``ustar`` by a trigonometric polynomial."""
    n = n or 4 * degree + 4
    th = 2 * np.pi * np.arange(n) / n
    out = []
    for h, R in zip(levels, np.atleast_1d(g.radius(levels))):
        vals = ustar(R * np.cos(th), R * np.sin(th), np.full_like(th, h))
        out.append(sample_to_trigpoly(np.column_stack([th, vals]), degree))
    return tuple(out)


def ball_xh_problem(m):
    """Unit ball, data from ``u* = x h``, vertices at both poles."""
    g = Generatrix.sphere(1.0)
    grid = uniform_layer_grid(-1.0, 1.0, m)
    data = tuple(TrigPoly.from_coeffs([0.0, h * R]) for h, R in zip(grid.levels, g.radius(grid.levels)))
    return validate_problem(g, grid, BoundarySpec(data, CapSpec.vertex(0.0), CapSpec.vertex(0.0)))


def half_ball_data(rng, N=3):
    a0, b0, a1, b1, a, b = (rng.normal(size=N + 1) for _ in range(6))
    b0[0] = b1[0] = b[0] = 0.0
    return dict(a0=a0, b0=b0, a1=a1, b1=b1, a=a, b=b, u0=float(rng.normal()), N=N)


def half_ball_problem(d):
    """Half ball over the base h = 0, one level at 1/2, vertex at 1."""
    UA = PolyharmonicFn.from_complex(d["a0"] - 1j * d["b0"]) + PolyharmonicFn.from_complex(d["a1"] - 1j * d["b1"], 1)
    f = TrigPoly.from_coeffs(d["a"], d["b"][1:], constant_convention="halved")
    g = Generatrix.sphere(1.0, 0.0, A=0.0, B=1.0)
    return validate_problem(g, make_layer_grid(0.0, 1.0, [0.5]),
                            BoundarySpec((f,), CapSpec.disk(UA), CapSpec.vertex(d["u0"])))


def fixture_problems():
    """Assorted valid problems covering every cap combination and geometry kind."""
    rng = np.random.default_rng(7)
    out = {}
    out["ball_xh_8"] = ball_xh_problem(8)
    out["half_ball"] = half_ball_problem(half_ball_data(rng))
    g = Generatrix.cylinder(1.0, 0.0, 2.0)
    grid = uniform_layer_grid(0.0, 2.0, 5)
    us = lambda x, y, h: x * h + x * y - 0.3 * (h * h - 0.5 * (x * x + y * y))
    low = PolyharmonicFn.from_complex([0.0, 0.0, -0.5j])
    low = low + PolyharmonicFn.monomial(0, 1, 0.15)
    high = PolyharmonicFn.from_complex([-1.2, 2.0, -0.5j]) + PolyharmonicFn.monomial(0, 1, 0.15)
    out["cylinder_two_disks"] = validate_problem(
        g, grid, BoundarySpec(sampled_level_data(g, grid.levels, us, 2), CapSpec.disk(low), CapSpec.disk(high)))
    g = Generatrix.cone(0.0, 0.8, 0.0, 1.5)
    grid = make_layer_grid(0.0, 1.5, [0.2, 0.5, 0.6, 1.1])
    out["cone_nonuniform"] = validate_problem(
        g, grid, BoundarySpec(sampled_level_data(g, grid.levels, lambda x, y, h: np.exp(h) * np.sin(x), 6),
                              CapSpec.vertex(0.0), CapSpec.disk(PolyharmonicFn.from_complex([0.0, np.exp(1.5)]))))
    g = Generatrix.sampled([(0.0, 0.0), (0.3, 0.5), (0.8, 0.7), (1.4, 0.6), (2.0, 0.0)])
    grid = uniform_layer_grid(0.0, 2.0, 6)
    out["sampled_vertices"] = validate_problem(
        g, grid, BoundarySpec(sampled_level_data(g, grid.levels, lambda x, y, h: x * x - y * y + h, 3),
                              CapSpec.vertex(0.0), CapSpec.vertex(2.0)))
    return out


def half_ball_closed_forms(d):
    """Closed-form coefficient functions of the two half-ball layers (n = 1).

    Written out term by term from the complex-power representation, without
    using the solver.
    """
    a0, b0, a1, b1, a, b, u0 = (d[k] for k in ("a0", "b0", "a1", "b1", "a", "b", "u0"))
    N = len(a) - 1
    k = np.arange(N + 1)
    c = a - 1j * b
    c0 = a0 - 1j * b0
    c1 = a1 - 1j * b1
    Z = PolyharmonicFn.from_complex
    lift = Z(np.r_[0.0, c[1:] * (2 / np.sqrt(3)) ** k[1:]])
    u01 = Z(c0) + Z(c1, 1)
    u11 = 2.0 * (PolyharmonicFn.constant(a[0] / 2) + lift - Z(c0) - PolyharmonicFn.constant(a1[0] / 4)
                 + 0.25 * Z(np.r_[0.0, (c1 * (2 * k - 1))[1:]]))
    u21 = -2.0 * (PolyharmonicFn.constant(a1[0]) + Z(np.r_[0.0, (c1 * (k + 1))[1:]]))
    u02 = PolyharmonicFn.constant(a[0] / 2) + lift - 0.75 * Z(c1) + Z(c1, 1)
    u12 = PolyharmonicFn.constant(2 * u0 + 2.5 * a1[0] - a[0])
    u22 = u21
    return {(1, 0): u01, (1, 1): u11, (1, 2): u21, (2, 0): u02, (2, 1): u12, (2, 2): u22}


def constrained_lsq_weights(N):
    """Exact minimizer of int_0^1 (sum_p a_p t^p)^2 dt / 2 subject to sum a_p = 1.

    Solves the Lagrange system with rational arithmetic; independent of any
    orthogonal-polynomial construction.
    """
    n = N + 1
    G = sp.Matrix(n, n, lambda p, q: sp.Rational(1, p + q + 1))
    K = sp.zeros(n + 1, n + 1)
    K[:n, :n] = G
    K[:n, n] = sp.ones(n, 1)
    K[n, :n] = sp.ones(1, n)
    rhs = sp.zeros(n + 1, 1)
    rhs[n] = 1
    sol = K.LUsolve(rhs)
    a = [Fraction(int(sp.fraction(v)[0]), int(sp.fraction(v)[1])) for v in sol[:n]]
    value = sum(a[p] * a[q] / (2 * (p + q + 1)) for p in range(n) for q in range(n))
    return a, value


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []
