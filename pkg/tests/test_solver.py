import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import ball_xh_problem, half_ball_closed_forms, half_ball_data, half_ball_problem
from revspline import (
    BoundarySpec,
    CapSpec,
    Generatrix,
    IncompatibleSolutionsError,
    InvalidIntervalError,
    OutOfDomainError,
    PolyharmonicFn,
    SolverConfigError,
    TrigPoly,
    blend,
    build_linear,
    build_smoothing,
    build_with_ends,
    check_exactness,
    evaluate_dh,
    evaluate_solution,
    make_layer_grid,
    ph_eval,
    ph_iterated_laplacian,
    ph_laplacian,
    solve_end_identity,
    uniform_layer_grid,
    validate_problem,
)
from revspline.polyharmonic import max_coeff_diff
from revspline.solver.sweeps import end_identity_chain, identity_lhs


def constant_problem(c=1.7):
    g = Generatrix.cone(0.0, 0.6, 0.0, 2.0)
    grid = uniform_layer_grid(0.0, 2.0, 4)
    data = (TrigPoly.constant(c),) * 4
    return validate_problem(g, grid, BoundarySpec(data, CapSpec.vertex(c), CapSpec.disk(PolyharmonicFn.constant(c))))


def cylinder_xh_problem():
    """Cylinder R = 1 on [-1/2, 3/2] with data from u = (1 + h) x."""
    g = Generatrix.cylinder(1.0, -0.5, 1.5)
    grid = make_layer_grid(-0.5, 1.5, [0.0, 1.0])
    data = (TrigPoly.from_coeffs([0, 1.0]), TrigPoly.from_coeffs([0, 2.0]))
    caps = CapSpec.disk(PolyharmonicFn.from_complex([0, 0.5])), CapSpec.disk(PolyharmonicFn.from_complex([0, 2.5]))
    return validate_problem(g, grid, BoundarySpec(data, *caps))


# construction examples

@pytest.mark.parametrize("build", [build_linear, lambda p: build_with_ends(p, 2), lambda p: build_smoothing(p, 2)])
def test_constant_data_reproduced(build):
    s = build(constant_problem())
    x, y, h = np.array([0.1, 0.0, -0.3]), np.array([0.2, 0.0, 0.1]), np.array([1.0, 0.0, 1.9])
    assert np.allclose(evaluate_solution(s, x, y, h), 1.7, atol=1e-14)
    assert np.allclose(evaluate_dh(s, x, y, h), 0.0, atol=1e-14)


def test_cylinder_xh_fixture():
    s = build_linear(cylinder_xh_problem())
    mid = s.layers[1]
    assert mid.degree == 1
    assert max_coeff_diff(mid.value_at(0.0), PolyharmonicFn.from_complex([0, 1.0])) < 1e-15
    assert max_coeff_diff(mid.coeffs[1], PolyharmonicFn.from_complex([0, 1.0])) < 1e-15
    assert evaluate_solution(s, 0.2, 0.0, 0.5) == pytest.approx(0.3, abs=1e-15)
    assert evaluate_dh(s, 0.2, 0.0, 0.5, "below") == pytest.approx(0.2, abs=1e-15)
    assert evaluate_dh(s, 0.2, 0.0, 0.5, "above") == pytest.approx(0.2, abs=1e-15)


def test_half_ball_layers_match_closed_forms():
    d = half_ball_data(np.random.default_rng(11))
    s = build_with_ends(half_ball_problem(d), 1)
    ref = half_ball_closed_forms(d)
    for (layer, q), f in ref.items():
        L = s.layers[layer - 1]
        assert max_coeff_diff(L.coeffs[q], f) <= 1e-12, (layer, q)
    assert evaluate_solution(s, 0.0, 0.0, 1.0) == pytest.approx(d["u0"], abs=1e-14)
    # the closing vertex layer uses c1 = 2 [u0 - c0(0,0) - c2(0,0)/4]
    top = s.layers[1]
    expect = 2 * (d["u0"] - ph_eval(top.coeffs[0], 0, 0) - ph_eval(top.coeffs[2], 0, 0) / 4)
    assert ph_eval(top.coeffs[1], 0, 0) == pytest.approx(expect, abs=1e-13)


def test_ends_harmonic_data_independent_of_h():
    g = Generatrix.cylinder(1.3, 0.0, 1.0)
    grid = uniform_layer_grid(0.0, 1.0, 3)
    k = 3
    f = TrigPoly.from_coeffs([0, 0, 0, 1.3 ** k])
    U = PolyharmonicFn.from_complex([0, 0, 0, 1.0])
    p = validate_problem(g, grid, BoundarySpec((f,) * 3, CapSpec.disk(U), CapSpec.disk(U)))
    s = build_with_ends(p, 0)
    for L in s.layers:
        assert max_coeff_diff(L.coeffs[0].padded(3, 0), U) < 1e-14
        assert all(c.max_abs() < 1e-14 for c in L.coeffs[1:])


def test_ends_closing_identity_example():
    # first layer collapses r^2 to r^2 - 2 at h = 1 and the closing data is r^2 + that
    g = Generatrix.cylinder(1.0, 0.0, 2.0)
    r2 = PolyharmonicFn.monomial(0, 1)
    UB = 2.0 * r2 - PolyharmonicFn.constant(4.0)
    p = validate_problem(g, make_layer_grid(0, 2, [1.0]),
                         BoundarySpec((TrigPoly.constant(-1.0),), CapSpec.disk(r2), CapSpec.disk(UB)))
    s = build_with_ends(p, 1)
    expect = PolyharmonicFn.constant(2 / 3) + r2
    assert max_coeff_diff(s.layers[1].coeffs[1], expect) < 1e-14


# end identity

def test_end_identity_examples():
    F = PolyharmonicFn.from_complex([1.0, 2.0, -1.0j])
    assert max_coeff_diff(solve_end_identity(F, 0.7, 0), F / 0.7) < 1e-15
    assert max_coeff_diff(solve_end_identity(F, 0.7, 4), F / 0.7) < 1e-15
    u = solve_end_identity(PolyharmonicFn.monomial(0, 1), 1.0, 1)
    assert max_coeff_diff(u, PolyharmonicFn([[2 / 3, 1.0]])) < 1e-15
    with pytest.raises(InvalidIntervalError):
        solve_end_identity(F, 0.0, 1)
    with pytest.raises(SolverConfigError):
        solve_end_identity(PolyharmonicFn.monomial(0, 3), 1.0, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6), st.floats(0.1, 2.0), st.integers(0, 2 ** 32 - 1))
def test_end_identity_reinsertion(n, tau, seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1, 1, (4, n + 1))
    b = rng.uniform(-1, 1, (4, n + 1))
    b[0] = 0
    F = PolyharmonicFn(a, b)
    u = solve_end_identity(F, tau, n)
    assert u.radial_order <= n
    back = identity_lhs(u, tau)
    scale = max(1.0, u.max_abs(), F.max_abs())
    assert max_coeff_diff(back, F) <= 1e-12 * scale
    chain = end_identity_chain(F, tau, n)
    for q in range(n):
        lap = ph_laplacian(chain[q])
        assert max_coeff_diff(lap, chain[q + 1]) <= 1e-12 * max(1.0, lap.max_abs())


# structural invariants

def _methods_for(p):
    caps = (p.boundary.cap_low, p.boundary.cap_high)
    order = max(c.radial_order for c in caps)
    out = [lambda q: build_with_ends(q, order), lambda q: build_with_ends(q, order + 1),
           lambda q: build_with_ends(q, order, "down")]
    if order == 0:
        out += [build_linear, lambda q: build_linear(q, "down")]
    if sum(c.kind == "disk" for c in caps) < 2:
        out += [lambda q: build_smoothing(q, max(order, 1)), lambda q: build_smoothing(q, max(order, 2), "down")]
    return out


def test_exactness_on_every_fixture(problems):
    for name, p in problems.items():
        for build in _methods_for(p):
            rep = check_exactness(build(p))
            assert rep.passed(), (name, rep)


def test_blend_keeps_exactness(problems):
    for name, p in problems.items():
        order = max(p.boundary.cap_low.radial_order, p.boundary.cap_high.radial_order)
        up, down = build_with_ends(p, order), build_with_ends(p, order, "down")
        for alpha in np.linspace(0.0, 1.0, 5):
            rep = check_exactness(blend(up, down, alpha))
            assert rep.passed(), (name, alpha, rep)


def test_blend_examples():
    p = cylinder_xh_problem()
    s = build_linear(p)
    same = blend(s, s, 0.5)
    for a, b in zip(same.layers, s.layers):
        assert all(max_coeff_diff(x, y) < 1e-15 for x, y in zip(a.coeffs, b.coeffs))
    d = build_linear(p, "down")
    pts = (np.array([0.1, -0.3]), np.array([0.2, 0.4]), np.array([0.25, 1.2]))
    v = [evaluate_solution(blend(s, d, a), *pts) for a in (0.0, 0.3, 1.0)]
    assert np.allclose(v[1], 0.3 * v[2] + 0.7 * v[0], atol=1e-14)
    with pytest.raises(ValueError):
        blend(s, d, 1.5)
    with pytest.raises(IncompatibleSolutionsError):
        blend(s, build_linear(ball_xh_problem(2)), 0.5)


def test_blend_up_down_on_xh_cylinder():
    g = Generatrix.cylinder(1.0, 0.0, 2.0)
    grid = uniform_layer_grid(0.0, 2.0, 5)
    data = tuple(TrigPoly.from_coeffs([0, h]) for h in grid.levels)
    p = validate_problem(g, grid, BoundarySpec(data, CapSpec.disk(PolyharmonicFn.zero()),
                                               CapSpec.disk(PolyharmonicFn.from_complex([0, 2.0]))))
    s = blend(build_linear(p), build_linear(p, "down"), 0.5)
    assert check_exactness(s).boundary <= 1e-12


def test_direction_errors(problems):
    with pytest.raises(ValueError):
        build_linear(problems["ball_xh_8"], "sideways")


def test_linear_rejects_polyharmonic_end():
    d = half_ball_data(np.random.default_rng(1))
    with pytest.raises(SolverConfigError) as exc:
        build_linear(half_ball_problem(d))
    assert exc.value.kind == "must-use-ends"
    with pytest.raises(SolverConfigError) as exc:
        build_with_ends(half_ball_problem(d), 0)
    assert exc.value.kind == "order-mismatch"


# evaluation

def test_evaluation_domain(problems):
    s = build_linear(problems["ball_xh_8"])
    with pytest.raises(OutOfDomainError):
        evaluate_solution(s, 0.9, 0.0, 0.9)
    with pytest.raises(OutOfDomainError):
        evaluate_solution(s, 0.0, 0.0, 1.1)
    with pytest.raises(ValueError):
        evaluate_dh(s, 0.0, 0.0, 0.0, "left")
    # boundary points (tolerance) are accepted
    R = float(s.problem.generatrix.radius(0.3))
    assert np.isfinite(evaluate_solution(s, R, 0.0, 0.3))


def test_interface_sides(problems):
    s = build_linear(problems["ball_xh_8"])
    h = float(s.problem.grid.levels[3])
    below = evaluate_dh(s, 0.2, 0.1, h, "below")
    above = evaluate_dh(s, 0.2, 0.1, h, "above")
    assert below == pytest.approx(s.layers[3].evaluate_dh(0.2, 0.1, h))
    assert above == pytest.approx(s.layers[4].evaluate_dh(0.2, 0.1, h))
    assert evaluate_solution(s, 0.2, 0.1, h) == s.layers[3].evaluate(0.2, 0.1, h)


def test_linear_slope_constant_in_vertex_layer(problems):
    s = build_linear(problems["ball_xh_8"])
    c1 = s.layers[0].coeffs[1]
    assert c1.fourier_degree == 0 and c1.radial_order == 0
    v = evaluate_dh(s, np.array([0.0, 0.1]), np.array([0.0, 0.05]), np.array([-0.95, -0.9]))
    assert np.allclose(v, c1.alpha[0, 0])


def test_layer_reanchoring_preserves_values(problems):
    s = build_with_ends(problems["half_ball"], 1)
    L = s.layers[0]
    M = L.reanchored(0.37)
    x, y, h = np.array([0.1, -0.2]), np.array([0.3, 0.0]), np.array([0.05, 0.4])
    assert np.allclose(L.evaluate(x, y, h), M.evaluate(x, y, h), atol=1e-13)
    assert np.allclose(L.evaluate_dh(x, y, h), M.evaluate_dh(x, y, h), atol=1e-13)


def test_linear_convergence_on_ball():
    jumps, errs = [], []
    for m in (4, 8, 16, 32):
        s = build_linear(ball_xh_problem(m))
        worst_jump = 0.0
        for j, h in enumerate(s.problem.grid.levels):
            d = s.layers[j + 1].dh_at(h) - s.layers[j].dh_at(h)
            worst_jump = max(worst_jump, d.max_abs())
        jumps.append(worst_jump)
        mids = 0.5 * (s.edges[1:] + s.edges[:-1])
        th = np.linspace(0, 2 * np.pi, 33)
        worst = 0.0
        for h in mids:
            R = float(s.problem.generatrix.radius(h))
            for frac in (0.0, 0.5, 1.0):
                x, y = frac * R * np.cos(th), frac * R * np.sin(th)
                worst = max(worst, float(np.max(np.abs(evaluate_solution(s, x, y, np.full_like(x, h)) - x * h))))
        errs.append(worst)
    assert all(b <= a for a, b in zip(jumps, jumps[1:]))
    assert all(b <= a for a, b in zip(errs, errs[1:]))
