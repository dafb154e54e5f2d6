"""Layer-wise spline solutions of the Dirichlet problem for the Laplace equation
in bodies of revolution."""

from .errors import *  # noqa: F401,F403
from .geometry import (
    BoundarySpec,
    CapSpec,
    Generatrix,
    LayerGrid,
    Problem,
    generatrix_radius,
    make_layer_grid,
    sample_to_trigpoly,
    uniform_layer_grid,
    validate_problem,
)
from .polyharmonic import (
    PolyharmonicFn,
    TrigPoly,
    harmonic_extension,
    ph_combine,
    ph_eval,
    ph_gradient,
    ph_iterated_laplacian,
    ph_laplacian,
    ph_restrict_circle,
    radial_l2_norm_sq,
    trigpoly_eval,
)
from .solver import (
    LayerSpline,
    LegendreWeights,
    SplineSolution,
    blend,
    build_linear,
    build_smoothing,
    build_with_ends,
    check_exactness,
    evaluate_dh,
    evaluate_solution,
    legendre_min_weights,
    smoothing_step,
    solve_end_identity,
)

__version__ = "0.1.0"
