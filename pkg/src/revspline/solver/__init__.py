"""Spline constructions and their evaluation."""

from .layers import (
    ExactnessReport,
    LayerSpline,
    SplineSolution,
    check_exactness,
    evaluate_dh,
    evaluate_solution,
    harmonic_layer,
)
from .smoothing import LegendreWeights, ModeResidual, build_smoothing, legendre_min_weights, smoothing_step
from .sweeps import blend, build_linear, build_with_ends, solve_end_identity

__all__ = [
    "ExactnessReport",
    "LayerSpline",
    "LegendreWeights",
    "ModeResidual",
    "SplineSolution",
    "blend",
    "build_linear",
    "build_smoothing",
    "build_with_ends",
    "check_exactness",
    "evaluate_dh",
    "evaluate_solution",
    "harmonic_layer",
    "legendre_min_weights",
    "smoothing_step",
    "solve_end_identity",
]
