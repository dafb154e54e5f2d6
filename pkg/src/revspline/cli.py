"""Command line entry point: ``revspline solve | eval | diagnose | kelvin``.

Exit codes: 0 success, 2 unreadable / malformed config or bad arguments,
3 validation failure, 4 solver configuration error, 5 unwritable output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from .config import ProblemConfig, load_config, parse_config
from .errors import (
    ConfigError,
    InsufficientSamplesError,
    InvalidGeometryError,
    NotRepresentableError,
    OutOfRangeError,
    OutputError,
    SolverConfigError,
    ValidationError,
)
from .export import export_grid_csv, export_vtk, make_field_grid, parse_grid_spec, sample_field
from .geometry import BoundarySpec, Problem, validate_problem
from .kelvin import invert_exterior_problem, solve_exterior
from .solver import SplineSolution, blend, build_linear, build_smoothing, build_with_ends, check_exactness

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_SOLVER = 4
EXIT_OUTPUT = 5


def build_solution(problem: Problem, method: dict) -> SplineSolution:
    """Run the construction named in a config ``method`` block.

    With ``alpha`` the result blends the requested direction (weight
    ``alpha``) with the opposite one.
    """
    kind = method["kind"]
    order = method.get("order", 1 if kind != "linear" else 0)
    direction = method.get("direction", "up")

    def one(d: str) -> SplineSolution:
        if kind == "linear":
            return build_linear(problem, d)
        if kind == "ends":
            return build_with_ends(problem, order, d)
        return build_smoothing(problem, order, d)

    s = one(direction)
    if "alpha" in method:
        s = blend(s, one("down" if direction == "up" else "up"), method["alpha"])
    return s


def _write_json(obj, path) -> None:
    try:
        Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from exc


def _layer_dump(s: SplineSolution) -> list[dict]:
    return [{"h_lo": L.h_lo, "h_hi": L.h_hi, "h_ref": L.h_ref,
             "coeffs": [{"alpha": c.alpha.tolist(), "beta": c.beta.tolist()} for c in L.coeffs]}
            for L in s.layers]


def solution_summary(s: SplineSolution) -> dict:
    rep = check_exactness(s)
    return {
        "method": s.method,
        "m": int(s.problem.grid.m),
        "levels": [float(h) for h in s.problem.grid.levels],
        "degrees": [L.degree for L in s.layers],
        "exactness": {"harmonicity": rep.harmonicity, "continuity": rep.continuity,
                      "boundary": rep.boundary, "caps": rep.caps, "scale": rep.scale,
                      "passed": rep.passed()},
    }


def _format_summary(summary: dict) -> str:
    ex = summary["exactness"]
    lines = [
        f"method      {summary['method']}",
        f"levels      m = {summary['m']}",
        f"degrees     {summary['degrees']}",
        f"harmonicity {ex['harmonicity']:.3e} (scale {ex['scale']:.3e})",
        f"continuity  {ex['continuity']:.3e}",
        f"boundary    {ex['boundary']:.3e}",
        f"caps        {ex['caps']:.3e}",
        f"exact       {'yes' if ex['passed'] else 'NO'}",
    ]
    return "\n".join(lines)


def _interior(cfg: ProblemConfig, command: str) -> Problem:
    if cfg.kelvin:
        raise SolverConfigError("unsupported-configuration",
                                f"{command} works on interior problems; use the kelvin command")
    return cfg.problem()


def run_solve(config_path, out=None) -> tuple[SplineSolution, dict]:
    cfg = load_config(config_path)
    if cfg.kelvin:
        return run_kelvin(config_path, out)
    s = build_solution(cfg.problem(), cfg.method)
    summary = solution_summary(s)
    print(_format_summary(summary))
    if out is not None:
        _write_json({"summary": summary, "layers": _layer_dump(s)}, out)
    return s, summary


def run_eval(config_path, grid: tuple[int, int, int], csv_path, vtk_path=None) -> SplineSolution:
    cfg = load_config(config_path)
    s = build_solution(_interior(cfg, "eval"), cfg.method)
    fg = make_field_grid(s, *grid)
    vals = sample_field(s, fg)
    rows = export_grid_csv(s, fg, csv_path, vals)
    if vtk_path is not None:
        export_vtk(s, fg, vtk_path, vals)
    print(f"{rows} points inside the solid written to {csv_path}")
    return s


def _scan_reference(cfg: ProblemConfig, s: SplineSolution) -> diag.BoundaryErrorReport:
    levels = list(s.problem.grid.levels)
    if cfg.reference is None:
        data = dict(zip(levels, s.problem.boundary.level_data))
        return diag.boundary_error_scan(s, lambda th, h: data[float(h[0])](th), levels)
    mids = 0.5 * (s.edges[1:] + s.edges[:-1])
    scan = sorted(levels + [float(v) for v in mids])
    ref = cfg.reference
    g = s.problem.generatrix

    def f_cont(th, h):
        R = np.asarray(g.radius(h), dtype=float)
        return ref(R * np.cos(th), R * np.sin(th), h)

    return diag.boundary_error_scan(s, f_cont, scan)


def midlevel_points(s: SplineSolution, nr: int = 8, nt: int = 32) -> np.ndarray:
    """Polar lattice (boundary circle included) on the middle plane of every layer."""
    g = s.problem.generatrix
    pts = []
    th = 2.0 * np.pi * np.arange(nt) / nt
    for lo, hi in zip(s.edges[:-1], s.edges[1:]):
        h = 0.5 * (lo + hi)
        R = float(g.radius(h))
        for frac in np.linspace(0.0, 1.0, nr + 1):
            for t in th:
                pts.append((frac * R * np.cos(t), frac * R * np.sin(t), h))
    return np.array(pts)


def diagnose_solution(cfg: ProblemConfig, s: SplineSolution, seed: int) -> dict:
    fd_pts = diag.random_interior_points(s, 64, seed, avoid_levels=1e-3)
    report = {
        "seed": seed,
        "method": s.method,
        "m": int(s.problem.grid.m),
        "jumps": diag.interface_jump(s).to_dict(),
        "boundary_errors": _scan_reference(cfg, s).to_dict(),
        "laplacian_fd": diag.laplacian_residual_fd(s, fd_pts, 1e-3).to_dict(),
    }
    ref = cfg.reference
    if ref is not None:
        report["energy"] = diag.energy_report(s, ref, ref.gradient).to_dict()
        pts = diag.random_interior_points(s, 200, seed + 1)
        report["oracle"] = diag.oracle_compare(s, ref, pts).to_dict()
        report["oracle_midlevel"] = diag.oracle_compare(s, ref, midlevel_points(s)).to_dict()
        del report["oracle_midlevel"]["boundary_distance"]
    else:
        report["energy"] = diag.energy_report(s).to_dict()
    return report


def run_diagnose(config_path, report_path, seed: int = diag.DEFAULT_SEED,
                 sweep_m: list[int] | None = None) -> dict:
    cfg = load_config(config_path)
    problem = _interior(cfg, "diagnose")
    s = build_solution(problem, cfg.method)
    report = diagnose_solution(cfg, s, seed)
    if sweep_m:
        if cfg.reference is None or "from_reference" not in cfg.raw["boundary"]:
            raise SolverConfigError("sweep-needs-reference",
                                    "a level sweep regenerates data, so the boundary must come from a reference")
        rows = []
        for m in sweep_m:
            raw = dict(cfg.raw, levels={"uniform": m})
            sub_cfg = parse_config(raw)
            sub = build_solution(sub_cfg.problem(), sub_cfg.method)
            jumps = diag.interface_jump(sub)
            mid = diag.oracle_compare(sub, sub_cfg.reference, midlevel_points(sub))
            rows.append({"m": m, "max_jump_l2": jumps.max_l2, "max_jump_abs": max(jumps.max_abs),
                         "midlevel_max_error": mid.max,
                         "interface_total": diag.energy_report(sub).interface_total})
        report["sweep"] = rows
    _write_json(report, report_path)
    print(f"jumps max L2 {max(report['jumps']['l2']):.3e}; "
          f"FD residual max {report['laplacian_fd']['max']:.3e}; report written to {report_path}")
    return report


def run_kelvin(config_path, out=None):
    """Solve an exterior problem through inversion in the unit sphere."""
    cfg = load_config(config_path)
    g = cfg.generatrix
    for cap in (cfg.cap_low, cfg.cap_high):
        if cap.kind != "vertex":
            raise SolverConfigError("unsupported-configuration",
                                    "exterior problems need vertex caps at both ends")
    # validates levels, data count and caps against the exterior body
    validate_problem(g, cfg.grid, BoundarySpec(cfg.level_data, cfg.cap_low, cfg.cap_high))
    ext = invert_exterior_problem(g, cfg.levels, cfg.level_data, cfg.cap_low.value, cfg.cap_high.value,
                                  cfg.kelvin_samples)
    sol = solve_exterior(ext, lambda p: build_solution(p, cfg.method))
    th = 2.0 * np.pi * np.arange(64) / 64
    worst = 0.0
    for h, f in zip(cfg.levels, cfg.level_data):
        R = float(g.radius(h))
        v = sol.evaluate(R * np.cos(th), R * np.sin(th), np.full_like(th, h))
        worst = max(worst, float(np.max(np.abs(v - f(th)))))
    summary = solution_summary(sol.inner)
    summary["exterior"] = {
        "inner_levels": [float(h) for h in ext.inner.grid.levels],
        "inner_interval": [ext.inner.A, ext.inner.B],
        "boundary_reproduction": worst,
    }
    print(_format_summary(summary))
    print(f"exterior boundary reproduction {worst:.3e}")
    if out is not None:
        _write_json({"summary": summary, "layers": _layer_dump(sol.inner)}, out)
    return sol, summary


def _grid_arg(text: str) -> tuple[int, int, int]:
    try:
        return parse_grid_spec(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from exc
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("level counts must be positive")
    return vals


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="revspline",
                                description="Spline solutions of the Laplace Dirichlet problem in bodies of revolution.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="build a solution and print its exactness summary")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help="write summary and layer coefficients as JSON")

    e = sub.add_parser("eval", help="sample the solution on an h x r x theta lattice")
    e.add_argument("--config", required=True)
    e.add_argument("--grid", required=True, type=_grid_arg, help="NHxNRxNT, e.g. 21x8x32")
    e.add_argument("--csv", required=True)
    e.add_argument("--vtk")

    d = sub.add_parser("diagnose", help="write a JSON diagnostics report")
    d.add_argument("--config", required=True)
    d.add_argument("--report", required=True)
    d.add_argument("--seed", type=int, default=diag.DEFAULT_SEED)
    d.add_argument("--sweep-m", type=_int_list, help="comma separated uniform level counts, e.g. 4,8,16")

    k = sub.add_parser("kelvin", help="solve the exterior problem through inversion")
    k.add_argument("--config", required=True)
    k.add_argument("--out", help="write summary and inner layer coefficients as JSON")
    return p


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "solve":
            run_solve(args.config, args.out)
        elif args.command == "eval":
            run_eval(args.config, args.grid, args.csv, args.vtk)
        elif args.command == "diagnose":
            run_diagnose(args.config, args.report, args.seed, args.sweep_m)
        else:
            run_kelvin(args.config, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"validation error [{exc.rule}]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (InvalidGeometryError, InsufficientSamplesError, OutOfRangeError, NotRepresentableError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverConfigError as exc:
        print(f"solver error [{exc.kind}]: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OutputError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
