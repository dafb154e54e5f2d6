"""Field sampling on cylindrical lattices and CSV / legacy VTK writers."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import OutputError
from .solver import SplineSolution

# lattice points within this fraction of the radius scale of the surface count as inside
INSIDE_RTOL = 1e-9
_GRID_RE = re.compile(r"^(\d+)x(\d+)x(\d+)$")


def parse_grid_spec(text: str) -> tuple[int, int, int]:
    """``"NHxNRxNT"`` to ``(nh, nr, nt)``."""
    m = _GRID_RE.match(text.strip())
    if not m:
        raise ValueError(f"grid must look like 20x8x32, got {text!r}")
    return tuple(int(v) for v in m.groups())


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Lattice ``h x r x theta`` over the bounding cylinder of the solid.

    ``points`` has shape ``(nh, nr, nt, 3)``; ``inside`` marks lattice points
    within the solid. Flattening in C order gives h-major, then radius, then
    angle.
    """

    h: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    points: np.ndarray
    inside: np.ndarray
    section_radius: np.ndarray

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.h.size, self.r.size, self.theta.size


def make_field_grid(s: SplineSolution, nh: int, nr: int, nt: int) -> FieldGrid:
    g = s.problem.generatrix
    A, B = s.problem.A, s.problem.B
    h = np.array([0.5 * (A + B)]) if nh == 1 else np.linspace(A, B, nh)
    R = np.atleast_1d(np.asarray(g.radius(h), dtype=float)) if nh else np.zeros(0)
    rmax = float(np.max(np.concatenate([R, np.atleast_1d(g.radius(np.linspace(A, B, 1025)))])))
    r = np.zeros(1) if nr == 1 else np.linspace(0.0, rmax, nr)
    theta = 2.0 * np.pi * np.arange(nt) / nt if nt else np.zeros(0)
    H, Rr, T = np.meshgrid(h, r, theta, indexing="ij")
    # adding 0.0 turns -0.0 into 0.0 so files never show "-0"
    pts = np.stack([Rr * np.cos(T), Rr * np.sin(T), H], axis=-1) + 0.0
    inside = Rr <= (R[:, None, None] if nh else 0.0) + INSIDE_RTOL * g.radius_scale
    return FieldGrid(h, r, theta, pts, inside, R)


def sample_field(s: SplineSolution, fg: FieldGrid) -> np.ndarray:
    """Solution values on the lattice.

    Points outside the solid get the value at the radial projection onto the
    boundary circle of their section.
    """
    vals = np.zeros(fg.inside.shape)
    if fg.inside.size == 0:
        return vals
    p = fg.points
    vals[fg.inside] = s.evaluate(p[..., 0][fg.inside], p[..., 1][fg.inside], p[..., 2][fg.inside])
    out = ~fg.inside
    if np.any(out):
        _, _, T = np.meshgrid(fg.h, fg.r, fg.theta, indexing="ij")
        Rsec = np.broadcast_to(fg.section_radius[:, None, None], fg.inside.shape)
        vals[out] = s.evaluate(Rsec[out] * np.cos(T[out]), Rsec[out] * np.sin(T[out]), p[..., 2][out])
    return vals


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _open(path):
    try:
        return open(Path(path), "w", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from exc


def export_grid_csv(s: SplineSolution, fg: FieldGrid, path, values: np.ndarray | None = None) -> int:
    """Write retained (inside) lattice points as ``x,y,h,u``; returns the row count."""
    vals = sample_field(s, fg) if values is None else values
    pts = fg.points.reshape(-1, 3)
    keep = fg.inside.ravel()
    flat = vals.ravel()
    rows = 0
    with _open(path) as fh:
        fh.write("x,y,h,u\n")
        for (x, y, h), u, k in zip(pts, flat, keep):
            if k:
                fh.write(f"{_fmt(x)},{_fmt(y)},{_fmt(h)},{_fmt(u)}\n")
                rows += 1
    return rows


def export_vtk(s: SplineSolution, fg: FieldGrid, path, values: np.ndarray | None = None) -> None:
    """Legacy ASCII STRUCTURED_GRID with ``u`` and the ``inside`` mask."""
    vals = sample_field(s, fg) if values is None else values
    nh, nr, nt = fg.shape
    pts = fg.points.reshape(-1, 3)
    with _open(path) as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(f"revspline field {s.method}\n")
        fh.write("ASCII\n")
        fh.write("DATASET STRUCTURED_GRID\n")
        # VTK's first index varies fastest: angle, then radius, then h
        fh.write(f"DIMENSIONS {nt} {nr} {nh}\n")
        fh.write(f"POINTS {len(pts)} double\n")
        for x, y, h in pts:
            fh.write(f"{_fmt(x)} {_fmt(y)} {_fmt(h)}\n")
        fh.write(f"POINT_DATA {len(pts)}\n")
        fh.write("SCALARS u double 1\nLOOKUP_TABLE default\n")
        for u in vals.ravel():
            fh.write(_fmt(u) + "\n")
        fh.write("SCALARS inside int 1\nLOOKUP_TABLE default\n")
        for k in fg.inside.ravel():
            fh.write("1\n" if k else "0\n")
