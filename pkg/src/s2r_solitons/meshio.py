"""Surface meshes and file output.

Meshes are tensor grids over (curve sample, sweep sample). Raw meshes keep
the R^4 coordinates; ``project_mesh`` maps them to R^3 with the stereographic
projection from the north pole. Every writer goes through a temporary file
and an atomic rename, and prints floats with ``repr`` (shortest round-trip).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analyze import PhasePortrait
from .charts import SurfaceChart
from .errors import ExportError, UsageError
from .integrate import Trajectory
from .oracle import RESIDUAL_HEADER, ResidualRow
from .systems import get_system

POLE_TOL = 1e-6
AREA_TOL = 1e-12


@dataclass(eq=False)
class SurfaceMesh:
    vertices: np.ndarray
    faces: np.ndarray
    scalars: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.vertices = np.asarray(self.vertices, dtype=float)
        self.faces = np.asarray(self.faces, dtype=np.int64)
        if self.faces.size == 0:
            self.faces = self.faces.reshape(0, 4)
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise UsageError("face index out of range")

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]


def face_areas(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """Area of each polygon, fanned into triangles from its first vertex (any dimension)."""
    areas = np.zeros(len(faces))
    for k in range(1, faces.shape[1] - 1):
        a = vertices[faces[:, k]] - vertices[faces[:, 0]]
        b = vertices[faces[:, k + 1]] - vertices[faces[:, 0]]
        gram = np.einsum("ij,ij->i", a, a) * np.einsum("ij,ij->i", b, b) - np.einsum("ij,ij->i", a, b) ** 2
        areas += 0.5 * np.sqrt(np.maximum(gram, 0.0))
    return areas


def _drop_degenerate(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    if not len(faces):
        return faces
    good = face_areas(vertices, faces) > AREA_TOL
    if not good.all():
        warnings.warn(f"dropped {int((~good).sum())} degenerate faces", stacklevel=3)
    return faces[good]


def sweep(chart: SurfaceChart, w_start: float, w_stop: float, n_w: int,
          periodic: bool = False, s_values=None) -> SurfaceMesh:
    """Tensor-grid mesh of the chart with raw R^4 vertices.

    Vertex i * n_w + j is chart point (s_i, w_j). With ``periodic`` the sweep
    samples exclude ``w_stop`` and the last column is joined to the first
    (closed tube for a full rotation).
    """
    if n_w < 2:
        raise UsageError("need at least two sweep samples")
    s = np.array([c.s for c in chart.samples]) if s_values is None else np.asarray(s_values, dtype=float)
    if s.size < 2:
        raise UsageError("need at least two curve samples")
    w = np.linspace(w_start, w_stop, n_w, endpoint=not periodic)
    verts = np.array([chart.embed(si, wj) for si in s for wj in w])
    cols = n_w if periodic else n_w - 1
    faces = []
    for i in range(s.size - 1):
        for j in range(cols):
            jn = (j + 1) % n_w
            faces.append((i * n_w + j, (i + 1) * n_w + j, (i + 1) * n_w + jn, i * n_w + jn))
    faces = _drop_degenerate(verts, np.array(faces, dtype=np.int64))
    return SurfaceMesh(verts, faces)


def project_mesh(mesh: SurfaceMesh) -> SurfaceMesh:
    """Stereographic projection (x, y, z, t) -> (x/(1-z), y/(1-z), t) of every vertex.

    Vertices with |1 - z| < 1e-6 are removed together with the faces that use
    them; a warning reports how many.
    """
    if mesh.dim != 4:
        raise UsageError("project_mesh expects raw R^4 vertices")
    v = mesh.vertices
    d = 1.0 - v[:, 2]
    bad = np.abs(d) < POLE_TOL
    keep_faces = ~bad[mesh.faces].any(axis=1) if len(mesh.faces) else np.zeros(0, dtype=bool)
    if bad.any():
        warnings.warn(
            f"{int(bad.sum())} vertices at the projection pole; dropped {int((~keep_faces).sum())} faces",
            stacklevel=2,
        )
    index = np.cumsum(~bad) - 1
    safe = np.where(bad, 1.0, d)
    proj = np.column_stack([v[:, 0] / safe, v[:, 1] / safe, v[:, 3]])[~bad]
    faces = index[mesh.faces[keep_faces]] if len(mesh.faces) else mesh.faces
    scalars = {k: np.asarray(a)[~bad] for k, a in mesh.scalars.items()}
    return SurfaceMesh(proj, faces, scalars)


def triangulate(mesh: SurfaceMesh) -> SurfaceMesh:
    if mesh.faces.shape[1] == 3:
        return mesh
    f = mesh.faces
    tris = np.concatenate([f[:, [0, 1, 2]], f[:, [0, 2, 3]]])
    order = np.arange(len(tris)).reshape(2, -1).T.ravel()
    return SurfaceMesh(mesh.vertices, tris[order], dict(mesh.scalars))


# --------------------------------------------------------------------------
# writers


def _fmt(x: float) -> str:
    return repr(float(x))


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        # mkstemp creates 0600; give the file the usual umask-derived mode
        mask = os.umask(0)
        os.umask(mask)
        os.chmod(tmp, 0o666 & ~mask)
        os.replace(tmp, path)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc


def obj_text(mesh: SurfaceMesh, triangulated: bool = False) -> str:
    if mesh.dim != 3:
        raise UsageError("OBJ output needs 3-vector vertices; project the mesh first")
    m = triangulate(mesh) if triangulated else mesh
    lines = [f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}" for x, y, z in m.vertices]
    lines += ["f " + " ".join(str(int(i) + 1) for i in face) for face in m.faces]
    return "\n".join(lines) + "\n"


def write_obj(mesh: SurfaceMesh, path, triangulated: bool = False) -> None:
    _atomic_write(path, obj_text(mesh, triangulated))


def trajectory_csv_text(traj: Trajectory) -> str:
    header = "s,u,theta" if traj.system.planar else "s,u,v,theta"
    rows = [",".join(_fmt(x) for x in (s, *y)) for s, y in zip(traj.s, traj.y)]
    return "\n".join([header, *rows]) + "\n"


def write_trajectory_csv(traj: Trajectory, path) -> None:
    _atomic_write(path, trajectory_csv_text(traj))


def read_trajectory_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and float rows of a trajectory CSV."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [[float(x) for x in r] for r in reader if r]
    except OSError as exc:
        raise ExportError(f"cannot read {path}: {exc}") from exc
    except (StopIteration, ValueError) as exc:
        raise UsageError(f"malformed trajectory CSV {path}: {exc}") from exc
    if header not in (["s", "u", "v", "theta"], ["s", "u", "theta"]):
        raise UsageError(f"unexpected CSV header {header} in {path}")
    return header, np.array(rows, dtype=float).reshape(-1, len(header))


def residual_csv_text(rows: list[ResidualRow]) -> str:
    out = io.StringIO()
    out.write(",".join(RESIDUAL_HEADER) + "\n")
    for r in rows:
        out.write(",".join(_fmt(getattr(r, k)) for k in RESIDUAL_HEADER) + "\n")
    return out.getvalue()


def write_residual_csv(rows: list[ResidualRow], path) -> None:
    _atomic_write(path, residual_csv_text(rows))


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def equilibrium_dict(eq) -> dict:
    return {
        "u": eq.u,
        "theta": eq.theta,
        "eigenvalues": [_complex_pair(z) for z in eq.eigenvalues],
        "matrix": eq.matrix.tolist(),
        "classification": eq.classification,
        "surface": eq.surface,
    }


def portrait_dict(portrait: PhasePortrait) -> dict:
    return {
        "system": portrait.system.id,
        "equilibria": [equilibrium_dict(e) for e in portrait.equilibria],
        "trajectories": [
            {
                "seed": [float(x) for x in seed],
                "termination": {"forward": t.termination, "backward": t.termination_backward},
                "points": [[float(s), float(y[0]), float(y[-1])] for s, y in zip(t.s, t.y)],
            }
            for seed, t in zip(portrait.seeds, portrait.trajectories)
        ],
    }


def json_text(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, allow_nan=True) + "\n"


def write_json(obj, path) -> None:
    _atomic_write(path, json_text(obj))


def export(obj, path, fmt: str | None = None, triangulated: bool = False) -> None:
    """Write a mesh (OBJ), trajectory (CSV), portrait (JSON) or residual rows (CSV)."""
    fmt = (fmt or Path(path).suffix.lstrip(".")).lower()
    if isinstance(obj, SurfaceMesh) and fmt == "obj":
        write_obj(obj, path, triangulated)
    elif isinstance(obj, Trajectory) and fmt == "csv":
        write_trajectory_csv(obj, path)
    elif isinstance(obj, PhasePortrait) and fmt == "json":
        write_json(portrait_dict(obj), path)
    elif isinstance(obj, list) and fmt == "csv" and all(isinstance(r, ResidualRow) for r in obj):
        write_residual_csv(obj, path)
    elif isinstance(obj, dict) and fmt == "json":
        write_json(obj, path)
    else:
        raise UsageError(f"cannot export {type(obj).__name__} as {fmt!r}")


def chart_from_csv(path, kind: str) -> SurfaceChart:
    """Rotational or vertical chart interpolating the rows of a trajectory CSV."""
    from .charts import CurveState

    header, data = read_trajectory_csv(path)
    if header != ["s", "u", "v", "theta"]:
        raise UsageError("a chart needs the s,u,v,theta columns")
    return SurfaceChart.from_samples(kind, [CurveState(*map(float, row)) for row in data])


def trajectory_mesh(traj: Trajectory, n_sweep: int = 64, sweep_range: float | None = None) -> SurfaceMesh:
    """Raw mesh of the surface generated by an S11/S21 trajectory.

    Rotational surfaces sweep a full turn (periodic); vertical ones sweep
    t over [-sweep_range, sweep_range] (default 1).
    """
    system = get_system(traj.system)
    chart = traj.chart()
    if system.chart_kind == "rotational":
        return sweep(chart, 0.0, 2.0 * math.pi, n_sweep, periodic=True)
    half = 1.0 if sweep_range is None else sweep_range
    return sweep(chart, -half, half, n_sweep)
