import json
import math
import warnings

import numpy as np
import pytest

from s2r_solitons.ambient import KillingField
from s2r_solitons.analyze import phase_portrait
from s2r_solitons.charts import ROTATIONAL, CurveState, SurfaceChart, chart_point, exact_solution
from s2r_solitons.errors import ExportError, UsageError
from s2r_solitons.integrate import IntegrationConfig, integrate
from s2r_solitons.meshio import (
    SurfaceMesh,
    chart_from_csv,
    export,
    obj_text,
    project_mesh,
    read_trajectory_csv,
    sweep,
    trajectory_csv_text,
    trajectory_mesh,
    triangulate,
    write_trajectory_csv,
)
from s2r_solitons.oracle import soliton_residual

HALF_PI = math.pi / 2


def test_two_by_two_obj():
    mesh = SurfaceMesh(np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], float), [[0, 1, 3, 2]])
    lines = obj_text(mesh).splitlines()
    assert sum(line.startswith("v ") for line in lines) == 4
    assert [line for line in lines if line.startswith("f ")] == ["f 1 2 4 3"]
    tri = obj_text(mesh, triangulated=True).splitlines()
    assert sum(line.startswith("f ") for line in tri) == 2


def test_faces_validated():
    with pytest.raises(UsageError):
        SurfaceMesh(np.zeros((3, 3)), [[0, 1, 5]])
    with pytest.raises(UsageError):
        obj_text(SurfaceMesh(np.zeros((4, 4)), []))


def test_cylinder_tube_is_closed_and_projects_to_unit_cylinder():
    chart = exact_solution("cylinder-c")
    mesh = sweep(chart, 0.0, 2 * math.pi, 64, periodic=True)
    n_s = len(chart.samples)
    assert mesh.vertices.shape == (n_s * 64, 4)
    assert len(mesh.faces) == (n_s - 1) * 64
    # the last column of quads closes the tube onto column 0
    cols = {int(f[0] % 64): set((f % 64).tolist()) for f in mesh.faces}
    assert cols[63] == {63, 0}
    proj = project_mesh(mesh)
    assert np.allclose(np.hypot(proj.vertices[:, 0], proj.vertices[:, 1]), 1.0, atol=1e-12)


def test_slice_cap_at_t0():
    mesh = sweep(exact_solution("slice", t0=0.0), 0.0, 2 * math.pi, 32, periodic=True)
    assert np.all(mesh.vertices[:, 3] == 0.0)
    assert np.allclose(np.linalg.norm(mesh.vertices[:, :3], axis=1), 1.0, atol=1e-15)


def test_pole_vertices_dropped_with_warning():
    top = HALF_PI - 1e-9
    chart = SurfaceChart(ROTATIONAL, (CurveState(0.0, 0.0, 0.0, 0.0), CurveState(top, top, 0.0, 0.0)),
                         lambda s: np.array([s, 0.0, 0.0]), lambda s: 0.0)
    mesh = sweep(chart, 0.0, 2 * math.pi, 16, periodic=True, s_values=np.linspace(0.0, top, 6))
    with pytest.warns(UserWarning, match="pole"):
        proj = project_mesh(mesh)
    assert len(proj.vertices) == len(mesh.vertices) - 16
    assert len(proj.faces) == len(mesh.faces) - 16
    assert proj.faces.max() < len(proj.vertices)


def test_sweep_matches_chart_points():
    chart = exact_solution("geodesic-cylinder", inclination=0.4, n_samples=11)
    w = np.linspace(-1.0, 1.0, 5)
    mesh = sweep(chart, -1.0, 1.0, 5)
    for i, st in enumerate(chart.samples):
        for j, wj in enumerate(w):
            ref = chart_point(chart.kind, st, wj).array
            assert np.abs(mesh.vertices[i * 5 + j] - ref).max() <= 1e-15


def test_triangulate_doubles_faces():
    mesh = sweep(exact_solution("cylinder-c", n_samples=5), 0.0, 1.0, 3)
    tri = triangulate(mesh)
    assert tri.faces.shape == (2 * len(mesh.faces), 3)


@pytest.fixture(scope="module")
def short_s11():
    return integrate("s11", (0.0, 0.0, 0.0), IntegrationConfig(stop_at_equilibrium=False, s_span=(-8, 8)))


def test_trajectory_csv_lines_and_round_trip(short_s11, tmp_path):
    text = trajectory_csv_text(short_s11)
    assert len(text.splitlines()) == short_s11.s.size + 1
    path = tmp_path / "traj.csv"
    write_trajectory_csv(short_s11, path)
    header, data = read_trajectory_csv(path)
    assert header == ["s", "u", "v", "theta"]
    assert np.array_equal(data[:, 0], short_s11.s)
    assert np.array_equal(data[:, 1:], short_s11.y)
    assert [p.name for p in tmp_path.iterdir()] == ["traj.csv"]


def test_chart_from_csv(short_s11, tmp_path):
    path = tmp_path / "traj.csv"
    write_trajectory_csv(short_s11, path)
    chart = chart_from_csv(path, ROTATIONAL)
    assert chart.s_range == (short_s11.s_min, short_s11.s_max)


def test_portrait_json(tmp_path):
    portrait = phase_portrait("s12", [(0.0, 0.0)], IntegrationConfig(s_span=(0.0, 60.0)),
                              window=(-1.0, 1.0, -math.pi, math.pi))
    path = tmp_path / "portrait.json"
    export(portrait, path)
    data = json.loads(path.read_text())
    assert len(data["equilibria"]) == 2
    assert data["trajectories"][0]["termination"]["forward"] == "converged-to-equilibrium"


def test_export_errors(short_s11, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ExportError):
        write_trajectory_csv(short_s11, blocker / "sub" / "t.csv")
    with pytest.raises(UsageError):
        export(short_s11, tmp_path / "t.obj")


def test_soliton_mesh_residual_and_bounds(short_s11):
    mesh = trajectory_mesh(short_s11, n_sweep=16)
    chart = short_s11.chart()
    k = KillingField.vertical()
    s_vals = short_s11.s[2:-2:7]
    res = [abs(soliton_residual(chart, k, s, phi)) for s in s_vals for phi in np.linspace(0, 2 * math.pi, 16, endpoint=False)]
    assert max(res) < 1e-5
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        proj = project_mesh(mesh)
    u_max = np.abs(short_s11.u).max()
    bound = 1.0 / (1.0 - math.sin(u_max))
    assert np.abs(proj.vertices[:, :2]).max() <= bound
