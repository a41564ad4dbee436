import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from s2r_solitons.ambient import KillingField, killing_eval
from s2r_solitons.charts import ROTATIONAL, VERTICAL, CurveState, closed_form_normal, exact_solution
from s2r_solitons.oracle import (
    chart_forms,
    cross4,
    fd_forms,
    frame_NR,
    general_axis_NR,
    is_canonical_axis,
    nr_coefficients,
    phi_variance,
    residual_report,
    sample_points,
    soliton_residual,
)

from conftest import random_chart

HALF_PI = math.pi / 2
TILTED = (0.0, 0.0, 0.7, HALF_PI)  # E1 = e_x, E2 in the yz-plane
CANONICAL = (0.0, 0.0, 0.0, HALF_PI)
angle = st.floats(-math.pi, math.pi, allow_nan=False)
u_in = st.floats(-1.4, 1.4, allow_nan=False)


@st.composite
def orthonormal_angles(draw):
    k = KillingField.from_axis(
        draw(st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3).filter(lambda a: np.linalg.norm(a) > 0.1)),
        spin=draw(angle),
    )
    return k.angles


def test_cross4_orthogonal():
    rng = np.random.default_rng(0)
    a, b, c = rng.normal(size=(3, 4))
    x = cross4(a, b, c)
    assert max(abs(x @ a), abs(x @ b), abs(x @ c)) < 1e-12
    assert np.linalg.det(np.array([a, b, c, x])) > 0


@pytest.mark.parametrize("chart", [exact_solution("slice"), exact_solution("cylinder-c"),
                                   exact_solution("cylinder-c", kind=VERTICAL)])
def test_totally_geodesic_and_minimal_examples(chart):
    rng = np.random.default_rng(1)
    for s, w in sample_points(chart, 20, rng, margin=0.01, w_range=(0.0, 1.0)):
        assert abs(chart_forms(chart, s, w).H) < 1e-6


def test_rotational_forms_match_closed_coefficients():
    rng = np.random.default_rng(2)
    for _ in range(30):
        chart = random_chart(rng, ROTATIONAL)
        s, phi = rng.uniform(-0.9, 0.9), rng.uniform(0, 2 * math.pi)
        f = chart_forms(chart, s, phi)
        st_ = chart.state(s)
        su, cu, sth = math.sin(st_.u), math.cos(st_.u), math.sin(st_.theta)
        assert f.g11 == pytest.approx(1.0, abs=1e-6)
        assert f.g12 == pytest.approx(0.0, abs=1e-6)
        assert f.g22 == pytest.approx(cu * cu, abs=1e-6)
        assert f.b12 == pytest.approx(0.0, abs=1e-6)
        assert f.b22 == pytest.approx(-sth * su * cu, abs=1e-6)
        assert abs(f.H - chart.mean_curvature(s)) < 1e-6


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([ROTATIONAL, VERTICAL]), st.integers(0, 2**32 - 1))
def test_fd_normal_properties(kind, seed):
    rng = np.random.default_rng(seed)
    chart = random_chart(rng, kind)
    s, w = rng.uniform(-0.9, 0.9), rng.uniform(-1, 1)
    f = chart_forms(chart, s, w)
    n = f.N  # raises unless tangent to S^2 x R
    assert abs(np.linalg.norm(n.components) - 1.0) < 1e-10
    h = 1e-5
    ps = (chart.embed(s + h, w) - chart.embed(s - h, w)) / (2 * h)
    pw = (chart.embed(s, w + h) - chart.embed(s, w - h)) / (2 * h)
    assert abs(f.normal @ ps) < 1e-8 and abs(f.normal @ pw) < 1e-8
    assert f.normal @ closed_form_normal(kind, chart.state(s), w).components == pytest.approx(1.0, abs=1e-8)


def test_richardson_improves():
    rng = np.random.default_rng(3)
    chart = random_chart(rng, VERTICAL)
    exact = chart.mean_curvature(0.2)
    plain = abs(fd_forms(chart.embed, 0.2, 0.3, h=1e-2).H - exact)
    extrap = abs(fd_forms(chart.embed, 0.2, 0.3, h=1e-2, richardson=True).H - exact)
    assert extrap < 0.1 * plain


def test_reference_normal_flips_orientation():
    chart = exact_solution("cylinder-c")
    f = fd_forms(chart.embed, 0.1, 0.2)
    g = fd_forms(chart.embed, 0.1, 0.2, reference_normal=-f.normal)
    assert np.allclose(g.normal, -f.normal)


def test_soliton_residual_integrated(s11_ini, s21_ini):
    rng = np.random.default_rng(4)
    for traj, killing, w_range in ((s11_ini, KillingField.vertical(), (0, 2 * math.pi)),
                                   (s21_ini, KillingField.rotation_z(), (-1.0, 1.0))):
        chart = traj.chart()
        pts = sample_points(chart, 100, rng, margin=1e-3, w_range=w_range)
        res = [abs(soliton_residual(chart, killing, s, w)) for s, w in pts]
        assert max(res) < 1e-6
        closed = [abs(soliton_residual(chart, killing, s, w, method="closed")) for s, w in pts[:20]]
        assert max(closed) < 1e-8


@settings(max_examples=20, deadline=None)
@given(orthonormal_angles(), st.floats(-2, 2, allow_nan=False))
def test_slice_is_soliton_for_any_axis(angles, t0):
    chart = exact_solution("slice", t0=t0)
    k = KillingField.from_angles(*angles)
    rng = np.random.default_rng(5)
    for s, phi in sample_points(chart, 10, rng, margin=0.01):
        assert abs(soliton_residual(chart, k, s, phi)) < 1e-8


def test_residual_report_rows():
    chart = exact_solution("cylinder-c")
    rows = residual_report(chart, KillingField.vertical(), [(0.0, 0.0), (1.0, 2.0)])
    assert len(rows) == 2
    assert all(abs(r.residual) < 1e-8 and r.H_closed == 0.0 for r in rows)


def test_nr_canonical_frame_vanishes():
    assert is_canonical_axis(*CANONICAL)
    assert nr_coefficients(*CANONICAL) == pytest.approx((0.0, 0.0), abs=1e-16)
    for phi in np.linspace(0, 2 * math.pi, 9):
        assert general_axis_NR(CurveState(0, 0.3, 0, 1.0), phi, *CANONICAL) == pytest.approx(0.0, abs=1e-16)


@settings(max_examples=100, deadline=None)
@given(orthonormal_angles(), angle)
def test_nr_vanishes_on_slice(angles, phi):
    assert general_axis_NR(CurveState(0, 0.4, 0, 0.0), phi, *angles) == 0.0


def test_nr_tilted_depends_on_phi():
    assert not is_canonical_axis(*TILTED)
    state = CurveState(0, 0.2, 0, math.pi / 4)
    assert general_axis_NR(state, 0.5, *TILTED) != 0.0
    assert phi_variance(state, TILTED) > 1e-6


@settings(max_examples=100, deadline=None)
@given(u_in, angle, angle)
def test_nr_canonical_agrees_with_rz(u, th, phi):
    state = CurveState(0, u, 0, th)
    p = np.array([math.cos(u) * math.cos(phi), math.cos(u) * math.sin(phi), math.sin(u), 0.0])
    from s2r_solitons.ambient import AmbientPoint

    rz = killing_eval(KillingField.rotation_z(), AmbientPoint.from_array(p)).components
    n = closed_form_normal(ROTATIONAL, state, phi).components
    assert abs(general_axis_NR(state, phi, *CANONICAL) - n @ rz) < 1e-12


@settings(max_examples=200, deadline=None)
@given(orthonormal_angles(), u_in, angle, angle)
def test_nr_expansion_matches_frame_evaluation(angles, u, th, phi):
    state = CurveState(0, u, 0, th)
    k = KillingField.from_angles(*angles)
    assert general_axis_NR(state, phi, *angles) == pytest.approx(frame_NR(state, phi, k), abs=1e-12)
