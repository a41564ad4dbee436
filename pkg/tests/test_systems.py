import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from s2r_solitons.errors import RegularityError, UsageError
from s2r_solitons.systems import (
    S11,
    S12,
    S21,
    S22,
    classify,
    equilibria,
    get_system,
    jacobian,
    linearize,
    rhs,
)

HALF_PI = math.pi / 2
SQ3 = math.sqrt(3.0)
u_in = st.floats(-1.5, 1.5, allow_nan=False)
angle = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)
height = st.floats(-20, 20, allow_nan=False)


def test_rhs_examples():
    assert rhs(S12, (0.0, 0.0)).tolist() == [1.0, 1.0]
    assert np.allclose(rhs(S12, (0.0, HALF_PI)), [0.0, 0.0], atol=1e-16)
    d = rhs(S22, (HALF_PI - 1e-9, 0.0))
    assert np.all(np.isfinite(d))
    assert d[0] == pytest.approx(math.cos(HALF_PI - 1e-9), rel=1e-12)
    assert abs(d[1]) < 1e-17


def test_rhs_rejects_bad_states():
    with pytest.raises(RegularityError):
        rhs(S11, (HALF_PI, 0.0, 0.0))
    with pytest.raises(UsageError):
        rhs(S12, (0.0, 0.0, 0.0))
    with pytest.raises(UsageError):
        get_system("s33")


def test_projection_and_family():
    assert S11.projection is S12 and S21.projection is S22
    assert S12.family == "V" and S22.family == "R"
    assert S22.bounded_at_boundary and not S12.bounded_at_boundary


def test_s12_equilibria():
    eqs = equilibria(S12, (-1, 1, -math.pi, math.pi))
    assert [e.location for e in eqs] == [(0.0, -HALF_PI), (0.0, HALF_PI)]
    assert equilibria(S12, (-1, 1, 0, 1)) == []


def test_s22_equilibria_include_boundary_saddles():
    eqs = equilibria(S22, (-math.pi, math.pi, -math.pi, math.pi))
    by_loc = {e.location: e for e in eqs}
    for u in (HALF_PI, -HALF_PI):
        e = by_loc[(u, 0.0)]
        assert not e.surface and e.classification == "saddle"
    assert by_loc[(0.0, HALF_PI)].surface


def test_linearization_s12():
    lin = linearize(S12, (0.0, HALF_PI))
    assert np.abs(lin.matrix - [[0, -1], [1, -1]]).max() < 1e-12
    assert lin.classification == "stable-spiral"
    for z, ref in zip(lin.eigenvalues, (complex(-0.5, -SQ3 / 2), complex(-0.5, SQ3 / 2))):
        assert abs(z - ref) < 1e-12
    lin = linearize(S12, (0.0, -HALF_PI))
    assert np.abs(lin.matrix - [[0, 1], [-1, 1]]).max() < 1e-12
    assert lin.classification == "unstable-spiral"


def test_linearization_s22_saddle():
    lin = linearize(S22, (HALF_PI, 0.0))
    assert np.abs(lin.matrix - [[-1, 0], [0, 1]]).max() < 1e-12
    assert lin.classification == "saddle"


def test_classify_nodes_and_degenerate():
    assert classify((complex(-2, 0), complex(-1, 0))) == "stable-node"
    assert classify((complex(1, 0), complex(3, 0))) == "unstable-node"
    assert classify((complex(0, -1), complex(0, 1))) == "degenerate"


def test_s22_bounded_near_boundary():
    grid = [(HALF_PI - 10.0 ** -k, th) for k in range(1, 12) for th in np.linspace(-math.pi, math.pi, 13)]
    vals = np.array([rhs(S22, p) for p in grid] + [rhs(S22, (-u, th)) for u, th in grid])
    assert np.abs(vals).max() <= 2.0


def test_s12_unbounded_near_boundary():
    assert abs(rhs(S12, (HALF_PI - 1e-10, 1.0))[1]) > 1e9


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([S12, S22]), u_in, angle)
def test_jacobian_matches_finite_differences(system, u, th):
    h = 1e-6
    fd = np.column_stack([
        (rhs(system, (u + h, th)) - rhs(system, (u - h, th))) / (2 * h),
        (rhs(system, (u, th + h)) - rhs(system, (u, th - h))) / (2 * h),
    ])
    scale = max(1.0, np.abs(fd).max())
    assert np.abs(jacobian(system, (u, th)) - fd).max() < 1e-6 * scale


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([S11, S21]), u_in, height, angle)
def test_reflection_identity(system, u, v, th):
    # (u, v, th)(s) -> (-u, v, -th)(-s) maps solutions to solutions
    du, dv, dth = rhs(system, (u, v, th))
    mu, mv, mth = rhs(system, (-u, v, -th))
    assert mu == pytest.approx(du, abs=1e-14)
    assert mv == pytest.approx(-dv, abs=1e-14)
    assert mth == pytest.approx(dth, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([S11, S21]), u_in, height, angle)
def test_projection_drops_v(system, u, v, th):
    full = rhs(system, (u, v, th))
    planar = rhs(system.projection, (u, th))
    assert full[[0, 2]].tolist() == planar.tolist()
