"""Finite-difference verification of charts and of the soliton equation.

Everything here works from the R^4 embedding (s, w) -> Psi(s, w) only:
tangents (five-point) and the derivatives of the normal (three-point) are
central differences, the
normal is the unit vector of R^4 orthogonal to Psi_s, Psi_w and the radial
direction (x, y, z, 0), and H is the usual quotient of fundamental forms.
Nothing is taken from the closed-form formulas of ``charts`` except, when
requested, the sign used to orient the normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ambient import AmbientPoint, AmbientVector, KillingField, frame_vector, killing_array
from .charts import ROTATIONAL, CurveState, SurfaceChart, normal_array
from .errors import RegularityError

DEFAULT_STEP = 1e-4
GRAM_TOL = 1e-14

Evaluator = Callable[[float, float], np.ndarray]


def cross4(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vector X of R^4 with <X, d> = det[a; b; c; d] for every d."""
    m = np.array([a, b, c])
    minors = np.array([np.delete(m, i, axis=1) for i in range(4)])
    signs = np.array([-1.0, 1.0, -1.0, 1.0])
    return signs * np.linalg.det(minors)


@dataclass(frozen=True, eq=False)
class FundamentalForms:
    g11: float
    g12: float
    g22: float
    b11: float
    b12: float
    b22: float
    normal: np.ndarray
    point: np.ndarray

    @property
    def H(self) -> float:
        """Sum of the principal curvatures."""
        num = self.g22 * self.b11 - 2.0 * self.g12 * self.b12 + self.g11 * self.b22
        return num / (self.g11 * self.g22 - self.g12 ** 2)

    @property
    def N(self) -> AmbientVector:
        return AmbientVector(AmbientPoint.from_array(self.point), self.normal, tangent=True)


def _d5(g: Callable[[float], np.ndarray], x: float, h: float) -> np.ndarray:
    return (g(x - 2.0 * h) - 8.0 * g(x - h) + 8.0 * g(x + h) - g(x + 2.0 * h)) / (12.0 * h)


def _tangents(f: Evaluator, s: float, w: float, h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Fourth-order tangents keep the normal accurate to ~h^4; the derivatives
    # of the normal below stay second order.
    p = f(s, w)
    ps = _d5(lambda x: f(x, w), s, h)
    pw = _d5(lambda x: f(s, x), w, h)
    return p, ps, pw


def _unit_normal(p: np.ndarray, ps: np.ndarray, pw: np.ndarray) -> np.ndarray:
    # Orientation rule: det[radial, Psi_w, Psi_s, N] > 0. Both closed-form
    # normals of ``charts`` satisfy it.
    radial = np.array([p[0], p[1], p[2], 0.0])
    n = cross4(radial, pw, ps)
    nn = np.linalg.norm(n)
    if nn < GRAM_TOL:
        raise RegularityError("tangent vectors are degenerate")
    return n / nn


def _forms(f: Evaluator, s: float, w: float, h: float, sign: float):
    p, ps, pw = _tangents(f, s, w, h)
    g11, g12, g22 = ps @ ps, ps @ pw, pw @ pw
    if g11 * g22 - g12 * g12 < GRAM_TOL:
        raise RegularityError(f"degenerate first fundamental form at (s, w) = ({s}, {w})")

    def normal_at(a, b):
        return sign * _unit_normal(*_tangents(f, a, b, h))

    n = sign * _unit_normal(p, ps, pw)
    ns = (normal_at(s + h, w) - normal_at(s - h, w)) / (2.0 * h)
    nw = (normal_at(s, w + h) - normal_at(s, w - h)) / (2.0 * h)
    # Derivatives of N taken in R^4 differ from the covariant ones by a radial
    # vector, which is orthogonal to the tangent Psi_s, Psi_w.
    b11 = -ns @ ps
    b12 = -0.5 * (ns @ pw + nw @ ps)
    b22 = -nw @ pw
    return np.array([g11, g12, g22, b11, b12, b22]), n, p


def fd_forms(
    evaluator: Evaluator,
    s: float,
    w: float,
    h: float = DEFAULT_STEP,
    richardson: bool = False,
    reference_normal: np.ndarray | None = None,
) -> FundamentalForms:
    """First and second fundamental forms, normal and H by central differences.

    With ``richardson=True`` the coefficients from steps h and 2h are combined
    as (4 X_h - X_2h) / 3, cancelling the O(h^2) term. If
    ``reference_normal`` is given the normal is flipped to agree with it.
    """
    sign = 1.0
    if reference_normal is not None:
        p, ps, pw = _tangents(evaluator, s, w, h)
        if _unit_normal(p, ps, pw) @ np.asarray(reference_normal) < 0:
            sign = -1.0
    coeffs, n, p = _forms(evaluator, s, w, h, sign)
    if richardson:
        coarse, _, _ = _forms(evaluator, s, w, 2.0 * h, sign)
        coeffs = (4.0 * coeffs - coarse) / 3.0
    return FundamentalForms(*map(float, coeffs), normal=n, point=p)


def chart_forms(chart: SurfaceChart, s: float, w: float, h: float = DEFAULT_STEP, richardson: bool = False) -> FundamentalForms:
    return fd_forms(chart.embed, s, w, h=h, richardson=richardson)


def soliton_residual(
    chart: SurfaceChart,
    killing: KillingField,
    s: float,
    w: float,
    method: str = "fd",
    h: float = DEFAULT_STEP,
) -> float:
    """H - <N, X> at the chart point (s, w).

    ``method="fd"`` uses the finite-difference oracle; ``"closed"`` uses the
    closed-form normal and mean curvature of the chart.
    """
    if method == "closed":
        st = chart.state(s)
        n = normal_array(chart.kind, st.u, st.v, st.theta, w)
        p = chart.embed(s, w)
        return chart.mean_curvature(s) - float(n @ killing_array(killing, p))
    forms = chart_forms(chart, s, w, h=h)
    return forms.H - float(forms.normal @ killing_array(killing, forms.point))


@dataclass(frozen=True)
class ResidualRow:
    s: float
    w: float
    H_closed: float
    H_fd: float
    NX: float
    residual: float


RESIDUAL_HEADER = ("s", "w", "H_closed", "H_fd", "NX", "residual")


def residual_report(chart: SurfaceChart, killing: KillingField, points, h: float = DEFAULT_STEP) -> list[ResidualRow]:
    """One row per (s, w): closed-form and FD mean curvature, <N, X> and the FD residual."""
    rows = []
    for s, w in points:
        forms = chart_forms(chart, float(s), float(w), h=h)
        nx = float(forms.normal @ killing_array(killing, forms.point))
        rows.append(ResidualRow(float(s), float(w), chart.mean_curvature(float(s)), forms.H, nx, forms.H - nx))
    return rows


def sample_points(chart: SurfaceChart, n: int, rng: np.random.Generator, margin: float = 1e-3,
                  w_range: tuple[float, float] = (0.0, 2.0 * math.pi)) -> np.ndarray:
    """``n`` random (s, w) pairs away from the ends of the chart's s-range."""
    a, b = chart.s_range
    s = rng.uniform(a + margin, b - margin, size=n)
    w = rng.uniform(*w_range, size=n)
    return np.column_stack([s, w])


def general_axis_NR(state: CurveState, phi: float, m1: float, n1: float, m2: float, n2: float) -> float:
    """<N, R> on a rotational chart for the rotation field of the frame given by (m_i, n_i).

    Expanded form: sin th (A sin phi + B cos phi) with
    A = sin m1 cos m2 sin n2 - cos m1 sin n1 sin m2,
    B = sin m1 cos m2 cos n2 - cos m1 cos n1 sin m2.
    """
    a, b = nr_coefficients(m1, n1, m2, n2)
    st = math.sin(state.theta)
    return a * st * math.sin(phi) + b * st * math.cos(phi)


def nr_coefficients(m1: float, n1: float, m2: float, n2: float) -> tuple[float, float]:
    """Coefficients of sin th sin phi and sin th cos phi in <N, R>."""
    sm1, cm1, sm2, cm2 = math.sin(m1), math.cos(m1), math.sin(m2), math.cos(m2)
    a = sm1 * cm2 * math.sin(n2) - cm1 * math.sin(n1) * sm2
    b = sm1 * cm2 * math.cos(n2) - cm1 * math.cos(n1) * sm2
    return a, b


def frame_NR(state: CurveState, phi: float, killing: KillingField) -> float:
    """Same quantity computed directly: -<Psi,E2><N,E1> + <Psi,E1><N,E2>."""
    p = np.array([math.cos(state.u) * math.cos(phi), math.cos(state.u) * math.sin(phi), math.sin(state.u), state.v])
    n = normal_array(ROTATIONAL, state.u, state.v, state.theta, phi)
    return float(n @ killing_array(killing, p))


def phi_variance(state: CurveState, angles, n_phi: int = 64) -> float:
    """Population variance of <N, R> over an n_phi-point grid of phi in [0, 2 pi)."""
    phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
    vals = np.array([general_axis_NR(state, p, *angles) for p in phis])
    return float(vals.var())


def is_canonical_axis(m1: float, n1: float, m2: float, n2: float, tol: float = 1e-12) -> bool:
    """True when E1 x E2 = +-(0, 0, 1), i.e. both coefficients of <N, R> vanish."""
    axis = np.cross(frame_vector(m1, n1), frame_vector(m2, n2))
    return bool(abs(axis[0]) < tol and abs(axis[1]) < tol)
