"""Vertical and rotational surfaces of S^2 x R.

A vertical surface is swept by translating a sphere curve along the fibers:

    Psi(s, t)   = (cos u cos v, cos u sin v, sin u, t),   u' = cos u cos th, v' = sin th

A rotational surface is swept by rotating a curve of the xzt-hyperplane about
the z-axis:

    Psi(s, phi) = (cos u cos phi, cos u sin phi, sin u, v), u' = cos th,       v' = sin th

In both cases the generating curve is stored as (u, v, theta) with theta
unwrapped. Unit normals and mean curvatures are available in closed form; the
``oracle`` module recomputes them by finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.special import ellipj, ellipk

from .ambient import AmbientPoint, AmbientVector
from .errors import RegularityError, UsageError

VERTICAL = "vertical"
ROTATIONAL = "rotational"
KINDS = (VERTICAL, ROTATIONAL)

HALF_PI = 0.5 * math.pi


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise UsageError(f"unknown chart kind {kind!r}; expected one of {KINDS}")


def _check_regular(u: float) -> None:
    if not abs(u) < HALF_PI:
        raise RegularityError(f"|u| = {abs(u)!r} is not below pi/2 (cos u = 0 breaks regularity)")


@dataclass(frozen=True)
class CurveState:
    """State (s, u, v, theta) of a generating curve."""

    s: float
    u: float
    v: float
    theta: float

    def __post_init__(self) -> None:
        _check_regular(self.u)


def embed(kind: str, u: float, v: float, w: float) -> np.ndarray:
    """R^4 coordinates of the chart point; ``w`` is t (vertical) or phi (rotational)."""
    _check_regular(u)
    cu, su = math.cos(u), math.sin(u)
    if kind == VERTICAL:
        return np.array([cu * math.cos(v), cu * math.sin(v), su, w])
    if kind == ROTATIONAL:
        return np.array([cu * math.cos(w), cu * math.sin(w), su, v])
    _check_kind(kind)
    raise AssertionError


def normal_array(kind: str, u: float, v: float, theta: float, w: float) -> np.ndarray:
    """Closed-form unit normal as a raw R^4 array."""
    _check_regular(u)
    cu, su = math.cos(u), math.sin(u)
    ct, st = math.cos(theta), math.sin(theta)
    if kind == VERTICAL:
        cv, sv = math.cos(v), math.sin(v)
        return np.array([ct * sv - st * su * cv, -ct * cv - st * su * sv, st * cu, 0.0])
    if kind == ROTATIONAL:
        cw, sw = math.cos(w), math.sin(w)
        return np.array([st * su * cw, st * su * sw, -st * cu, ct])
    _check_kind(kind)
    raise AssertionError


def chart_point(kind: str, state: CurveState, w: float) -> AmbientPoint:
    return AmbientPoint.from_array(embed(kind, state.u, state.v, w))


def closed_form_normal(kind: str, state: CurveState, w: float) -> AmbientVector:
    base = chart_point(kind, state, w)
    return AmbientVector(base, normal_array(kind, state.u, state.v, state.theta, w), tangent=True)


def closed_form_H(kind: str, state: CurveState, theta_prime: float) -> float:
    """Mean curvature (sum of principal curvatures) with respect to the closed-form normal.

    Vertical: H = tan u sin th - th' / cos u.  Rotational: H = th' - sin th tan u.
    """
    _check_kind(kind)
    _check_regular(state.u)
    tu, st = math.tan(state.u), math.sin(state.theta)
    if kind == VERTICAL:
        return tu * st - theta_prime / math.cos(state.u)
    return theta_prime - st * tu


CurveFn = Callable[[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class SurfaceChart:
    """An invariant surface given by its kind and generating curve.

    ``curve`` maps s to (u, v, theta) continuously on the sampled range and
    ``theta_prime`` gives d theta / ds; ``samples`` are the stored curve states.
    """

    kind: str
    samples: tuple[CurveState, ...]
    curve: CurveFn
    theta_prime: Callable[[float], float]

    def __post_init__(self) -> None:
        _check_kind(self.kind)
        if not self.samples:
            raise UsageError("a chart needs at least one curve sample")
        s = np.array([c.s for c in self.samples])
        if s.size > 1 and not np.all(np.diff(s) > 0):
            raise UsageError("curve samples must have strictly increasing s")

    @property
    def sweep_name(self) -> str:
        return "t" if self.kind == VERTICAL else "phi"

    @property
    def s_range(self) -> tuple[float, float]:
        return self.samples[0].s, self.samples[-1].s

    def state(self, s: float) -> CurveState:
        u, v, th = self.curve(s)
        return CurveState(float(s), float(u), float(v), float(th))

    def embed(self, s: float, w: float) -> np.ndarray:
        u, v, _ = self.curve(s)
        return embed(self.kind, float(u), float(v), w)

    def point(self, s: float, w: float) -> AmbientPoint:
        return AmbientPoint.from_array(self.embed(s, w))

    def normal(self, s: float, w: float) -> AmbientVector:
        return closed_form_normal(self.kind, self.state(s), w)

    def mean_curvature(self, s: float) -> float:
        return closed_form_H(self.kind, self.state(s), float(self.theta_prime(s)))

    @classmethod
    def from_samples(cls, kind: str, samples) -> "SurfaceChart":
        """Chart whose curve interpolates ``samples`` with a quintic (or lower order) spline."""
        samples = tuple(samples)
        if not samples:
            raise UsageError("a chart needs at least one curve sample")
        s = np.array([c.s for c in samples])
        y = np.array([[c.u, c.v, c.theta] for c in samples])
        if not np.all(np.diff(s) > 0):
            raise UsageError("curve samples must have strictly increasing s")
        if s.size == 1:
            const = y[0].copy()
            return cls(kind, samples, lambda _s: const, lambda _s: 0.0)
        k = 5 if s.size >= 6 else (3 if s.size >= 4 else 1)
        spline = make_interp_spline(s, y, k=k)
        dspline = spline.derivative()
        return cls(kind, samples, lambda t: spline(t), lambda t: float(dspline(t)[2]))


def _sample_states(curve: CurveFn, s_min: float, s_max: float, n: int) -> tuple[CurveState, ...]:
    return tuple(CurveState(float(s), *map(float, curve(s))) for s in np.linspace(s_min, s_max, n))


def gudermannian(x: float) -> float:
    return math.atan(math.sinh(x))


def inverse_gudermannian(u: float) -> float:
    return math.asinh(math.tan(u))


def chart_from_direction(
    kind: str,
    theta: Callable[[float], float],
    theta_prime: Callable[[float], float],
    s_min: float,
    s_max: float,
    u0: float = 0.0,
    v0: float = 0.0,
    n_samples: int = 101,
    n_nodes: int = 40,
) -> SurfaceChart:
    """Chart whose generating curve has direction angle ``theta(s)`` and passes through (u0, v0) at s = 0.

    Positions are recovered by Gauss-Legendre quadrature on [0, s]:
    rotational u = u0 + int cos th, vertical u = gd(gd^-1(u0) + int cos th),
    and v = v0 + int sin th in both cases. A fixed rule keeps u(s), v(s)
    smooth in s, which the finite-difference oracle relies on.
    """
    _check_kind(kind)
    _check_regular(u0)
    x, wts = np.polynomial.legendre.leggauss(n_nodes)
    U0 = inverse_gudermannian(u0)

    def integrals(s: float) -> tuple[float, float]:
        nodes = 0.5 * s * (x + 1.0)
        th = np.array([theta(t) for t in nodes])
        return 0.5 * s * float(wts @ np.cos(th)), 0.5 * s * float(wts @ np.sin(th))

    def curve(s: float) -> np.ndarray:
        s = float(s)
        ic, is_ = integrals(s)
        u = u0 + ic if kind == ROTATIONAL else gudermannian(U0 + ic)
        return np.array([u, v0 + is_, theta(s)])

    return SurfaceChart(kind, _sample_states(curve, s_min, s_max, n_samples), curve, theta_prime)


def _slice_chart(t0: float, u_max: float, n: int) -> SurfaceChart:
    def curve(s):
        return np.array([float(s), t0, 0.0])

    return SurfaceChart(ROTATIONAL, _sample_states(curve, -u_max, u_max, n), curve, lambda s: 0.0)


def _cylinder_chart(kind: str, half_length: float, n: int) -> SurfaceChart:
    def curve(s):
        return np.array([0.0, float(s), HALF_PI])

    return SurfaceChart(kind, _sample_states(curve, -half_length, half_length, n), curve, lambda s: 0.0)


def _geodesic_cylinder_chart(inclination: float, n: int) -> SurfaceChart:
    # Great circle cos(sig) e_x + sin(sig) (cos i e_y + sin i e_z). With the
    # vertical-chart parameter ds = dsig / cos u, sig is the Jacobi amplitude
    # am(s | sin^2 i).
    if not 0.0 <= inclination <= HALF_PI:
        raise UsageError("inclination must lie in [0, pi/2]")
    ci, si = math.cos(inclination), math.sin(inclination)
    m = si * si
    half = min(float(ellipk(m)), 3.0) if m < 1.0 else 3.0

    def curve(s):
        sn, cn, dn, _ = ellipj(float(s), m)
        u = math.asin(si * sn)
        v = math.atan2(ci * sn, cn)
        return np.array([u, v, math.atan2(ci, si * cn)])

    def theta_prime(s):
        u, _, th = curve(s)
        return math.sin(u) * math.sin(th)

    return SurfaceChart(VERTICAL, _sample_states(curve, -half, half, n), curve, theta_prime)


EXACT_SOLUTIONS = ("slice", "cylinder-c", "geodesic-cylinder")


def exact_solution(
    name: str,
    *,
    kind: str = ROTATIONAL,
    t0: float = 0.0,
    inclination: float = 0.25 * math.pi,
    n_samples: int = 101,
) -> SurfaceChart:
    """Known solitons.

    ``slice``: S^2 x {t0} as a rotational chart, curve (s, t0, 0); an R-soliton
    for every rotation axis. ``cylinder-c``: the vertical cylinder over the
    equator, curve (0, s, pi/2), as a rotational or vertical chart; a V- and
    R_z-soliton. ``geodesic-cylinder``: vertical cylinder over the great circle
    through (1, 0, 0) with the given inclination; a V-soliton.
    """
    if name == "slice":
        return _slice_chart(t0, 1.5, n_samples)
    if name == "cylinder-c":
        _check_kind(kind)
        return _cylinder_chart(kind, math.pi, n_samples)
    if name == "geodesic-cylinder":
        return _geodesic_cylinder_chart(inclination, n_samples)
    raise UsageError(f"unknown exact solution {name!r}; expected one of {EXACT_SOLUTIONS}")
