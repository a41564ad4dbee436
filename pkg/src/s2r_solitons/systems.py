"""The soliton ODE systems and their equilibria.

Rotational V-solitons (generating curve of a rotational chart):

    S11:  u' = cos th,        v' = sin th,  th' = sin th tan u + cos th

Vertical R-solitons (generating curve of a vertical chart):

    S21:  u' = cos u cos th,  v' = sin th,  th' = sin th sin u + cos^2 u cos th

S12 and S22 are the (u, th) projections; the th equation never involves v.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import RegularityError, UsageError

HALF_PI = 0.5 * math.pi
DEGENERATE_TOL = 1e-10

STABLE_SPIRAL = "stable-spiral"
UNSTABLE_SPIRAL = "unstable-spiral"
SADDLE = "saddle"
STABLE_NODE = "stable-node"
UNSTABLE_NODE = "unstable-node"
DEGENERATE = "degenerate"


@dataclass(frozen=True)
class SolitonSystem:
    id: str
    dimension: int
    killing: str
    chart_kind: str

    @property
    def planar(self) -> bool:
        return self.dimension == 2

    @property
    def family(self) -> str:
        """'V' for S11/S12, 'R' for S21/S22."""
        return "V" if self.id in ("s11", "s12") else "R"

    @property
    def projection(self) -> "SolitonSystem":
        return S12 if self.family == "V" else S22

    @property
    def bounded_at_boundary(self) -> bool:
        """True when the right-hand side extends continuously to |u| = pi/2."""
        return self.family == "R"

    def __str__(self) -> str:
        return self.id


S11 = SolitonSystem("s11", 3, "V", "rotational")
S12 = SolitonSystem("s12", 2, "V", "rotational")
S21 = SolitonSystem("s21", 3, "R_z", "vertical")
S22 = SolitonSystem("s22", 2, "R_z", "vertical")
SYSTEMS = {s.id: s for s in (S11, S12, S21, S22)}


def get_system(system: str | SolitonSystem) -> SolitonSystem:
    if isinstance(system, SolitonSystem):
        return system
    try:
        return SYSTEMS[str(system).lower()]
    except KeyError:
        raise UsageError(f"unknown system {system!r}; expected one of {sorted(SYSTEMS)}") from None


def planar_field(family: str, u: float, th: float) -> tuple[float, float]:
    """(u', th') without any domain check; ``family`` is 'V' or 'R'."""
    cu, su = math.cos(u), math.sin(u)
    ct, st = math.cos(th), math.sin(th)
    if family == "V":
        return ct, st * (su / cu) + ct
    return cu * ct, st * su + cu * cu * ct


def raw_rhs(system: SolitonSystem, y) -> np.ndarray:
    """Right-hand side without domain checks; used inside the integrator."""
    if system.planar:
        du, dth = planar_field(system.family, y[0], y[1])
        return np.array([du, dth])
    du, dth = planar_field(system.family, y[0], y[2])
    return np.array([du, math.sin(y[2]), dth])


def rhs(system: str | SolitonSystem, state) -> np.ndarray:
    """Derivative of the state (u, v, th) for S11/S21 or (u, th) for S12/S22."""
    system = get_system(system)
    y = np.asarray(state, dtype=float)
    if y.shape != (system.dimension,):
        raise UsageError(f"{system.id} expects a state of length {system.dimension}, got shape {y.shape}")
    if not abs(y[0]) < HALF_PI:
        raise RegularityError(f"|u| = {abs(y[0])!r} outside the regular domain |u| < pi/2")
    return raw_rhs(system, y)


def jacobian(system: str | SolitonSystem, point) -> np.ndarray:
    """Analytic Jacobian of the planar field (u', th') with respect to (u, th)."""
    system = get_system(system)
    u, th = float(point[0]), float(point[1])
    cu, su = math.cos(u), math.sin(u)
    ct, st = math.cos(th), math.sin(th)
    if system.family == "V":
        if cu == 0.0:
            raise RegularityError("the S12 field is singular at |u| = pi/2")
        return np.array([
            [0.0, -st],
            [st / (cu * cu), ct * su / cu - st],
        ])
    return np.array([
        [-su * ct, -cu * st],
        [st * cu - 2.0 * cu * su * ct, ct * su - cu * cu * st],
    ])


def eigenvalues_2x2(a: np.ndarray) -> tuple[complex, complex]:
    """Eigenvalues from trace and determinant, ordered by (imag, real)."""
    tr = a[0, 0] + a[1, 1]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    root = cmath.sqrt(tr * tr - 4.0 * det)
    pair = sorted(((tr - root) / 2.0, (tr + root) / 2.0), key=lambda z: (z.imag, z.real))
    return pair[0], pair[1]


def classify(eigenvalues) -> str:
    l1, l2 = eigenvalues
    if abs(l1.imag) > DEGENERATE_TOL:
        if abs(l1.real) < DEGENERATE_TOL:
            return DEGENERATE
        return STABLE_SPIRAL if l1.real < 0 else UNSTABLE_SPIRAL
    r1, r2 = l1.real, l2.real
    if abs(r1) < DEGENERATE_TOL or abs(r2) < DEGENERATE_TOL:
        return DEGENERATE
    if r1 * r2 < 0:
        return SADDLE
    return STABLE_NODE if r1 < 0 else UNSTABLE_NODE


@dataclass(frozen=True, eq=False)
class Linearization:
    matrix: np.ndarray
    eigenvalues: tuple[complex, complex]
    classification: str


def linearize(system: str | SolitonSystem, point) -> Linearization:
    a = jacobian(system, point)
    ev = eigenvalues_2x2(a)
    return Linearization(a, ev, classify(ev))


@dataclass(frozen=True, eq=False)
class Equilibrium:
    u: float
    theta: float
    matrix: np.ndarray
    eigenvalues: tuple[complex, complex]
    classification: str
    surface: bool

    @property
    def location(self) -> tuple[float, float]:
        return self.u, self.theta


def _multiples(offset: float, lo: float, hi: float, tol: float = 1e-12) -> list[float]:
    """All offset + k*pi inside [lo - tol, hi + tol]."""
    k0 = math.ceil((lo - tol - offset) / math.pi)
    k1 = math.floor((hi + tol - offset) / math.pi)
    return [offset + k * math.pi for k in range(k0, k1 + 1)]


def equilibria(system: str | SolitonSystem, window=(-HALF_PI, HALF_PI, -math.pi, math.pi)) -> list[Equilibrium]:
    """Zeros of the planar field inside ``window = (u_min, u_max, th_min, th_max)``.

    S12: cos th = 0 and tan u = 0, restricted to |u| < pi/2.
    S22: (k pi, pi/2 + j pi) and (pi/2 + k pi, j pi). Points with |u| >= pi/2
    are returned with ``surface=False``.
    """
    system = get_system(system).projection
    u_lo, u_hi, t_lo, t_hi = map(float, window)
    if u_lo > u_hi or t_lo > t_hi:
        raise UsageError(f"empty window {window}")
    points: list[tuple[float, float]] = []
    if system.family == "V":
        us = [u for u in _multiples(0.0, u_lo, u_hi) if abs(u) < HALF_PI]
        points = [(u, th) for u in us for th in _multiples(HALF_PI, t_lo, t_hi)]
    else:
        points += [(u, th) for u in _multiples(0.0, u_lo, u_hi) for th in _multiples(HALF_PI, t_lo, t_hi)]
        points += [(u, th) for u in _multiples(HALF_PI, u_lo, u_hi) for th in _multiples(0.0, t_lo, t_hi)]
    out = []
    for u, th in sorted(points):
        lin = linearize(system, (u, th))
        surface = abs(u) < HALF_PI - 1e-12
        out.append(Equilibrium(u, th, lin.matrix, lin.eigenvalues, lin.classification, surface))
    return out


def nearest_surface_equilibrium(family: str, u: float, th: float) -> tuple[float, float]:
    """Closest point (0, pi/2 + k pi) in the (u, th)-plane; these are the only surface equilibria."""
    k = round((th - HALF_PI) / math.pi)
    return 0.0, HALF_PI + k * math.pi
