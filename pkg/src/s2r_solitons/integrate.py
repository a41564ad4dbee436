"""Adaptive integration of the soliton systems.

The stepping itself is SciPy's DOP853 (embedded 8(5,3) Runge-Kutta pair with
a 7th order continuous extension). This module adds what the geometry needs on
top: a guard keeping |u| below pi/2, termination when the (u, theta) state has
settled on a surface equilibrium, integration in both directions from a
middle parameter s0, and event location on the dense output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .charts import CurveState, SurfaceChart
from .errors import IntegrationError, RegularityError, UsageError
from .systems import HALF_PI, SolitonSystem, get_system, nearest_surface_equilibrium, planar_field, raw_rhs

SPAN_EXHAUSTED = "span-exhausted"
DOMAIN_BOUNDARY = "domain-boundary"
CONVERGED = "converged-to-equilibrium"
EVENT_STOP = "event-stop"

EVENT_TOL = 1e-11
STATIONARY_TOL = 1e-15


class _Stationary:
    """Dense output of a solution sitting on an equilibrium of the planar field."""

    def __init__(self, system: SolitonSystem, y0: np.ndarray, s0: float):
        self.y0 = y0
        self.s0 = s0
        self.dv = 0.0 if system.planar else math.sin(y0[-1])

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = np.repeat(self.y0[:, None], s.size, axis=1)
        if self.y0.size == 3:
            out[1] = self.y0[1] + self.dv * (s.ravel() - self.s0)
        return out[:, 0] if s.ndim == 0 else out


@dataclass(frozen=True)
class Event:
    """Scalar event function g(s, state); roots are sign changes of g."""

    name: str
    fn: Callable[[float, np.ndarray], float]
    terminal: bool = False


U_AXIS = Event("u=0", lambda s, y: float(y[0]))
V_CRITICAL = Event("sin(theta)=0", lambda s, y: math.sin(float(y[-1])))


@dataclass(frozen=True)
class IntegrationConfig:
    """Solver settings.

    Integration runs from ``s0`` towards both ends of ``s_span``. The
    trajectory stops at |u| > pi/2 - ``domain_margin`` and, when
    ``stop_at_equilibrium`` is set, once the (u, theta) state is within
    ``eq_radius`` of a surface equilibrium with planar field norm below
    ``eq_radius``. ``surface_domain=False`` lifts the |u| guard for the
    R-systems, whose field is bounded everywhere.
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = 0.25
    s_span: tuple[float, float] = (-60.0, 60.0)
    s0: float = 0.0
    domain_margin: float = 1e-6
    eq_radius: float = 1e-9
    stop_at_equilibrium: bool = True
    surface_domain: bool = True
    events: tuple[Event, ...] = ()

    def __post_init__(self) -> None:
        if not (self.rtol > 0 and self.atol > 0 and self.max_step > 0 and self.eq_radius > 0):
            raise UsageError("tolerances, max_step and eq_radius must be positive")
        if not 0.0 < self.domain_margin < 0.25 * math.pi:
            raise UsageError("domain_margin must lie in (0, pi/4)")
        a, b = self.s_span
        if not a <= self.s0 <= b:
            raise UsageError(f"s0 = {self.s0} outside s_span {self.s_span}")

    def halved(self) -> "IntegrationConfig":
        return replace(self, rtol=self.rtol / 2, atol=self.atol / 2)

    def with_span(self, a: float, b: float, s0: float | None = None) -> "IntegrationConfig":
        return replace(self, s_span=(a, b), s0=self.s0 if s0 is None else s0)


@dataclass(frozen=True, eq=False)
class EventRecord:
    name: str
    s: float
    state: np.ndarray


@dataclass(frozen=True, eq=False)
class EventLog:
    records: tuple[EventRecord, ...] = ()
    degenerate: frozenset[str] = frozenset()

    def named(self, name: str, s_min: float = -math.inf, s_max: float = math.inf) -> list[EventRecord]:
        return [r for r in self.records if r.name == name and s_min <= r.s <= s_max]

    def __len__(self) -> int:
        return len(self.records)


@dataclass(eq=False)
class Trajectory:
    """Accepted steps of an integration plus the dense output of each branch."""

    system: SolitonSystem
    s: np.ndarray
    y: np.ndarray
    s0: float
    termination: str
    termination_backward: str | None = None
    events: EventLog = field(default_factory=EventLog)
    forward: object | None = None
    backward: object | None = None

    @property
    def u(self) -> np.ndarray:
        return self.y[:, 0]

    @property
    def theta(self) -> np.ndarray:
        return self.y[:, -1]

    @property
    def v(self) -> np.ndarray:
        if self.system.planar:
            raise UsageError(f"{self.system.id} has no v component")
        return self.y[:, 1]

    @property
    def s_min(self) -> float:
        return float(self.s[0])

    @property
    def s_max(self) -> float:
        return float(self.s[-1])

    @property
    def terminal_state(self) -> np.ndarray:
        return self.y[-1]

    def __call__(self, s):
        """Dense evaluation; scalar s gives shape (dim,), array s gives (dim, m)."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        slack = 1e-12 * max(1.0, abs(self.s_min), abs(self.s_max))
        if np.any(s_arr < self.s_min - slack) or np.any(s_arr > self.s_max + slack):
            raise UsageError(f"s outside the integrated range [{self.s_min}, {self.s_max}]")
        out = np.empty((self.y.shape[1], s_arr.size))
        fw = s_arr >= self.s0
        for mask, sol in ((fw, self.forward), (~fw, self.backward)):
            if not mask.any():
                continue
            if sol is None:
                out[:, mask] = self.y[np.searchsorted(self.s, self.s0)][:, None]
            else:
                out[:, mask] = sol(s_arr[mask])
        return out[:, 0] if np.ndim(s) == 0 else out

    def derivative(self, s: float) -> np.ndarray:
        return raw_rhs(self.system, self(s))

    def chart(self) -> SurfaceChart:
        """The invariant surface generated by an S11 (rotational) or S21 (vertical) trajectory."""
        if self.system.planar:
            raise UsageError("planar trajectories carry no v component and define no surface")
        samples = tuple(CurveState(float(s), *map(float, row)) for s, row in zip(self.s, self.y))
        system = self.system
        return SurfaceChart(
            system.chart_kind,
            samples,
            lambda s: self(s),
            lambda s: float(raw_rhs(system, self(s))[2]),
        )


def _solve_branch(system: SolitonSystem, y0: np.ndarray, s_start: float, s_end: float, cfg: IntegrationConfig):
    guard = system.family == "V" or cfg.surface_domain
    limit = HALF_PI - cfg.domain_margin
    ith = system.dimension - 1

    def boundary(s, y):
        return limit - abs(y[0])

    boundary.terminal = True
    boundary.direction = -1

    def settled(s, y):
        u, th = y[0], y[ith]
        ue, te = nearest_surface_equilibrium(system.family, u, th)
        du, dth = planar_field(system.family, u, th)
        return max(math.hypot(u - ue, th - te), math.hypot(du, dth)) - cfg.eq_radius

    settled.terminal = True
    settled.direction = -1

    events: list = []
    kinds: list[str] = []
    if guard:
        events.append(boundary)
        kinds.append(DOMAIN_BOUNDARY)
    if cfg.stop_at_equilibrium:
        events.append(settled)
        kinds.append(CONVERGED)
    for ev in cfg.events:
        if ev.terminal:
            def g(s, y, _fn=ev.fn):
                return _fn(s, y)

            g.terminal = True
            events.append(g)
            kinds.append(EVENT_STOP)

    def fun(s, y):
        return raw_rhs(system, y)

    sol = solve_ivp(
        fun,
        (s_start, s_end),
        y0,
        method="DOP853",
        rtol=cfg.rtol,
        atol=cfg.atol,
        max_step=cfg.max_step,
        dense_output=True,
        events=events or None,
    )
    if sol.status == 1:
        fired = [k for k, te in zip(kinds, sol.t_events) if len(te)]
        reason = fired[0]
    elif sol.status == 0:
        reason = SPAN_EXHAUSTED
    elif guard and abs(sol.y[0, -1]) > HALF_PI - 100.0 * cfg.domain_margin:
        # step size underflow on the approach to the boundary
        reason = DOMAIN_BOUNDARY
    else:
        raise IntegrationError(f"{system.id} integration failed at s = {sol.t[-1]}: {sol.message}")
    return sol.t, sol.y.T, sol.sol, reason


def integrate(system: str | SolitonSystem, initial_state, config: IntegrationConfig | None = None) -> Trajectory:
    """Integrate ``system`` from ``initial_state`` at s = config.s0 over config.s_span."""
    system = get_system(system)
    cfg = config or IntegrationConfig()
    y0 = np.asarray(initial_state, dtype=float)
    if y0.shape != (system.dimension,):
        raise UsageError(f"{system.id} expects an initial state of length {system.dimension}")
    if not np.all(np.isfinite(y0)):
        raise UsageError("initial state must be finite")
    guard = system.family == "V" or cfg.surface_domain
    if guard and not abs(y0[0]) < HALF_PI:
        raise RegularityError(f"initial |u| = {abs(y0[0])!r} is not below pi/2")

    a, b = cfg.s_span
    s0 = cfg.s0
    if guard and abs(y0[0]) >= HALF_PI - cfg.domain_margin:
        traj = Trajectory(system, np.array([s0]), y0[None, :].copy(), s0, DOMAIN_BOUNDARY,
                          DOMAIN_BOUNDARY if a < s0 else None)
        traj.events = detect_events(traj, cfg.events)
        return traj

    s_parts, y_parts = [], []
    forward = backward = None
    reason_fw = reason_bw = None
    if math.hypot(*planar_field(system.family, y0[0], y0[-1])) <= STATIONARY_TOL:
        # The field vanishes to rounding: the solution is the equilibrium itself.
        # Integrating would only amplify rounding along the unstable direction.
        stat = _Stationary(system, y0.copy(), s0)
        n = max(2, int(math.ceil((b - a) / cfg.max_step)) + 1)
        grid = np.unique(np.concatenate([np.linspace(a, b, n), [s0]]))
        traj = Trajectory(system, grid, stat(grid).T.copy(), s0, SPAN_EXHAUSTED,
                          SPAN_EXHAUSTED if a < s0 < b else None,
                          forward=stat if s0 < b else None, backward=stat if a < s0 else None)
        traj.events = detect_events(traj, cfg.events)
        return traj
    if a < s0:
        t, y, backward, reason_bw = _solve_branch(system, y0, s0, a, cfg)
        s_parts.append(t[::-1])
        y_parts.append(y[::-1])
    if s0 < b:
        t, y, forward, reason_fw = _solve_branch(system, y0, s0, b, cfg)
        if s_parts:
            t, y = t[1:], y[1:]
        s_parts.append(t)
        y_parts.append(y)
    if not s_parts:
        s_parts, y_parts = [np.array([s0])], [y0[None, :]]
        reason_fw = SPAN_EXHAUSTED

    traj = Trajectory(
        system,
        np.concatenate(s_parts),
        np.concatenate(y_parts),
        s0,
        reason_fw if reason_fw is not None else reason_bw,
        reason_bw,
        forward=forward,
        backward=backward,
    )
    traj.events = detect_events(traj, cfg.events)
    return traj


def _dense_grid(traj: Trajectory, per_step: int) -> np.ndarray:
    s = traj.s
    if s.size < 2:
        return s.copy()
    frac = np.arange(per_step) / per_step
    grid = (s[:-1, None] + np.diff(s)[:, None] * frac[None, :]).ravel()
    return np.append(grid, s[-1])


def detect_events(traj: Trajectory, events, per_step: int = 8) -> EventLog:
    """Locate every sign change of each event function along the trajectory.

    Sign changes are bracketed on a subdivision of the accepted steps and
    refined with Brent's method on the dense output. An event function that
    vanishes identically along the trajectory is reported in ``degenerate``
    instead of producing roots.
    """
    records: list[EventRecord] = []
    degenerate: set[str] = set()
    grid = _dense_grid(traj, per_step)
    states = traj(grid) if grid.size > 1 else traj.y.T
    for ev in events:
        g = np.array([ev.fn(s, states[:, i]) for i, s in enumerate(grid)])
        if np.all(np.abs(g) <= 1e-14):
            degenerate.add(ev.name)
            continue
        sg = np.sign(g)
        for i in np.flatnonzero(sg == 0):
            records.append(EventRecord(ev.name, float(grid[i]), states[:, i].copy()))
        for i in np.flatnonzero(sg[:-1] * sg[1:] < 0):
            f = lambda s: ev.fn(s, traj(s))
            root = brentq(f, grid[i], grid[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
            st = traj(root)
            if abs(ev.fn(root, st)) >= EVENT_TOL:
                raise IntegrationError(f"event {ev.name} not resolved at s = {root}")
            records.append(EventRecord(ev.name, float(root), st))
    records.sort(key=lambda r: (r.name, r.s))
    return EventLog(tuple(records), frozenset(degenerate))
