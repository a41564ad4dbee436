"""Geometric analysis of computed generating curves and phase portraits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError
from .integrate import U_AXIS, V_CRITICAL, IntegrationConfig, Trajectory, detect_events, integrate
from .systems import HALF_PI, Equilibrium, SolitonSystem, equilibria, get_system, raw_rhs

INTERSECTION_TOL = 1e-8
MIN_PARAM_GAP = 1e-3


# --------------------------------------------------------------------------
# polyline crossings


def segment_crossings(p: np.ndarray, q: np.ndarray | None = None, block: int = 256):
    """Transversal crossings between the segments of polylines ``p`` and ``q``.

    Returns rows (i, j, a, b): segment i of p at parameter a in [0, 1) meets
    segment j of q at parameter b in [0, 1). With ``q=None`` the self-crossings
    of ``p`` are returned (i < j, adjacent segments skipped). Collinear and
    merely touching configurations are not crossings.
    """
    p = np.asarray(p, dtype=float)
    same = q is None
    q = p if same else np.asarray(q, dtype=float)
    if len(p) < 2 or len(q) < 2:
        return np.empty((0, 4))
    p0, d1 = p[:-1], np.diff(p, axis=0)
    q0, d2 = q[:-1], np.diff(q, axis=0)
    qlo, qhi = np.minimum(q[:-1], q[1:]), np.maximum(q[:-1], q[1:])
    out = []
    for start in range(0, len(p0), block):
        sl = slice(start, start + block)
        plo = np.minimum(p[:-1][sl], p[1:][sl])
        phi = np.maximum(p[:-1][sl], p[1:][sl])
        near = (
            (plo[:, None, 0] <= qhi[None, :, 0]) & (qlo[None, :, 0] <= phi[:, None, 0])
            & (plo[:, None, 1] <= qhi[None, :, 1]) & (qlo[None, :, 1] <= phi[:, None, 1])
        )
        ii, jj = np.nonzero(near)
        ii = ii + start
        if same:
            keep = jj > ii + 1
            ii, jj = ii[keep], jj[keep]
        if ii.size == 0:
            continue
        a1, b1 = d1[ii], d2[jj]
        r = q0[jj] - p0[ii]
        denom = a1[:, 0] * b1[:, 1] - a1[:, 1] * b1[:, 0]
        ok = denom != 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            ta = (r[:, 0] * b1[:, 1] - r[:, 1] * b1[:, 0]) / denom
            tb = (r[:, 0] * a1[:, 1] - r[:, 1] * a1[:, 0]) / denom
        hit = ok & (ta >= 0) & (ta < 1) & (tb >= 0) & (tb < 1)
        if hit.any():
            out.append(np.column_stack([ii[hit], jj[hit], ta[hit], tb[hit]]))
    return np.concatenate(out) if out else np.empty((0, 4))


# --------------------------------------------------------------------------
# self-intersections of beta = (u, v)


@dataclass(frozen=True)
class SelfIntersection:
    s_i: float
    s_j: float
    u: float
    v: float
    defect: float


@dataclass(frozen=True)
class IntersectionReport:
    records: tuple[SelfIntersection, ...] = ()
    degenerate: bool = False
    unresolved: int = 0

    def __len__(self) -> int:
        return len(self.records)


def _resample(traj: Trajectory, ds: float) -> np.ndarray:
    """Dense grid stepping by ``ds`` outward from s0 in both directions."""
    left = traj.s0 - ds * np.arange(int(math.floor((traj.s0 - traj.s_min) / ds)), 0, -1)
    right = traj.s0 + ds * np.arange(0, int(math.floor((traj.s_max - traj.s0) / ds)) + 1)
    grid = np.concatenate([left, right])
    return grid[(grid >= traj.s_min) & (grid <= traj.s_max)]


def _beta(traj: Trajectory, s: float) -> np.ndarray:
    y = traj(s)
    return y[:2]


def _refine(traj: Trajectory, a: float, b: float, iters: int = 40) -> tuple[float, float, float]:
    """Newton's method on beta(a) - beta(b) = 0."""
    best = (a, b, float(np.linalg.norm(_beta(traj, a) - _beta(traj, b))))
    for _ in range(iters):
        f = _beta(traj, a) - _beta(traj, b)
        da = raw_rhs(traj.system, traj(a))[:2]
        db = raw_rhs(traj.system, traj(b))[:2]
        jac = np.column_stack([da, -db])
        if abs(np.linalg.det(jac)) < 1e-300:
            break
        step = np.linalg.solve(jac, -f)
        a = min(max(a + step[0], traj.s_min), traj.s_max)
        b = min(max(b + step[1], traj.s_min), traj.s_max)
        res = float(np.linalg.norm(_beta(traj, a) - _beta(traj, b)))
        if res < best[2]:
            best = (a, b, res)
        if res < 1e-14 or np.abs(step).max() < 1e-15:
            break
    return best


def find_self_intersections(curve, ds: float = 0.05) -> IntersectionReport:
    """Self-crossings of beta(s) = (u(s), v(s)).

    ``curve`` is an S11/S21 Trajectory (crossings are located on a resampled
    polyline and refined by Newton's method on the dense output) or an (n, 2)
    array of (u, v) points (crossings are reported at segment level). A curve
    lying on the v-axis (u identically zero) is reported as degenerate.
    """
    if isinstance(curve, Trajectory):
        if curve.system.planar:
            raise UsageError("self-intersections need the (u, v) curve of S11 or S21")
        grid = _resample(curve, ds)
        pts = curve(grid)[:2].T
    else:
        pts = np.asarray(curve, dtype=float)
        grid = np.arange(len(pts), dtype=float)
    if len(pts) and np.abs(pts[:, 0]).max() <= 1e-14:
        return IntersectionReport(degenerate=True)
    raw = segment_crossings(pts)
    records: list[SelfIntersection] = []
    unresolved = 0
    for i, j, a, b in raw:
        i, j = int(i), int(j)
        si = grid[i] + a * (grid[i + 1] - grid[i])
        sj = grid[j] + b * (grid[j + 1] - grid[j])
        if isinstance(curve, Trajectory):
            si, sj, defect = _refine(curve, si, sj)
            point = _beta(curve, si)
        else:
            point = pts[i] + a * (pts[i + 1] - pts[i])
            defect = 0.0
        if defect >= INTERSECTION_TOL or abs(si - sj) <= MIN_PARAM_GAP:
            unresolved += 1
            continue
        si, sj = min(si, sj), max(si, sj)
        if any(abs(r.s_i - si) < 1e-6 and abs(r.s_j - sj) < 1e-6 for r in records):
            continue
        records.append(SelfIntersection(float(si), float(sj), float(point[0]), float(point[1]), float(defect)))
    records.sort(key=lambda r: (r.s_i, r.s_j))
    return IntersectionReport(tuple(records), False, unresolved)


# --------------------------------------------------------------------------
# asymptotics, symmetry, bi-graph


@dataclass(frozen=True)
class CurveSamples:
    """Plain sampled curve (s, u, v) split into branches at s0."""

    s: np.ndarray
    u: np.ndarray
    v: np.ndarray | None = None
    s0: float = 0.0


@dataclass(frozen=True)
class AsymptoteVerdict:
    """``verdict`` is True/False, or None when the curve is too short to judge."""

    verdict: bool | None
    max_u_tail: float
    v_diverging: bool | None
    target: str = "v-axis"


def _branches(s: np.ndarray, s0: float) -> list[np.ndarray]:
    """Index arrays of the samples on each side of s0, ordered away from s0."""
    fw = np.flatnonzero(s > s0)
    bw = np.flatnonzero(s < s0)[::-1]
    return [b for b in (fw, bw) if b.size]


def asymptote_check(curve, target: str = "v-axis", threshold: float = 1e-4,
                    tail: float = 0.1, min_samples: int = 20) -> AsymptoteVerdict:
    """Decide whether the curve approaches the v-axis (the cylinder C) at both ends.

    On each branch the last ``tail`` fraction of samples must have |u| below
    ``threshold``; when v is available it must also be monotone there and lie
    beyond the range v covers on the first ``tail`` fraction.
    """
    if target not in ("v-axis", "cylinder-c"):
        raise UsageError(f"unknown asymptote target {target!r}")
    s = np.asarray(curve.s)
    u = np.asarray(curve.u)
    planar = isinstance(curve, Trajectory) and curve.system.planar
    v = None if planar else getattr(curve, "v", None)
    v = None if v is None else np.asarray(v)
    branches = [b for b in _branches(s, curve.s0) if b.size >= min_samples]
    if not branches:
        return AsymptoteVerdict(None, math.nan, None, target)
    max_u = 0.0
    diverging = True if v is not None else None
    for idx in branches:
        k = max(2, int(math.ceil(tail * idx.size)))
        tail_idx, head_idx = idx[-k:], idx[:k]
        max_u = max(max_u, float(np.abs(u[tail_idx]).max()))
        if v is not None:
            dv = np.diff(v[tail_idx])
            monotone = bool(np.all(dv > 0) or np.all(dv < 0))
            vt, vh = v[tail_idx], v[head_idx]
            beyond = bool(vt.min() > vh.max() or vt.max() < vh.min())
            diverging = diverging and monotone and beyond
    verdict = max_u < threshold and (diverging is None or diverging)
    return AsymptoteVerdict(bool(verdict), max_u, diverging, target)


def symmetry_defect(traj: Trajectory, n: int = 2001) -> float:
    """max |(u, v, th)(s0 + r) - (-u, v, -th)(s0 - r)| over matched pairs; nan if one-sided."""
    reach = min(traj.s0 - traj.s_min, traj.s_max - traj.s0)
    if reach <= 0:
        return math.nan
    r = np.linspace(0.0, reach, n)
    plus = traj(traj.s0 + r)
    minus = traj(traj.s0 - r)
    mirror = minus.copy()
    mirror[0] *= -1.0
    mirror[-1] *= -1.0
    return float(np.abs(plus - mirror).max())


@dataclass(frozen=True)
class BigraphReport:
    """Sign pattern of v' = sin(theta) on either side of s0 and the critical points of v."""

    bigraph: bool
    min_vprime_forward: float
    max_vprime_backward: float
    v_second_at_s0: float
    critical_points: tuple[tuple[float, float], ...]


def bigraph_check(traj: Trajectory, per_step: int = 8) -> BigraphReport:
    """v' > 0 for s > s0 and v' < 0 for s < s0, evaluated on a refinement of the accepted steps."""
    if traj.system.planar:
        raise UsageError("bi-graph check needs the v component")
    s = traj.s
    frac = np.arange(per_step) / per_step
    grid = np.append((s[:-1, None] + np.diff(s)[:, None] * frac).ravel(), s[-1]) if s.size > 1 else s
    vp = np.sin(traj(grid)[2])
    fw, bw = grid > traj.s0, grid < traj.s0
    min_fw = float(vp[fw].min()) if fw.any() else math.nan
    max_bw = float(vp[bw].max()) if bw.any() else math.nan
    ok = (not fw.any() or min_fw > 0) and (not bw.any() or max_bw < 0)

    def v_second(sv: float) -> float:
        y = traj(sv)
        return float(raw_rhs(traj.system, y)[2] * math.cos(y[2]))

    crit = detect_events(traj, [V_CRITICAL]).named(V_CRITICAL.name)
    points = tuple((r.s, v_second(r.s)) for r in crit if r.s != traj.s0)
    return BigraphReport(bool(ok), min_fw, max_bw, v_second(traj.s0), points)


def axis_crossings(traj: Trajectory) -> int:
    """Number of zeros of u along the trajectory, excluding s0 itself."""
    log = detect_events(traj, [U_AXIS])
    return sum(1 for r in log.named(U_AXIS.name) if r.s != traj.s0)


@dataclass(frozen=True)
class CurveAnalysis:
    system: str
    s_range: tuple[float, float]
    termination: tuple[str, str | None]
    self_intersections: IntersectionReport
    axis_crossings: int
    asymptote: AsymptoteVerdict
    bigraph: BigraphReport
    symmetry_defect: float

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "s_range": list(self.s_range),
            "termination": {"forward": self.termination[0], "backward": self.termination[1]},
            "symmetry_defect": self.symmetry_defect,
            "axis_crossings": self.axis_crossings,
            "self_intersections": {
                "count": len(self.self_intersections),
                "degenerate": self.self_intersections.degenerate,
                "unresolved": self.self_intersections.unresolved,
                "pairs": [
                    {"s_i": r.s_i, "s_j": r.s_j, "u": r.u, "v": r.v, "defect": r.defect}
                    for r in self.self_intersections.records
                ],
            },
            "asymptote": {
                "target": self.asymptote.target,
                "verdict": self.asymptote.verdict,
                "max_u_tail": self.asymptote.max_u_tail,
                "v_diverging": self.asymptote.v_diverging,
            },
            "bigraph": {
                "verdict": self.bigraph.bigraph,
                "min_vprime_forward": self.bigraph.min_vprime_forward,
                "max_vprime_backward": self.bigraph.max_vprime_backward,
                "v_second_at_s0": self.bigraph.v_second_at_s0,
                "critical_points": [{"s": s, "v_second": d} for s, d in self.bigraph.critical_points],
            },
        }


def analyze_curve(traj: Trajectory, ds: float = 0.05) -> CurveAnalysis:
    return CurveAnalysis(
        traj.system.id,
        (traj.s_min, traj.s_max),
        (traj.termination, traj.termination_backward),
        find_self_intersections(traj, ds=ds),
        axis_crossings(traj),
        asymptote_check(traj),
        bigraph_check(traj),
        symmetry_defect(traj),
    )


# --------------------------------------------------------------------------
# phase portraits


@dataclass(eq=False)
class PhasePortrait:
    system: SolitonSystem
    seeds: np.ndarray
    trajectories: list[Trajectory]
    equilibria: list[Equilibrium] = field(default_factory=list)


def grid_seeds(u_range, theta_range, n_u: int, n_theta: int) -> np.ndarray:
    """Tensor grid of (u, theta) seeds, row-major in u."""
    us = np.linspace(u_range[0], u_range[1], n_u)
    ts = np.linspace(theta_range[0], theta_range[1], n_theta)
    return np.array([(u, t) for u in us for t in ts]).reshape(-1, 2)


def phase_portrait(system, seeds, config: IntegrationConfig | None = None, window=None) -> PhasePortrait:
    """Integrate forward and backward from every seed of a planar system.

    Equilibria inside ``window`` (default: the u-domain times the theta-range
    swept by the seeds and trajectories) are attached with their
    classification.
    """
    system = get_system(system)
    if not system.planar:
        raise UsageError("phase portraits are drawn for the planar systems s12 and s22")
    cfg = config or IntegrationConfig()
    seeds = np.asarray(seeds, dtype=float).reshape(-1, 2)
    trajs = [integrate(system, seed, cfg) for seed in seeds]
    if window is None:
        wide = system.family == "R" and not cfg.surface_domain
        u_lim = math.pi if wide else HALF_PI
        ths = [t.theta for t in trajs]
        if ths:
            lo = min(float(x.min()) for x in ths)
            hi = max(float(x.max()) for x in ths)
        else:
            lo, hi = -math.pi, math.pi
        window = (-u_lim, u_lim, lo, hi)
    return PhasePortrait(system, seeds, trajs, equilibria(system, window))


def portrait_crossings(portrait: PhasePortrait, exclude_radius: float = 0.05, ds: float = 0.02) -> int:
    """Transversal crossings between different trajectories of a portrait.

    Parts of the trajectories within ``exclude_radius`` of a surface
    equilibrium are ignored, where neighbouring spirals are closer than the
    polyline resolution.
    """
    pieces: list[list[np.ndarray]] = []
    for traj in portrait.trajectories:
        if traj.s.size < 2:
            pieces.append([])
            continue
        grid = _resample(traj, ds)
        pts = traj(grid).T
        u, th = pts[:, 0], pts[:, -1]
        k = np.round((th - HALF_PI) / math.pi)
        far = np.hypot(u, th - (HALF_PI + k * math.pi)) > exclude_radius
        polys, start = [], None
        for i, f in enumerate(np.append(far, False)):
            if f and start is None:
                start = i
            elif not f and start is not None:
                if i - start >= 2:
                    polys.append(np.column_stack([u[start:i], th[start:i]]))
                start = None
        pieces.append(polys)
    count = 0
    for a in range(len(pieces)):
        for b in range(a + 1, len(pieces)):
            for pa in pieces[a]:
                for pb in pieces[b]:
                    if (pa[:, 0].max() < pb[:, 0].min() or pb[:, 0].max() < pa[:, 0].min()
                            or pa[:, 1].max() < pb[:, 1].min() or pb[:, 1].max() < pa[:, 1].min()):
                        continue
                    count += len(segment_crossings(pa, pb))
    return count
