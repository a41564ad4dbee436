"""Command-line driver.

    s2r-solitons equilibria --system s12
    s2r-solitons soliton --system s11 --ic 0,0,0 --span 60 --mesh out.obj
    s2r-solitons verify --exact slice --killing r-general --frame 0.3,0.2,-1.1,0.9
    s2r-solitons portrait --system s22 --grid -1,1,-3,3,5,5

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 numerical failure.
Relative output paths are resolved against --out-dir, whose default comes
from the S2R_SOLITONS_OUTDIR environment variable (else the working directory).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import analyze, meshio, oracle
from .ambient import KillingField
from .charts import EXACT_SOLUTIONS, KINDS, ROTATIONAL, exact_solution
from .errors import ExportError, IntegrationError, PoleError, RegularityError, UsageError
from .integrate import DOMAIN_BOUNDARY, IntegrationConfig, integrate
from .systems import HALF_PI, SYSTEMS, equilibria, get_system

OUTDIR_ENV = "S2R_SOLITONS_OUTDIR"

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4


def _floats(text: str, n: int | tuple[int, ...], what: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    sizes = (n,) if isinstance(n, int) else n
    if len(vals) not in sizes:
        raise UsageError(f"{what}: expected {' or '.join(map(str, sizes))} values, got {len(vals)}")
    return vals


def _out_path(args, name: str | None) -> Path | None:
    if not name:
        return None
    p = Path(name)
    return p if p.is_absolute() else Path(args.out_dir) / p


def _angle(args, x: float) -> float:
    return math.radians(x) if args.degrees else x


def _fmt_c(z: complex) -> str:
    return f"{z.real:+.12g}{z.imag:+.12g}i"


# --------------------------------------------------------------------------


def cmd_equilibria(args) -> int:
    system = get_system(args.system)
    if args.window:
        window = [_angle(args, x) for x in _floats(args.window, 4, "--window")]
    elif system.family == "V":
        window = [-HALF_PI, HALF_PI, -math.pi, math.pi]
    else:
        window = [-math.pi, math.pi, -math.pi, math.pi]
    eqs = equilibria(system, window)
    payload = {"system": system.projection.id, "window": window,
               "equilibria": [meshio.equilibrium_dict(e) for e in eqs]}
    if args.json == "-":
        sys.stdout.write(meshio.json_text(payload))
        return EXIT_OK
    print(f"equilibria of {system.projection.id} in u in [{window[0]:.6g}, {window[1]:.6g}], "
          f"theta in [{window[2]:.6g}, {window[3]:.6g}]: {len(eqs)}")
    if eqs:
        print(f"{'u':>12} {'theta':>12}  {'eigenvalue 1':>32}  {'eigenvalue 2':>32}  class")
    for e in eqs:
        flag = "" if e.surface else "  (non-surface)"
        print(f"{e.u:12.6f} {e.theta:12.6f}  {_fmt_c(e.eigenvalues[0]):>32}  "
              f"{_fmt_c(e.eigenvalues[1]):>32}  {e.classification}{flag}")
    path = _out_path(args, args.json)
    if path:
        meshio.write_json(payload, path)
    return EXIT_OK


def _config(args, system) -> IntegrationConfig:
    stop = getattr(args, "stop_at_equilibrium", None)
    if stop is None:
        stop = system.planar
    return IntegrationConfig(
        rtol=args.rtol,
        atol=args.atol,
        max_step=args.max_step,
        s_span=(args.s0 - args.span, args.s0 + args.span),
        s0=args.s0,
        domain_margin=args.domain_margin,
        eq_radius=args.eq_radius,
        stop_at_equilibrium=stop,
    )


def cmd_soliton(args) -> int:
    system = get_system(args.system)
    ic = _floats(args.ic, system.dimension, "--ic")
    ic[0] = _angle(args, ic[0])
    ic[-1] = _angle(args, ic[-1])
    if system.dimension == 3 and system.chart_kind == "vertical":
        ic[1] = _angle(args, ic[1])
    if not abs(ic[0]) < HALF_PI:
        raise UsageError(f"initial |u| = {abs(ic[0])} must be below pi/2")
    if args.span <= 0:
        raise UsageError("--span must be positive")
    traj = integrate(system, ic, _config(args, system))

    summary = [f"system {system.id}: {traj.s.size} accepted samples on s in [{traj.s_min:.6g}, {traj.s_max:.6g}]"]
    term = f"termination: forward {traj.termination}"
    if traj.termination_backward:
        term += f", backward {traj.termination_backward}"
    if DOMAIN_BOUNDARY in (traj.termination, traj.termination_backward):
        term += " (stopped at the domain boundary |u| -> pi/2)"
    summary.append(term)

    if (p := _out_path(args, args.csv)):
        meshio.write_trajectory_csv(traj, p)
    info: dict = {}
    if system.planar:
        verdict = analyze.asymptote_check(traj)
        info = {"system": system.id, "termination": {"forward": traj.termination, "backward": traj.termination_backward},
                "asymptote": {"verdict": verdict.verdict, "max_u_tail": verdict.max_u_tail},
                "axis_crossings": analyze.axis_crossings(traj)}
        summary.append(f"asymptote to u = 0: {verdict.verdict} (tail max|u| = {verdict.max_u_tail:.3e})")
        if args.mesh:
            raise UsageError("--mesh needs a surface system (s11 or s21)")
    else:
        res = analyze.analyze_curve(traj)
        info = res.to_dict()
        summary.append(f"symmetry defect: {res.symmetry_defect:.3e}")
        summary.append(f"u = 0 crossings: {res.axis_crossings}; self-intersections of beta: {len(res.self_intersections)}")
        summary.append(f"bi-graph: {res.bigraph.bigraph}; v'' at s0: {res.bigraph.v_second_at_s0!r}")
        summary.append(f"asymptotic to the cylinder C: {res.asymptote.verdict} (tail max|u| = {res.asymptote.max_u_tail:.3e})")

        chart = traj.chart()
        killing = KillingField(system.killing)
        rng = np.random.default_rng(args.seed)
        margin = 4.0 * oracle.DEFAULT_STEP
        w_range = (0.0, 2.0 * math.pi) if chart.kind == ROTATIONAL else (-1.0, 1.0)
        pts = oracle.sample_points(chart, args.samples, rng, margin=margin, w_range=w_range)
        rows = oracle.residual_report(chart, killing, pts)
        worst = max((abs(r.residual) for r in rows), default=math.nan)
        info["residual"] = {"killing": killing.kind, "samples": len(rows), "max_abs": worst,
                            "mean_abs": float(np.mean([abs(r.residual) for r in rows])) if rows else math.nan}
        summary.append(f"max residual |H - <N,{killing.kind}>| over {len(rows)} samples: {worst:.3e}")
        if (p := _out_path(args, args.residuals)):
            meshio.write_residual_csv(rows, p)
        if (p := _out_path(args, args.mesh)):
            mesh = meshio.trajectory_mesh(traj, n_sweep=args.n_sweep)
            if not args.raw_mesh:
                mesh = meshio.project_mesh(mesh)
                meshio.write_obj(mesh, p, triangulated=args.triangulate)
            else:
                raise UsageError("OBJ output needs projected vertices; drop --raw-mesh")
    if (p := _out_path(args, args.analysis)):
        meshio.write_json(info, p)
    print("\n".join(summary))
    return EXIT_OK


def _killing(args) -> KillingField:
    if args.killing == "v":
        return KillingField.vertical()
    if args.killing == "r-z":
        return KillingField.rotation_z()
    if args.frame:
        return KillingField.from_angles(*[_angle(args, x) for x in _floats(args.frame, 4, "--frame")])
    if args.axis:
        return KillingField.from_axis(_floats(args.axis, 3, "--axis"))
    raise UsageError("--killing r-general needs --frame m1,n1,m2,n2 or --axis x,y,z")


def cmd_verify(args) -> int:
    if bool(args.exact) == bool(args.chart):
        raise UsageError("give exactly one of --exact or --chart")
    if args.exact:
        chart = exact_solution(args.exact, kind=args.kind, t0=args.t0,
                               inclination=_angle(args, args.inclination))
    else:
        chart = meshio.chart_from_csv(args.chart, args.kind)
    killing = _killing(args)
    rng = np.random.default_rng(args.seed)
    w_range = (0.0, 2.0 * math.pi) if chart.kind == ROTATIONAL else (-1.0, 1.0)
    pts = oracle.sample_points(chart, args.samples, rng, margin=4.0 * args.fd_step, w_range=w_range)
    rows = oracle.residual_report(chart, killing, pts, h=args.fd_step)
    res = np.array([abs(r.residual) for r in rows])
    print(f"chart: {args.exact or args.chart} ({chart.kind}), killing field {killing.kind}, {len(rows)} samples")
    print(f"max residual: {res.max():.3e}")
    print(f"mean residual: {res.mean():.3e}")
    if killing.kind == "R_general" and chart.kind == ROTATIONAL:
        var = max(oracle.phi_variance(st, killing.angles) for st in chart.samples)
        print(f"phi-variance of <N,R> (max over curve samples, 64-point grid): {var:.3e}")
        if var > 1e-6:
            print("<N,R> depends on phi: this surface is not an R-soliton for the given axis")
    if (p := _out_path(args, args.out)):
        meshio.write_residual_csv(rows, p)
    return EXIT_OK


def cmd_portrait(args) -> int:
    system = get_system(args.system)
    if not system.planar:
        raise UsageError("portraits are drawn for s12 or s22")
    g = _floats(args.grid, 6, "--grid")
    u0, u1, t0, t1 = (_angle(args, x) for x in g[:4])
    n_u, n_t = int(g[4]), int(g[5])
    if n_u < 0 or n_t < 0:
        raise UsageError("grid counts must be non-negative")
    seeds = analyze.grid_seeds((u0, u1), (t0, t1), n_u, n_t) if n_u and n_t else np.empty((0, 2))
    cfg = IntegrationConfig(
        rtol=args.rtol, atol=args.atol, max_step=args.max_step,
        s_span=(-args.span, args.span), surface_domain=not args.phase_plane,
    )
    portrait = analyze.phase_portrait(system, seeds, cfg)
    counts: dict[str, int] = {}
    for t in portrait.trajectories:
        counts[t.termination] = counts.get(t.termination, 0) + 1
    print(f"{system.id}: {len(portrait.trajectories)} trajectories, {len(portrait.equilibria)} equilibria")
    for k in sorted(counts):
        print(f"  forward {k}: {counts[k]}")
    if (p := _out_path(args, args.out)):
        meshio.write_json(meshio.portrait_dict(portrait), p)
    return EXIT_OK


# --------------------------------------------------------------------------


def _add_integration_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--span", type=float, default=60.0, help="integrate over [s0 - span, s0 + span]")
    p.add_argument("--rtol", type=float, default=1e-10, help="relative tolerance")
    p.add_argument("--atol", type=float, default=1e-12, help="absolute tolerance")
    p.add_argument("--max-step", type=float, default=0.25, help="largest step in s")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="s2r-solitons", description=__doc__.split("\n\n")[0], formatter_class=fmt)
    parser.add_argument("--out-dir", default=os.environ.get(OUTDIR_ENV, "."),
                        help=f"directory for relative output paths (env {OUTDIR_ENV})")
    parser.add_argument("--degrees", action="store_true", help="read angle arguments in degrees")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("equilibria", help="equilibria of s12/s22 with linearization", formatter_class=fmt)
    p.add_argument("--system", required=True, choices=sorted(SYSTEMS))
    p.add_argument("--window", help="u_min,u_max,theta_min,theta_max (default: [-pi/2,pi/2]x[-pi,pi] for s12, [-pi,pi]^2 for s22)")
    p.add_argument("--json", default="equilibria.json",
                   help="JSON output path ('-' prints JSON instead of the table, '' skips the file)")
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("soliton", help="integrate a soliton curve, analyze it and verify the residual", formatter_class=fmt)
    p.add_argument("--system", required=True, choices=sorted(SYSTEMS))
    p.add_argument("--ic", default="0,0,0", help="initial state u,v,theta (u,theta for planar systems)")
    p.add_argument("--s0", type=float, default=0.0, help="parameter of the initial state")
    _add_integration_flags(p)
    p.add_argument("--domain-margin", type=float, default=1e-6, help="stop when |u| > pi/2 - margin")
    p.add_argument("--eq-radius", type=float, default=1e-9, help="equilibrium convergence radius")
    p.add_argument("--stop-at-equilibrium", action=argparse.BooleanOptionalAction, default=argparse.SUPPRESS,
                   help="stop once (u,theta) settles on an equilibrium (default: on for s12/s22, off for s11/s21)")
    p.add_argument("--csv", default="trajectory.csv", help="trajectory CSV output ('' skips it)")
    p.add_argument("--analysis", default="analysis.json", help="analysis JSON output ('' skips it)")
    p.add_argument("--mesh", help="surface OBJ output (stereographically projected)")
    p.add_argument("--raw-mesh", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--triangulate", action="store_true", help="split quads into triangles in the OBJ")
    p.add_argument("--n-sweep", type=int, default=64, help="sweep samples of the mesh")
    p.add_argument("--residuals", default="residuals.csv",
                   help="residual report CSV output, surface systems only ('' skips it)")
    p.add_argument("--samples", type=int, default=200, help="random residual sample points")
    p.add_argument("--seed", type=int, default=0, help="seed for residual sampling")
    p.set_defaults(func=cmd_soliton)

    p = sub.add_parser("verify", help="soliton residual of an exact solution or a chart from CSV", formatter_class=fmt)
    p.add_argument("--exact", choices=EXACT_SOLUTIONS)
    p.add_argument("--chart", help="trajectory CSV with columns s,u,v,theta")
    p.add_argument("--kind", choices=KINDS, default=ROTATIONAL, help="chart kind")
    p.add_argument("--killing", required=True, choices=["v", "r-z", "r-general"])
    p.add_argument("--frame", help="m1,n1,m2,n2 with E_i = (cos m_i cos n_i, cos m_i sin n_i, sin m_i)")
    p.add_argument("--axis", help="rotation axis x,y,z (alternative to --frame)")
    p.add_argument("--t0", type=float, default=0.0, help="height of the slice")
    p.add_argument("--inclination", type=float, default=math.pi / 4, help="inclination of the geodesic cylinder")
    p.add_argument("--samples", type=int, default=100, help="random sample points")
    p.add_argument("--seed", type=int, default=0, help="seed for sampling")
    p.add_argument("--fd-step", type=float, default=oracle.DEFAULT_STEP, help="finite-difference step")
    p.add_argument("--out", default="residuals.csv", help="residual report CSV output ('' skips it)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("portrait", help="phase portrait of s12/s22 as JSON", formatter_class=fmt)
    p.add_argument("--system", required=True, choices=["s12", "s22"])
    p.add_argument("--grid", default="-1,1,-3,3,5,5", help="u_min,u_max,theta_min,theta_max,n_u,n_theta")
    _add_integration_flags(p)
    p.add_argument("--phase-plane", action="store_true", help="s22 only: drop the |u| < pi/2 guard")
    p.add_argument("--out", default="portrait.json", help="portrait JSON output ('' skips it)")
    p.set_defaults(func=cmd_portrait)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExportError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (RegularityError, IntegrationError, PoleError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
