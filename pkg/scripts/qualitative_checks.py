"""Integrate the (0, 0, 0) solitons of s11 and s21 and run the qualitative checks.

For each span the script records crossing counts, self-intersections,
symmetry, bi-graph and asymptote verdicts, the soliton residual, and writes
trajectory CSVs, an analysis JSON and a projected OBJ mesh of the span-60 surface.

    python scripts/qualitative_checks.py --out-dir runs/solitons
"""

import argparse
import math
from pathlib import Path

import numpy as np

from s2r_solitons.ambient import KillingField
from s2r_solitons.analyze import analyze_curve
from s2r_solitons.integrate import IntegrationConfig, integrate
from s2r_solitons.meshio import project_mesh, trajectory_mesh, write_json, write_obj, write_trajectory_csv
from s2r_solitons.oracle import sample_points, soliton_residual

KILLING = {"s11": KillingField.vertical(), "s21": KillingField.rotation_z()}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0],
                                 formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    ap.add_argument("--out-dir", default="runs/solitons")
    ap.add_argument("--spans", default="20,40,60")
    ap.add_argument("--samples", type=int, default=200, help="residual sample points")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out_dir)
    spans = [float(x) for x in args.spans.split(",")]

    summary = {}
    for name, killing in KILLING.items():
        rows = []
        for span in spans:
            traj = integrate(name, (0.0, 0.0, 0.0), IntegrationConfig(stop_at_equilibrium=False, s_span=(-span, span)))
            res = analyze_curve(traj)
            chart = traj.chart()
            w_range = (0.0, 2 * math.pi) if chart.kind == "rotational" else (-1.0, 1.0)
            pts = sample_points(chart, args.samples, np.random.default_rng(args.seed), w_range=w_range)
            worst = max(abs(soliton_residual(chart, killing, s, w)) for s, w in pts)
            row = res.to_dict() | {"span": span, "max_residual": worst}
            rows.append(row)
            print(f"{name} span {span:g}: crossings {res.axis_crossings}, "
                  f"self-intersections {len(res.self_intersections)}, symmetry {res.symmetry_defect:.1e}, "
                  f"bi-graph {res.bigraph.bigraph}, asymptote {res.asymptote.verdict} "
                  f"(tail {res.asymptote.max_u_tail:.1e}), residual {worst:.1e}")
            write_trajectory_csv(traj, out / f"{name}_span{span:g}.csv")
        write_obj(project_mesh(trajectory_mesh(traj)), out / f"{name}_surface.obj")
        summary[name] = rows
    write_json(summary, out / "summary.json")


if __name__ == "__main__":
    main()
