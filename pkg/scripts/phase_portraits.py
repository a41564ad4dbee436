"""Phase portraits of the planar systems s12 and s22 as JSON for plotting.

    python scripts/phase_portraits.py --out-dir runs/portraits --n 9
"""

import argparse
import math
from pathlib import Path

from s2r_solitons.analyze import grid_seeds, phase_portrait, portrait_crossings
from s2r_solitons.integrate import IntegrationConfig
from s2r_solitons.meshio import portrait_dict, write_json


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0],
                                 formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    ap.add_argument("--out-dir", default="runs/portraits")
    ap.add_argument("--n", type=int, default=7, help="seeds per axis")
    ap.add_argument("--span", type=float, default=60.0)
    args = ap.parse_args()
    out = Path(args.out_dir)

    cfg = IntegrationConfig(s_span=(-args.span, args.span))
    setups = {
        "s12": ((-1.4, 1.4), (-math.pi, math.pi), cfg),
        "s22": ((-1.4, 1.4), (-math.pi, math.pi), cfg),
        "s22-plane": ((-3.0, 3.0), (-math.pi, math.pi), IntegrationConfig(s_span=cfg.s_span, surface_domain=False)),
    }
    for label, (u_range, th_range, c) in setups.items():
        system = label.split("-")[0]
        portrait = phase_portrait(system, grid_seeds(u_range, th_range, args.n, args.n), c)
        ends = {}
        for t in portrait.trajectories:
            ends[t.termination] = ends.get(t.termination, 0) + 1
        print(f"{label}: {len(portrait.trajectories)} trajectories, forward ends {ends}, "
              f"{len(portrait.equilibria)} equilibria, crossings {portrait_crossings(portrait)}")
        write_json(portrait_dict(portrait), out / f"{label}.json")


if __name__ == "__main__":
    main()
