"""Error of the finite-difference mean curvature against the closed form as the step shrinks.

    python scripts/oracle_convergence.py --charts 40
"""

import argparse
import math

import numpy as np

from s2r_solitons.charts import KINDS, chart_from_direction
from s2r_solitons.oracle import fd_forms


def random_chart(rng, kind):
    a0, (a1, a2), (b1, b2), c1 = rng.uniform(-3, 3), rng.uniform(-1.5, 1.5, 2), rng.uniform(0.3, 2.5, 2), rng.uniform(0, 6)

    def theta(s):
        return a0 + a1 * math.sin(b1 * s + c1) + a2 * math.cos(b2 * s)

    def theta_prime(s):
        return a1 * b1 * math.cos(b1 * s + c1) - a2 * b2 * math.sin(b2 * s)

    u0 = rng.uniform(-0.4, 0.4)
    return chart_from_direction(kind, theta, theta_prime, -1.0, 1.0, u0=u0, n_samples=11)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0],
                                 formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    ap.add_argument("--charts", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    steps = [2.0 ** -k for k in range(4, 20, 1)]
    rng = np.random.default_rng(args.seed)
    for kind in KINDS:
        err = np.zeros((args.charts, len(steps)))
        for i in range(args.charts):
            chart = random_chart(rng, kind)
            s, w = rng.uniform(-0.9, 0.9), rng.uniform(-1, 1)
            exact = chart.mean_curvature(s)
            err[i] = [fd_forms(chart.embed, s, w, h=h).H - exact for h in steps]
        rms = np.sqrt(np.mean(err ** 2, axis=0))
        print(f"{kind}:  h          rms error    ratio")
        for k, h in enumerate(steps):
            ratio = rms[k - 1] / rms[k] if k else float("nan")
            print(f"  {h:10.3e}  {rms[k]:10.3e}  {ratio:6.2f}")


if __name__ == "__main__":
    main()
