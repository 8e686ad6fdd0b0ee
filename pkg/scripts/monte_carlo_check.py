"""Analytic model vs slot simulation over the traffic/CW scenarios used for validation.

    python scripts/monte_carlo_check.py --slots 1000000 --replications 20
"""

import argparse
import time

from lbt_coex.airtime import analyze
from lbt_coex.config import CoexConfig
from lbt_coex.simulator import SimConfig, compare, simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--slots", type=int, default=1_000_000)
    ap.add_argument("--replications", type=int, default=20)
    ap.add_argument("--seed", type=int, default=1000)
    ap.add_argument("--wifi-freeze", action="store_true")
    args = ap.parse_args()

    scenarios = [dict(q_W=a, q_C=b, Z=z) for a in (0.3, 0.7) for b in (0.3, 0.7) for z in (8, 16)]
    scenarios.append(dict(q_W=0.5, q_C=0.5, Z=10))
    for i, kw in enumerate(scenarios):
        c = CoexConfig(**kw)
        t0 = time.perf_counter()
        est = simulate(SimConfig(c, slots=args.slots, replications=args.replications,
                                 seed=args.seed + i, wifi_freeze=args.wifi_freeze))
        print(f"q_W={c.q_W} q_C={c.q_C} Z={c.Z}  ({time.perf_counter() - t0:.1f}s)")
        for d in compare(est, analyze(c), c):
            print(f"  {d.quantity:8s} analytic={d.analytic:<12.6g} sim={d.simulated:<12.6g}"
                  f" +-{d.half_width:<10.3g} z={d.z_score:+7.2f} rel={100 * d.rel_error:5.2f}%"
                  f" {'' if d.within_ci else 'OUTSIDE_CI'}")


if __name__ == "__main__":
    main()
