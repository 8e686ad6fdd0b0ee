"""Per-CW throughput trace for one scenario, with the Wi-Fi-only baseline.

    python scripts/cw_trace.py --q-c 0.5 --out results/trace
"""

import argparse
from pathlib import Path

from lbt_coex.config import CoexConfig
from lbt_coex.optimizer import optimal_cw, write_trace_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q-w", type=float, default=0.5)
    ap.add_argument("--q-c", type=float, default=0.5)
    ap.add_argument("--r-c", type=float, default=1e8)
    ap.add_argument("--z-max", type=int, default=64)
    ap.add_argument("--out", default="results/trace")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    res = optimal_cw(CoexConfig(q_W=args.q_w, q_C=args.q_c, R_C=args.r_c), 2, args.z_max)
    write_trace_csv(res, out / "trace.csv")
    print(f"baseline S_only_W = {res.baseline / 1e6:.3f} Mb/s")
    print(f"{'Z':>3} {'S_co_W':>9} {'S_co_C':>9} {'S_total':>9}  ok")
    for t in res.per_z_trace:
        print(f"{t.Z:>3} {t.S_co_W / 1e6:9.3f} {t.S_co_C / 1e6:9.3f} {t.S_total / 1e6:9.3f}"
              f"  {'*' if t.constraint_met else ''}")
    print(f"z_star={res.z_star}" if res.feasible else "INFEASIBLE")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    Z = [t.Z for t in res.per_z_trace]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(Z, [t.S_co_W / 1e6 for t in res.per_z_trace], label="Wi-Fi AP (coexisting)")
    ax.plot(Z, [t.S_co_C / 1e6 for t in res.per_z_trace], label="cellular (coexisting)")
    ax.axhline(res.baseline / 1e6, color="k", ls="--", label="Wi-Fi-only baseline")
    ax.set_xlabel("cellular CW size Z")
    ax.set_ylabel("per-node throughput (Mb/s)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "trace.png", dpi=120)


if __name__ == "__main__":
    main()
