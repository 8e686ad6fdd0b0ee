"""Optimal CW and throughput improvement over the 9x9 traffic grid at two cellular rates.

    python scripts/grid_sweep.py --out results/grid
"""

import argparse
import sys

from lbt_coex.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/grid")
    ap.add_argument("--rates", default="1e8,2e8")
    args = ap.parse_args()
    sys.exit(cli_main(["sweep", "--grid", "q_w=0.1:0.9:0.1,q_c=0.1:0.9:0.1",
                       "--rates", args.rates, "--out", args.out]))


if __name__ == "__main__":
    main()
