#!/usr/bin/env python3
"""Run the 1D convergence study and print the bias table.

Writes convergence.csv, per-dt density CSVs, and the closed-form reference
curve into the output directory.
"""

import argparse
import sys
from pathlib import Path

from robinsim.cli import main as robinsim_main

HERE = Path(__file__).resolve().parent
CONFIGS = HERE.parent / "configs"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/table1", help="output directory")
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()

    argv = ["convergence", "--config", str(CONFIGS / "table1_1d.cfg"), "--out", args.out]
    if args.seed is not None:
        argv += ["--seed", str(args.seed)]
    rc = robinsim_main(argv)
    if rc == 0:
        print(Path(args.out, "convergence.csv").read_text())
    return rc


if __name__ == "__main__":
    sys.exit(main())
