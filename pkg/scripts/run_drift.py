#!/usr/bin/env python3
"""Run the 1D drift convergence study and print the bias table."""

import argparse
import sys
from pathlib import Path

from robinsim.cli import main as robinsim_main

HERE = Path(__file__).resolve().parent
CONFIGS = HERE.parent / "configs"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/drift", help="output directory")
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()

    argv = [
        "convergence",
        "--config",
        str(CONFIGS / "drift_1d_convergence.cfg"),
        "--out",
        args.out,
    ]
    if args.seed is not None:
        argv += ["--seed", str(args.seed)]
    rc = robinsim_main(argv)
    if rc == 0:
        print(Path(args.out, "convergence.csv").read_text())
    return rc


if __name__ == "__main__":
    sys.exit(main())
