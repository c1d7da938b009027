#!/usr/bin/env python3
"""Run the one-step boundary-layer diagnostics and print the report."""

import argparse
import sys
from pathlib import Path

from robinsim.cli import main as robinsim_main

HERE = Path(__file__).resolve().parent
CONFIGS = HERE.parent / "configs"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/blcheck", help="output directory")
    args = ap.parse_args()

    rc = robinsim_main(
        ["blcheck", "--config", str(CONFIGS / "blcheck.cfg"), "--out", args.out]
    )
    if rc == 0:
        print(Path(args.out, "blreport.csv").read_text())
    return rc


if __name__ == "__main__":
    sys.exit(main())
