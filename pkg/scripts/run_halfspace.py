#!/usr/bin/env python3
"""Run the 2D half-space experiments: MC ensembles, the Fokker-Planck
reference, and the normal-reflection variant used to discriminate the
reflection law.

Each sub-run writes its CSVs into a subdirectory of --out.
"""

import argparse
import sys
from pathlib import Path

from robinsim.cli import main as robinsim_main

HERE = Path(__file__).resolve().parent
CONFIGS = HERE.parent / "configs"

RUNS = [
    ("aniso_mc", "halfspace_aniso_mc.cfg", "simnd"),
    ("normal_mc", "halfspace_normal_mc.cfg", "simnd"),
    ("drift_mc", "halfspace_drift_mc.cfg", "simnd"),
    ("aniso_fpe", "halfspace_aniso_fpe.cfg", "fpe"),
    ("drift_fpe", "halfspace_drift_fpe.cfg", "fpe"),
]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/halfspace", help="output directory")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument(
        "--only", choices=[name for name, _, _ in RUNS], default=None,
        help="run a single experiment instead of all five",
    )
    args = ap.parse_args()

    for name, cfg, engine in RUNS:
        if args.only is not None and name != args.only:
            continue
        out = Path(args.out) / name
        argv = [engine, "--config", str(CONFIGS / cfg), "--out", str(out)]
        if args.seed is not None:
            argv += ["--seed", str(args.seed)]
        print(f"== {name}: robinsim {' '.join(argv)}")
        rc = robinsim_main(argv)
        if rc != 0:
            return rc
        survival = out / "survival.csv"
        if survival.exists():
            print(survival.read_text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
