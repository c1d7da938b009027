#!/usr/bin/env python3
"""Run the pure-reflection boundary-layer experiment at two step sizes.

Produces the density histograms whose wall behavior (flat over a width of
order sqrt(sigma*dt), against a continuum slope of about -1.06) is the
close-up comparison; also emits the matching closed-form curve.
"""

import argparse
import sys
from pathlib import Path

from robinsim.cli import main as robinsim_main

HERE = Path(__file__).resolve().parent
CONFIGS = HERE.parent / "configs"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/reflecting", help="output directory")
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()

    base = CONFIGS / "reflecting_1d.cfg"
    for dt in ("0.1", "0.01"):
        out = Path(args.out) / f"dt{dt}"
        out.mkdir(parents=True, exist_ok=True)
        text = base.read_text().replace("dt=0.01\n", f"dt={dt}\n")
        cfg = out / "config.cfg"
        cfg.write_text(text)
        argv = ["sim1d", "--config", str(cfg), "--out", str(out)]
        if args.seed is not None:
            argv += ["--seed", str(args.seed)]
        print(f"== dt={dt}")
        rc = robinsim_main(argv)
        if rc != 0:
            return rc

    # matching continuum curve (reflecting: kappa = 0)
    out = Path(args.out)
    acfg = out / "analytic.cfg"
    acfg.write_text(
        "engine=analytic\nsigma=1.0\ndrift=-1.0\nkappa=0.0\nx0=1.0\nt=1.0\n"
    )
    return robinsim_main(["analytic", "--config", str(acfg), "--out", str(out)])


if __name__ == "__main__":
    sys.exit(main())
