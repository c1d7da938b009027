"""Command line entry point: render one figure from a directory of CSVs."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .csvio import FigureError
from .render import render
from .spec import FIGURE_IDS, build_spec


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render_figures",
        description="Render an overlay figure from simulator CSV artifacts.",
    )
    parser.add_argument("--in", dest="in_dir", required=True, help="directory of input CSVs")
    parser.add_argument("--spec", required=True, help=f"figure id: {', '.join(FIGURE_IDS)}")
    parser.add_argument("--out", required=True, help="output directory for the SVG")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        spec = build_spec(args.spec, Path(args.in_dir), Path(args.out))
        result = render(spec)
    except FigureError as exc:
        print(f"figure error: {exc}", file=sys.stderr)
        return 2
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(result.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
