"""Overlay figures built from the simulator's CSV artifacts.

This package never imports the simulator; it consumes only the CSV files
written by the `robinsim` command line tool.
"""

from .csvio import Artifact, FigureError, SchemaError, read_artifact
from .spec import FIGURE_IDS, FigureSpec, build_spec
from .render import RenderResult, Series, render

__all__ = [
    "Artifact",
    "FigureError",
    "SchemaError",
    "read_artifact",
    "FIGURE_IDS",
    "FigureSpec",
    "build_spec",
    "RenderResult",
    "Series",
    "render",
]
