"""Deterministic SVG rendering of reference-vs-ensemble overlays."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from .csvio import read_artifact
from .spec import FigureSpec

__all__ = ["Series", "RenderResult", "render"]

# fixed salt and glyphs-as-paths keep the SVG byte-stable across runs
matplotlib.rcParams["svg.hashsalt"] = "robinfig"
matplotlib.rcParams["svg.fonttype"] = "path"

_CURVE_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


@dataclass(frozen=True)
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray


@dataclass(frozen=True)
class RenderResult:
    reference: Series
    curves: tuple[Series, ...]
    warnings: tuple[str, ...]
    out: Path


def _load_reference(spec: FigureSpec) -> Series:
    art = read_artifact(spec.reference)
    art.require((spec.x_label, "p"))
    return Series("reference", art.column(spec.x_label), art.column("p"))


def _load_curve(path: Path) -> Series:
    art = read_artifact(path)
    art.require(("bin_lo", "bin_hi", "density"))
    lo = art.column("bin_lo")
    hi = art.column("bin_hi")
    label = f"dt={art.provenance.get('dt', '?')}"
    return Series(label, 0.5 * (lo + hi), art.column("density"))


def render(spec: FigureSpec) -> RenderResult:
    reference = _load_reference(spec)
    curves = []
    warnings = []
    for path in spec.curves:
        series = _load_curve(path)
        if not np.any(series.y):
            warnings.append(f"no surviving samples in {path.name}")
            continue
        curves.append(series)

    fig = Figure(figsize=(6.4, 4.8))
    FigureCanvasSVG(fig)
    ax = fig.add_subplot(111)
    ax.plot(reference.x, reference.y, color="black", lw=1.6, label=reference.label)
    for i, series in enumerate(curves):
        ax.plot(
            series.x, series.y,
            color=_CURVE_COLORS[i % len(_CURVE_COLORS)],
            lw=1.1, ls="--", label=series.label,
        )
    ax.set_xlim(*spec.x_range)
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    ax.set_title(spec.title)
    ax.legend(loc="upper right", frameon=False)
    if warnings:
        fig.text(
            0.02, 0.02, "\n".join(f"warning: {w}" for w in warnings),
            color="#b40000", fontsize=8,
        )
    spec.out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.out, format="svg", metadata={"Date": None})
    return RenderResult(
        reference=reference,
        curves=tuple(curves),
        warnings=tuple(warnings),
        out=spec.out,
    )
