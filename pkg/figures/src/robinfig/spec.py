"""Figure registry: which CSVs each figure id consumes and how axes are framed."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .csvio import FigureError, read_artifact

__all__ = ["FigureSpec", "FIGURE_IDS", "build_spec"]


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    reference: Path
    curves: tuple[Path, ...]
    x_range: tuple[float, float]
    x_label: str
    y_label: str
    title: str
    out: Path


# figure id -> (reference file, curve glob, x-range, abscissa label, title)
_REGISTRY: dict[str, tuple[str, str, tuple[float, float], str, str]] = {
    "f1_nodrift": (
        "analytic.csv", "density_dt*.csv", (0.0, 4.0), "x",
        "absorbing wall, zero drift",
    ),
    "f2_drift": (
        "analytic.csv", "density_dt*.csv", (0.0, 3.0), "x",
        "absorbing wall with drift",
    ),
    "f3_reflecting": (
        "analytic.csv", "density_dt*.csv", (0.0, 1.2), "x",
        "reflecting wall close-up",
    ),
    "f5_marginal_x": (
        "fpe_marginal_x.csv", "marginal_x_dt*.csv", (0.0, 3.0), "x",
        "half-space marginal along the wall-normal axis",
    ),
    "f6_marginal_y": (
        "fpe_marginal_y.csv", "marginal_y_dt*.csv", (-3.0, 3.0), "y",
        "half-space lateral marginal, co-normal reflection",
    ),
    "f7_marginal_y_normal": (
        "fpe_marginal_y.csv", "marginal_y_dt*.csv", (-3.0, 3.0), "y",
        "half-space lateral marginal, normal reflection",
    ),
    "f8_marginal_x_drift": (
        "fpe_marginal_x.csv", "marginal_x_dt*.csv", (0.0, 3.0), "x",
        "half-space marginal along the wall-normal axis, with drift",
    ),
    "f9_marginal_y_drift": (
        "fpe_marginal_y.csv", "marginal_y_dt*.csv", (-3.0, 3.0), "y",
        "half-space lateral marginal, with drift",
    ),
}

FIGURE_IDS = tuple(_REGISTRY)


def _curve_dt(path: Path) -> float:
    value = read_artifact(path).provenance.get("dt")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise FigureError(f"{path.name}: provenance line '# dt=...' missing or bad") from None


def build_spec(figure_id: str, in_dir, out_dir) -> FigureSpec:
    if figure_id not in _REGISTRY:
        raise FigureError(
            f"unknown figure id '{figure_id}'; choose one of {', '.join(FIGURE_IDS)}"
        )
    in_dir = Path(in_dir)
    if not in_dir.is_dir():
        raise FigureError(f"input directory not found: {in_dir}")
    ref_name, curve_glob, x_range, x_label, title = _REGISTRY[figure_id]
    reference = in_dir / ref_name
    if not reference.is_file():
        raise FigureError(f"input CSV not found: {reference}")
    curves = sorted(in_dir.glob(curve_glob))
    if not curves:
        raise FigureError(f"no curve CSVs matching {curve_glob} in {in_dir}")
    # coarse-to-fine legend order
    curves.sort(key=_curve_dt, reverse=True)
    return FigureSpec(
        figure_id=figure_id,
        reference=reference,
        curves=tuple(curves),
        x_range=x_range,
        x_label=x_label,
        y_label="density",
        title=title,
        out=Path(out_dir) / f"{figure_id}.svg",
    )
