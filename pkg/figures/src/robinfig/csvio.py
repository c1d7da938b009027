"""Reader for the simulator's CSV layout: `# key=value` comments, header, rows."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["FigureError", "SchemaError", "Artifact", "read_artifact"]


class FigureError(Exception):
    """Input selection problem: unknown figure id, missing file or curves."""


class SchemaError(FigureError):
    """A CSV exists but does not carry the declared columns."""


@dataclass(frozen=True)
class Artifact:
    path: Path
    provenance: dict
    columns: dict

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise SchemaError(f"{self.path.name}: missing column '{name}'") from None

    def require(self, names) -> None:
        for name in names:
            if name not in self.columns:
                raise SchemaError(f"{self.path.name}: missing column '{name}'")


def read_artifact(path) -> Artifact:
    path = Path(path)
    if not path.is_file():
        raise FigureError(f"input CSV not found: {path}")
    provenance: dict = {}
    header: list[str] | None = None
    rows: list[list[float]] = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if line.startswith("#"):
            key, sep, value = line.lstrip("# ").partition("=")
            if sep:
                provenance[key.strip()] = value.strip()
            continue
        if not line.strip():
            continue
        cells = line.split(",")
        if header is None:
            header = [c.strip() for c in cells]
            continue
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise SchemaError(f"{path.name}:{lineno}: non-numeric cell ({exc})") from None
    if header is None:
        raise SchemaError(f"{path.name}: no header row")
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    columns = {name: data[:, i] for i, name in enumerate(header)}
    return Artifact(path=path, provenance=provenance, columns=columns)
