"""Typed access to series CSV / NDJSON files and sweep manifests.

The frame keeps both the parsed floats (for plotting) and the original cell
strings (for --dump), so dumped arrays are bitwise identical to the source
file no matter how the floats would re-format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class SeriesFormatError(ValueError):
    """Series file violates the documented schema."""


@dataclass
class SeriesFrame:
    """One parsed series: column names, float values, raw cell strings."""

    path: Path
    columns: list[str]
    values: dict[str, list[float]]
    raw: dict[str, list[str]]

    @property
    def n_rows(self) -> int:
        return len(self.values["t"]) if "t" in self.values else 0

    def column(self, name: str) -> list[float]:
        if name not in self.values:
            raise SeriesFormatError(
                f"unknown column {name!r} in {self.path}; available: {', '.join(self.columns)}"
            )
        return self.values[name]

    def raw_column(self, name: str) -> list[str]:
        self.column(name)
        return self.raw[name]


def load_series(path: Path) -> SeriesFrame:
    """Parse a series CSV (or NDJSON) file and validate its shape."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"series file not found: {path}")
    if path.suffix == ".ndjson":
        return _load_ndjson(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise SeriesFormatError(f"series file {path} is empty")
    columns = lines[0].split(",")
    if "t" not in columns:
        raise SeriesFormatError(f"series file {path} has no 't' column")
    rows = lines[1:]
    if not rows:
        raise SeriesFormatError(f"series file {path} has a header but no data rows")
    raw = {c: [] for c in columns}
    values = {c: [] for c in columns}
    for lineno, line in enumerate(rows, 2):
        cells = line.split(",")
        if len(cells) != len(columns):
            raise SeriesFormatError(
                f"{path}:{lineno}: {len(cells)} cells for {len(columns)} columns"
            )
        for col, cell in zip(columns, cells):
            raw[col].append(cell)
            try:
                values[col].append(float(cell))
            except ValueError as err:
                raise SeriesFormatError(f"{path}:{lineno}: bad number {cell!r}") from err
    frame = SeriesFrame(path, columns, values, raw)
    _require_increasing_time(frame)
    return frame


def _load_ndjson(path: Path) -> SeriesFrame:
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise SeriesFormatError(f"series file {path} is empty")
    objs = [json.loads(ln) for ln in lines]
    columns = list(objs[0])
    if "t" not in columns:
        raise SeriesFormatError(f"series file {path} has no 't' column")
    raw = {c: [] for c in columns}
    values = {c: [] for c in columns}
    for obj in objs:
        if set(obj) != set(columns):
            raise SeriesFormatError(f"{path}: inconsistent keys across rows")
        for c in columns:
            values[c].append(float(obj[c]))
            raw[c].append(repr(float(obj[c])))
    frame = SeriesFrame(path, columns, values, raw)
    _require_increasing_time(frame)
    return frame


def _require_increasing_time(frame: SeriesFrame):
    t = frame.values["t"]
    if any(b <= a for a, b in zip(t, t[1:])):
        raise SeriesFormatError(f"{frame.path}: 't' is not strictly increasing")


@dataclass
class ManifestRun:
    beta: float
    series_path: Path
    status: str


def load_manifest(path: Path) -> list[ManifestRun]:
    """Parse a sweep manifest; series paths resolve relative to the manifest."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"manifest not found: {path}")
    data = json.loads(path.read_text())
    runs = data.get("runs", [])
    if not runs:
        raise SeriesFormatError(f"manifest {path} lists no runs")
    out = []
    for entry in runs:
        out.append(
            ManifestRun(
                beta=float(entry["beta"]),
                series_path=path.parent / entry["series"],
                status=str(entry.get("status", "unknown")),
            )
        )
    return out
