"""Batch figure generation for mhd2b series and sweep-manifest files."""

from .frame import ManifestRun, SeriesFormatError, SeriesFrame, load_manifest, load_series
from .plots import plot_norms, plot_sweep

__version__ = "0.1.0"

__all__ = [
    "ManifestRun",
    "SeriesFormatError",
    "SeriesFrame",
    "load_manifest",
    "load_series",
    "plot_norms",
    "plot_sweep",
]
