"""Figure builders: norm trajectories and sweep overlays.

Batch-oriented: each function reads files, writes one figure, and optionally
dumps the plotted arrays as CSV built from the source file's own cell strings
(so re-running on identical inputs produces identical dump bytes). Input
files are never modified.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .frame import SeriesFrame, load_manifest, load_series


def plot_norms(
    series_path: Path,
    quantities: list[str],
    out_path: Path,
    log_scale: bool = False,
    dump_path: Path | None = None,
):
    """Plot one or more series columns against time; returns the Figure."""
    if not quantities:
        raise ValueError("at least one quantity is required")
    frame = load_series(series_path)
    for q in quantities:
        frame.column(q)  # raises with the available-column listing

    fig, ax = plt.subplots(figsize=(8, 5))
    t = frame.values["t"]
    for q in quantities:
        ax.plot(t, frame.values[q], label=q, linewidth=1.5)
    ax.set_xlabel("t")
    ax.set_ylabel(", ".join(quantities))
    if log_scale:
        ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)

    if dump_path is not None:
        _dump_norms(frame, quantities, Path(dump_path))
    return fig


def _dump_norms(frame: SeriesFrame, quantities: list[str], dump_path: Path):
    cols = ["t"] + list(quantities)
    lines = [",".join(cols)]
    for i in range(frame.n_rows):
        lines.append(",".join(frame.raw_column(c)[i] for c in cols))
    dump_path.parent.mkdir(parents=True, exist_ok=True)
    dump_path.write_text("\n".join(lines) + "\n")


def plot_sweep(
    manifest_path: Path,
    quantity: str,
    out_path: Path,
    log_scale: bool = False,
    dump_path: Path | None = None,
):
    """Overlay one quantity across the runs of a sweep manifest."""
    runs = load_manifest(manifest_path)
    frames: list[tuple[float, SeriesFrame]] = []
    for entry in runs:
        if not entry.series_path.exists():
            raise FileNotFoundError(
                f"manifest {manifest_path} references a missing series file: {entry.series_path}"
            )
        frame = load_series(entry.series_path)
        frame.column(quantity)
        frames.append((entry.beta, frame))

    fig, ax = plt.subplots(figsize=(8, 5))
    for beta, frame in frames:
        ax.plot(frame.values["t"], frame.values[quantity], label=f"beta = {beta:g}", linewidth=1.5)
    ax.set_xlabel("t")
    ax.set_ylabel(quantity)
    if log_scale:
        ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)

    if dump_path is not None:
        lines = [f"beta,t,{quantity}"]
        for beta, frame in frames:
            t_raw = frame.raw_column("t")
            q_raw = frame.raw_column(quantity)
            for i in range(frame.n_rows):
                lines.append(f"{beta:g},{t_raw[i]},{q_raw[i]}")
        dump_path = Path(dump_path)
        dump_path.parent.mkdir(parents=True, exist_ok=True)
        dump_path.write_text("\n".join(lines) + "\n")
    return fig
