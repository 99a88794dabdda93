"""Fixtures: real run outputs produced through the simulator's CLI.

The plotting package consumes the simulator only through its external
interfaces (CLI, series CSV, manifest JSON), so the fixtures shell out to
`mhd2b` rather than importing it.
"""

import subprocess
import sys
from pathlib import Path

import pytest


def _mhd2b(*args: str):
    proc = subprocess.run(
        [sys.executable, "-m", "mhd2b.cli", *args],
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise RuntimeError(f"mhd2b {' '.join(args)} failed:\n{proc.stdout}\n{proc.stderr}")
    return proc


@pytest.fixture(scope="session")
def exact_series(tmp_path_factory) -> Path:
    """Series of the closed-form decaying run (monotone l2_j trajectory)."""
    out = tmp_path_factory.mktemp("exact_run")
    _mhd2b(
        "run",
        "--set", "n=32",
        "--set", "beta=1.5",
        "--set", "t_end=0.3",
        "--set", "output_interval=0.05",
        "--set", "checkpoint_interval=0.3",
        "--set", "dt_max=0.02",
        "--set", "ic=single_mode_b",
        "--set", "q_list=2",
        "--set", "r_list=2",
        "--output-dir", str(out),
    )
    return out / "series.csv"


@pytest.fixture(scope="session")
def sweep_manifest(tmp_path_factory) -> Path:
    """Manifest of a three-exponent sweep."""
    out = tmp_path_factory.mktemp("sweep")
    _mhd2b(
        "sweep",
        "--betas", "1.1,1.5,2.0",
        "--set", "n=32",
        "--set", "t_end=0.06",
        "--set", "output_interval=0.02",
        "--set", "checkpoint_interval=0.06",
        "--set", "dt_max=0.01",
        "--set", "ic=orszag_tang_like",
        "--set", "q_list=2",
        "--set", "r_list=2",
        "--output-dir", str(out),
    )
    return out / "manifest.json"
