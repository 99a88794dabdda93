"""Binary checkpoints with a fixed byte layout for bit-exact resume.

Layout (little-endian throughout):

    bytes 0..6    magic "MHD2B01" (ASCII)
    u32           format version (1)
    u32           n, grid points per side
    f64           beta
    f64           t
    u64           seed
    32 bytes      sha256 digest of the producing configuration
    n*n*(re,im)   omega_hat, row-major interleaved IEEE-754 binary64
    n*n*(re,im)   j_hat, same layout

complex128 arrays are exactly this interleaved layout, so reads and writes are
memcpy-clean and a save/load round trip is bitwise identical.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"MHD2B01"
VERSION = 1
_HEADER = struct.Struct("<7sIIddQ32s")


class CheckpointError(RuntimeError):
    """Unreadable or inconsistent checkpoint file."""


class DigestMismatchError(CheckpointError):
    """Checkpoint was produced by a different configuration."""


@dataclass
class Checkpoint:
    n: int
    beta: float
    t: float
    seed: int
    config_digest: bytes
    omega_hat: np.ndarray
    j_hat: np.ndarray


def save_checkpoint(path: Path, cp: Checkpoint):
    n = cp.n
    for name, arr in (("omega_hat", cp.omega_hat), ("j_hat", cp.j_hat)):
        if arr.shape != (n, n):
            raise CheckpointError(f"{name} has shape {arr.shape}, expected {(n, n)}")
    header = _HEADER.pack(
        MAGIC, VERSION, n, float(cp.beta), float(cp.t), int(cp.seed), cp.config_digest
    )
    with Path(path).open("wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(cp.omega_hat, dtype="<c16").tobytes())
        fh.write(np.ascontiguousarray(cp.j_hat, dtype="<c16").tobytes())


def load_checkpoint(path: Path) -> Checkpoint:
    try:
        raw = Path(path).read_bytes()
    except OSError as err:
        raise CheckpointError(f"cannot read checkpoint {path}: {err}") from err
    if len(raw) < _HEADER.size:
        raise CheckpointError(f"checkpoint {path} is truncated (no header)")
    magic, version, n, beta, t, seed, digest = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise CheckpointError(f"bad magic {magic!r} in {path}")
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version} in {path}")
    need = _HEADER.size + 2 * n * n * 16
    if len(raw) != need:
        raise CheckpointError(
            f"checkpoint {path} has {len(raw)} bytes, expected {need} for n={n}"
        )
    body = np.frombuffer(raw, dtype="<c16", count=2 * n * n, offset=_HEADER.size)
    omega = body[: n * n].reshape(n, n).copy()
    j = body[n * n :].reshape(n, n).copy()
    return Checkpoint(n, beta, t, seed, digest, omega, j)


def verify_digest(cp: Checkpoint, digest: bytes, force: bool = False):
    if cp.config_digest != digest and not force:
        raise DigestMismatchError(
            "checkpoint configuration digest does not match the resuming "
            "configuration (pass force to override)"
        )
