"""Dyadic frequency decomposition, Besov norms and Bernstein-type checks.

The bank splits the lattice into a low-frequency ball and dyadic annular
shells. It is built from one smooth radial cutoff

    chi(r) = 1 for r <= 3/4,  0 for r >= 4/3,  a C-infinity ramp between,

so that

    psi(k)   = chi(|k|)                                  (block j = -1)
    phi_j(k) = chi(|k| / 2^(j+1)) - chi(|k| / 2^j)       (0 <= j < J)
    phi_J(k) = 1 - chi(|k| / 2^J)                        (top shell, catch-all)

The sum telescopes, so psi + sum_j phi_j = 1 holds at every lattice point to
rounding, and block j = J absorbs whatever sits above the last full annulus so
shell sums reconstruct any representable field exactly. Each phi_j with j < J
is supported in the annulus (3/4) 2^j <= |k| <= (8/3) 2^j and equals the j = 0
profile evaluated at 2^-j |k|; the catch-all keeps the lower edge and runs out
to the lattice corner (which still sits below (8/3) 2^J).

Block projections are Fourier-side multiplications, exact on the torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import (
    GridSpec,
    RealField,
    SpectralField,
    _lattice,
    fft_forward,
    fft_inverse,
    lq_norm,
)

#: support radii of the mother shell profile
INNER_RADIUS = 0.75
OUTER_RADIUS = 8.0 / 3.0
#: outer radius of the low-frequency ball
BALL_RADIUS = 4.0 / 3.0


def _smoothstep(t: np.ndarray) -> np.ndarray:
    """C-infinity monotone step, 0 for t <= 0 and 1 for t >= 1."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        g = np.where(t > 0.0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        gc = np.where(t < 1.0, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return g / (g + gc)


def chi(r: np.ndarray) -> np.ndarray:
    """Radial cutoff: 1 on [0, 3/4], 0 on [4/3, inf), smooth ramp between."""
    r = np.asarray(r, dtype=np.float64)
    return _smoothstep((BALL_RADIUS - r) / (BALL_RADIUS - INNER_RADIUS))


def phi0_profile(r: np.ndarray) -> np.ndarray:
    """Mother shell profile chi(r/2) - chi(r), supported on [3/4, 8/3]."""
    return np.maximum(chi(np.asarray(r) / 2.0) - chi(r), 0.0)


def max_shell_index(n: int) -> int:
    """Largest j whose shell lower edge (3/4) 2^j still fits under n/2."""
    j = 0
    while INNER_RADIUS * 2.0 ** (j + 1) <= n / 2.0:
        j += 1
    return j


@dataclass(frozen=True)
class DyadicFilterBank:
    """Sampled shell profiles on the frequency lattice of one grid.

    Attributes:
        grid: the grid whose lattice the profiles are sampled on
        psi_hat: low-frequency ball profile (block j = -1)
        phi_hat: tuple of shell profiles for j = 0 .. j_max; the last entry is
            the catch-all shell
        j_max: index of the top shell
    """

    grid: GridSpec
    psi_hat: np.ndarray
    phi_hat: tuple[np.ndarray, ...]
    j_max: int

    def multiplier(self, j: int) -> np.ndarray:
        """Profile of block j, j = -1 for the ball."""
        if j == -1:
            return self.psi_hat
        if 0 <= j <= self.j_max:
            return self.phi_hat[j]
        raise ValueError(f"shell index must lie in [-1, {self.j_max}], got {j}")

    @property
    def n_blocks(self) -> int:
        return self.j_max + 2

    def support_radii(self, j: int) -> tuple[float, float]:
        """(inner, outer) support radii of block j; outer may be inf."""
        if j == -1:
            return 0.0, BALL_RADIUS
        if j == self.j_max:
            return INNER_RADIUS * 2.0**j, math.inf
        return INNER_RADIUS * 2.0**j, OUTER_RADIUS * 2.0**j


@dataclass
class ShellDecomposition:
    """Per-block physical-space pieces of one field; blocks[0] is j = -1."""

    blocks: list[RealField]
    grid: GridSpec

    def block(self, j: int) -> RealField:
        return self.blocks[j + 1]


def build_filter_bank(grid: GridSpec) -> DyadicFilterBank:
    """Sample the dyadic profiles on the lattice of ``grid``."""
    n = grid.n
    if INNER_RADIUS > n / 2.0:
        raise ValueError(f"grid n={n} cannot host shell j=0")
    absk = _lattice(n)[5]
    j_max = max_shell_index(n)
    psi = chi(absk)
    phi = []
    for j in range(j_max):
        phi.append(np.maximum(chi(absk / 2.0 ** (j + 1)) - chi(absk / 2.0**j), 0.0))
    top = np.maximum(1.0 - chi(absk / 2.0**j_max), 0.0)
    phi.append(top)
    for a in (psi, *phi):
        a.setflags(write=False)
    return DyadicFilterBank(grid, psi, tuple(phi), j_max)


def project_shell_spectral(F: SpectralField, j: int, bank: DyadicFilterBank) -> SpectralField:
    """Block projection on the spectral side."""
    return SpectralField(bank.multiplier(j) * F.coeffs, F.grid)


def project_shell(f: RealField, j: int, bank: DyadicFilterBank) -> RealField:
    """Block projection of a physical field (Fourier multiply, exact)."""
    if f.grid != bank.grid:
        raise ValueError("field and filter bank live on different grids")
    coeffs = bank.multiplier(j) * fft_forward(f.values)
    return RealField(fft_inverse(coeffs), f.grid)


def shell_decomposition(f: RealField, bank: DyadicFilterBank) -> ShellDecomposition:
    """All blocks of f; summing them reconstructs f."""
    coeffs = fft_forward(f.values)
    blocks = [
        RealField(fft_inverse(bank.multiplier(j) * coeffs), f.grid)
        for j in range(-1, bank.j_max + 1)
    ]
    return ShellDecomposition(blocks, f.grid)


def partial_sum(f: RealField, j: int, bank: DyadicFilterBank) -> RealField:
    """Low-pass partial sum: blocks -1 .. j-1 combined in one multiplier."""
    if j < 0:
        raise ValueError(f"partial sum index must be >= 0, got {j}")
    mult = bank.psi_hat.copy()
    for m in range(min(j, bank.j_max + 1)):
        mult = mult + bank.phi_hat[m]
    coeffs = mult * fft_forward(f.values)
    return RealField(fft_inverse(coeffs), f.grid)


def _sequence_norm(values: np.ndarray, q: float) -> float:
    if q == math.inf:
        return float(np.max(values)) if values.size else 0.0
    return float(np.sum(values**q) ** (1.0 / q))


def besov_norm(
    f: RealField, s: float, p: float, q_index: float, bank: DyadicFilterBank
) -> float:
    """Dyadic-block norm  || 2^(j s) ||block_j f||_Lp ||_{l^q},  j = -1 .. j_max.

    The j = -1 ball block enters with weight 2^(-s), i.e. the 2^(j s) weight
    is applied uniformly from j = -1 on.
    """
    for name, val in (("p", p), ("q_index", q_index)):
        if val != math.inf and not (np.isfinite(val) and val >= 1.0):
            raise ValueError(f"{name} must lie in [1, inf], got {val!r}")
    coeffs = fft_forward(f.values)
    terms = np.empty(bank.n_blocks)
    for idx, j in enumerate(range(-1, bank.j_max + 1)):
        block = RealField(fft_inverse(bank.multiplier(j) * coeffs), f.grid)
        terms[idx] = 2.0 ** (j * s) * lq_norm(block, p)
    return _sequence_norm(terms, q_index)


@dataclass
class BernsteinReport:
    """Ratios of ||(-Laplace)^alpha f|| against the dyadic scale 2^(2 alpha j).

    lower_ratio = ||(-Lap)^a f||_q / (2^(2 a j) ||f||_q)
    upper_ratio = ||(-Lap)^a f||_q / (2^(2 a j + 2 j (1/p - 1/q)) ||f||_p)
    """

    j: int
    alpha: float
    p: float
    q: float
    norm_frac: float
    norm_q: float
    norm_p: float
    lower_ratio: float
    upper_ratio: float


def is_shell_supported(
    F: SpectralField, j: int, bank: DyadicFilterBank, tol: float = 1e-12
) -> bool:
    """True when the spectrum of F lies inside block j's support radii."""
    absk = _lattice(F.grid.n)[5]
    inner, outer = bank.support_radii(j)
    outside = (absk < inner - 1e-12) | (absk > outer + 1e-12)
    scale = np.abs(F.coeffs).max()
    if scale == 0.0:
        return True
    return bool(np.abs(F.coeffs[outside]).max(initial=0.0) <= tol * scale)


def bernstein_check(
    f: RealField,
    alpha: float,
    p: float,
    q: float,
    j: int,
    bank: DyadicFilterBank,
) -> BernsteinReport:
    """Derivative-vs-scale ratios for a field supported in shell j.

    Requires 1 <= p <= q <= inf and alpha >= 0. For p = q = 2 the Plancherel
    identity pins lower_ratio * 2^(2 alpha j) between (3/4 2^j)^(2 alpha) and
    (8/3 2^j)^(2 alpha); see the tests for the exact envelope assertions.
    """
    if alpha < 0.0:
        raise ValueError(f"alpha must be >= 0, got {alpha!r}")
    for name, val in (("p", p), ("q", q)):
        if val != math.inf and not (np.isfinite(val) and val >= 1.0):
            raise ValueError(f"{name} must lie in [1, inf], got {val!r}")
    if not (p <= q):
        raise ValueError(f"need p <= q, got p={p!r}, q={q!r}")
    F = SpectralField(fft_forward(f.values), f.grid)
    if not is_shell_supported(F, j, bank):
        raise ValueError(f"field is not spectrally supported in shell {j}")
    absk = _lattice(f.grid.n)[5]
    mult = absk ** (2.0 * alpha)
    mult[0, 0] = 0.0
    frac = RealField(fft_inverse(mult * F.coeffs), f.grid)
    norm_frac = lq_norm(frac, q)
    norm_q = lq_norm(f, q)
    norm_p = lq_norm(f, p)
    if norm_q == 0.0 or norm_p == 0.0:
        raise ValueError("zero field: Bernstein ratios are undefined")
    inv_p = 0.0 if p == math.inf else 1.0 / p
    inv_q = 0.0 if q == math.inf else 1.0 / q
    lower = norm_frac / (2.0 ** (2.0 * alpha * j) * norm_q)
    upper = norm_frac / (2.0 ** (2.0 * alpha * j + 2.0 * j * (inv_p - inv_q)) * norm_p)
    return BernsteinReport(j, alpha, p, q, norm_frac, norm_q, norm_p, lower, upper)
