"""Spectral grid, transforms and Fourier-multiplier operators on the 2pi torus.

Fields live on an n-by-n uniform grid over [0, 2pi)^2. Spectral coefficients
follow the Fourier-series convention

    f(x) = sum_k coeff(k) exp(i k.x),   coeff(k) = (1/4pi^2) int f exp(-i k.x) dx

on the integer lattice -n/2 <= k_i < n/2 in numpy fft ordering. Every operator
here is diagonal in k. Odd-derivative multipliers (partial derivatives, the
curl inversion) carry a zeroed Nyquist row so that they map real fields to
real fields; band-limited fields (everything the solver produces under 2/3
dealiasing) never touch the Nyquist row, so the derivative symbols are exact
there.

All functions are pure; grids and cached lattice arrays are immutable and safe
to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TWO_PI = 2.0 * math.pi

#: quadrature weight of the full torus, (2pi)^2
TORUS_AREA = TWO_PI * TWO_PI


class MeanModeError(ValueError):
    """An operation that requires a mean-free field got coeff(0, 0) != 0."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform n-by-n periodic grid on [0, 2pi)^2.

    Attributes:
        n: points per side; even, >= 8 (powers of two recommended for fft speed)
        dealias_fraction: fraction of the Nyquist radius kept by :func:`dealias`
            (default 2/3, the standard truncation for quadratic products)
    """

    n: int
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 8 or self.n % 2 != 0:
            raise ValueError(f"grid size must be an even integer >= 8, got {self.n!r}")
        if not (0.0 < self.dealias_fraction <= 1.0):
            raise ValueError(
                f"dealias_fraction must lie in (0, 1], got {self.dealias_fraction!r}"
            )

    @property
    def h(self) -> float:
        """Grid spacing 2pi/n."""
        return TWO_PI / self.n

    @property
    def dealias_cutoff(self) -> float:
        """Largest |k_i| kept by the dealiasing truncation."""
        return self.dealias_fraction * (self.n / 2.0)

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid (x1, x2) of the grid nodes, 'ij' indexed."""
        x = np.arange(self.n) * self.h
        return np.meshgrid(x, x, indexing="ij")


@lru_cache(maxsize=None)
def _lattice(n: int):
    """Cached wavenumber arrays for an n-by-n lattice.

    Returns (k1, k2, kd1, kd2, ksq, absk, inv_ksq) where kd* are the
    derivative wavenumbers with the Nyquist entry zeroed and inv_ksq is
    1/|k|^2 with the mean mode set to 0.
    """
    k = np.fft.fftfreq(n, d=1.0 / n)  # integers ..., n/2-1, -n/2, ..., -1
    kd = k.copy()
    kd[n // 2] = 0.0
    k1 = np.ascontiguousarray(k[:, None] * np.ones((1, n)))
    k2 = np.ascontiguousarray(np.ones((n, 1)) * k[None, :])
    kd1 = np.ascontiguousarray(kd[:, None] * np.ones((1, n)))
    kd2 = np.ascontiguousarray(np.ones((n, 1)) * kd[None, :])
    ksq = k1 * k1 + k2 * k2
    absk = np.sqrt(ksq)
    inv_ksq = np.zeros_like(ksq)
    inv_ksq[ksq > 0] = 1.0 / ksq[ksq > 0]
    arrays = (k1, k2, kd1, kd2, ksq, absk, inv_ksq)
    for a in arrays:
        a.setflags(write=False)
    return arrays


@lru_cache(maxsize=None)
def _dealias_mask(n: int, fraction: float) -> np.ndarray:
    k1, k2 = _lattice(n)[:2]
    cutoff = fraction * (n / 2.0)
    mask = (np.abs(k1) <= cutoff) & (np.abs(k2) <= cutoff)
    mask.setflags(write=False)
    return mask


@dataclass
class RealField:
    """Real scalar samples on the grid nodes x = (2pi i/n, 2pi l/n)."""

    values: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        n = self.grid.n
        if self.values.shape != (n, n):
            raise ValueError(f"expected shape {(n, n)}, got {self.values.shape}")
        if not np.isfinite(self.values).all():
            raise ValueError("field contains non-finite values")


@dataclass
class SpectralField:
    """Complex Fourier coefficients of a real scalar field.

    Hermitian symmetry coeff(-k) = conj(coeff(k)) is an invariant of fields
    produced by :func:`forward` and preserved by every operator in this
    module; it is checked lazily via :meth:`is_hermitian` rather than on
    construction.
    """

    coeffs: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        n = self.grid.n
        if self.coeffs.shape != (n, n):
            raise ValueError(f"expected shape {(n, n)}, got {self.coeffs.shape}")

    def copy(self) -> "SpectralField":
        return SpectralField(self.coeffs.copy(), self.grid)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        c = self.coeffs
        mirrored = _conj_reflect(c)
        scale = np.abs(c).max()
        if scale == 0.0:
            return True
        return bool(np.abs(c - mirrored).max() <= tol * scale)


def _conj_reflect(c: np.ndarray) -> np.ndarray:
    """conj(coeffs) sampled at -k (indices negated mod n)."""
    n = c.shape[0]
    idx = (-np.arange(n)) % n
    return np.conj(c[np.ix_(idx, idx)])


# ---------------------------------------------------------------------------
# raw-array kernels (shared by the solver's hot path)
# ---------------------------------------------------------------------------


def fft_forward(values: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    return np.fft.fft2(values) / (n * n)


def fft_inverse(coeffs: np.ndarray) -> np.ndarray:
    """Inverse transform, discarding the (rounding-level) imaginary part."""
    n = coeffs.shape[0]
    return np.real(np.fft.ifft2(coeffs) * (n * n))


def curl_inverse_arrays(omega: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Spectral Biot-Savart kernel on raw coefficient arrays (no mean check)."""
    _, _, kd1, kd2, _, _, inv_ksq = _lattice(omega.shape[0])
    u1 = (1j * kd2 * inv_ksq) * omega
    u2 = (-1j * kd1 * inv_ksq) * omega
    return u1, u2


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def forward(f: RealField) -> SpectralField:
    """Transform grid samples to Fourier-series coefficients."""
    return SpectralField(fft_forward(f.values), f.grid)


def inverse(F: SpectralField) -> RealField:
    """Transform coefficients back to grid samples.

    Raises ValueError when the coefficients are visibly non-Hermitian (the
    reconstructed field would have a large imaginary part).
    """
    n = F.grid.n
    w = np.fft.ifft2(F.coeffs) * (n * n)
    scale = np.abs(w.real).max()
    if np.abs(w.imag).max() > 1e-9 * (scale + 1e-300):
        raise ValueError("coefficients are not Hermitian-symmetric: field is not real")
    return RealField(w.real.copy(), F.grid)


def fractional_laplacian(F: SpectralField, beta: float) -> SpectralField:
    """Apply (-Laplace)^beta, the multiplier |k|^(2 beta); mean mode -> 0."""
    if not (np.isfinite(beta) and beta >= 0.0):
        raise ValueError(f"beta must be finite and >= 0, got {beta!r}")
    absk = _lattice(F.grid.n)[5]
    mult = absk ** (2.0 * beta)
    mult[0, 0] = 0.0
    return SpectralField(mult * F.coeffs, F.grid)


def lambda_power(F: SpectralField, beta: float) -> SpectralField:
    """Apply sqrt(-Laplace)^beta, the multiplier |k|^beta; mean mode -> 0."""
    if not (np.isfinite(beta) and beta >= 0.0):
        raise ValueError(f"beta must be finite and >= 0, got {beta!r}")
    absk = _lattice(F.grid.n)[5]
    mult = absk**beta
    mult[0, 0] = 0.0
    return SpectralField(mult * F.coeffs, F.grid)


def partial_derivative(F: SpectralField, axis: int) -> SpectralField:
    """Spectral partial derivative along axis 1 or 2 (multiplier i k_axis)."""
    if axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {axis!r}")
    kd = _lattice(F.grid.n)[1 + axis]  # kd1 at index 2, kd2 at index 3
    return SpectralField(1j * kd * F.coeffs, F.grid)


def biot_savart(omega_hat: SpectralField) -> tuple[SpectralField, SpectralField]:
    """Recover the divergence-free velocity whose scalar curl is omega.

    For k != 0:  u1(k) = i k2 w(k)/|k|^2,  u2(k) = -i k1 w(k)/|k|^2, so that
    k . u(k) = 0 exactly and i k1 u2 - i k2 u1 = w. The mean velocity is 0.
    The identical map sends a current density j to its magnetic field b.
    """
    c = omega_hat.coeffs
    if abs(c[0, 0]) > 1e-13 * max(1.0, np.abs(c).max()):
        raise MeanModeError(
            f"curl inversion needs a mean-free field, got coeff(0,0) = {c[0, 0]!r}"
        )
    u1, u2 = curl_inverse_arrays(c)
    return SpectralField(u1, omega_hat.grid), SpectralField(u2, omega_hat.grid)


def dealias(F: SpectralField) -> SpectralField:
    """Zero every mode with |k1| or |k2| above dealias_fraction * n/2."""
    mask = _dealias_mask(F.grid.n, F.grid.dealias_fraction)
    return SpectralField(np.where(mask, F.coeffs, 0.0 + 0.0j), F.grid)


def lq_norm(f: RealField, q: float) -> float:
    """Grid-quadrature Lebesgue norm (h^2 sum |f|^q)^(1/q); grid max at q=inf."""
    if q == math.inf:
        return float(np.abs(f.values).max())
    if not (np.isfinite(q) and q >= 1.0):
        raise ValueError(f"exponent must satisfy q >= 1 (or inf), got {q!r}")
    h2 = f.grid.h * f.grid.h
    return float((h2 * np.sum(np.abs(f.values) ** q)) ** (1.0 / q))


def l2_norm_spectral(F: SpectralField) -> float:
    """L2 norm evaluated on the spectral side, sqrt(4pi^2 sum |coeff|^2)."""
    return float(math.sqrt(TORUS_AREA * np.sum(np.abs(F.coeffs) ** 2)))
