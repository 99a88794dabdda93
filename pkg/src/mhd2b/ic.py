"""Initial-condition generators.

Every generator returns a FlowState whose vorticity/current pair is mean-free,
Hermitian-symmetric and band-limited below the dealias cutoff; the
divergence-free constraints on the derived velocity and magnetic field are
automatic in this representation.

Generators:
    zero            quiescent state
    single_mode_b   u = 0, b = amplitude (sin x2, 0), i.e. j = -amplitude cos x2;
                    every nonlinear term vanishes identically, so
                    j(t) = exp(-t) j(0) exactly for any diffusion exponent
    orszag_tang_like
                    w0 = amp_omega (cos x1 + cos x2) and j0 from the magnetic
                    potential a = amp_b (cos 2 x1 + cos x2), j0 = Laplace a;
                    a smooth vortex that exercises every nonlinear coupling
    random_band     seeded random fields, isotropic spectrum (1+|k|)^(-slope)
                    supported on 0 < |k| <= kmax, scaled so both the vorticity
                    and the current have L2 norm `amplitude`
"""

from __future__ import annotations

import numpy as np

from .config import ConfigError
from .solver import FlowState, warn_outside_theory
from .spectral import TORUS_AREA, GridSpec, SpectralField, _lattice, fft_forward

GENERATORS = ("zero", "single_mode_b", "orszag_tang_like", "random_band")

_DEFAULTS = {
    "amplitude": 1.0,
    "kmax": 8.0,
    "slope": 2.0,
    "amp_omega": 2.0,
    "amp_b": 1.0,
}


def _empty(n: int) -> np.ndarray:
    return np.zeros((n, n), dtype=np.complex128)


def _random_band_field(rng, grid: GridSpec, kmax: float, slope: float, amplitude: float):
    n = grid.n
    absk = _lattice(n)[5]
    white = rng.standard_normal((n, n))
    coeffs = fft_forward(white)
    envelope = np.where((absk > 0.0) & (absk <= kmax), (1.0 + absk) ** (-slope), 0.0)
    coeffs *= envelope
    norm = np.sqrt(TORUS_AREA * np.sum(np.abs(coeffs) ** 2))
    if norm > 0.0:
        coeffs *= amplitude / norm
    return coeffs


def make_initial_condition(
    name: str,
    params: dict[str, float],
    seed: int,
    grid: GridSpec,
    beta: float,
) -> FlowState:
    """Build the named initial state at t = 0 (deterministic for a fixed seed)."""
    p = dict(_DEFAULTS)
    p.update(params or {})
    n = grid.n
    omega = _empty(n)
    j = _empty(n)

    if name == "zero":
        pass
    elif name == "single_mode_b":
        amp = p["amplitude"]
        # j = -amp cos x2  ->  coeff(0, +-1) = -amp/2
        j[0, 1] = -0.5 * amp
        j[0, n - 1] = -0.5 * amp
    elif name == "orszag_tang_like":
        aw = p["amp_omega"]
        ab = p["amp_b"]
        omega[1, 0] = omega[n - 1, 0] = 0.5 * aw
        omega[0, 1] = omega[0, n - 1] = 0.5 * aw
        # j = Laplace(a), a = ab (cos 2x1 + cos x2)
        j[2, 0] = j[n - 2, 0] = -4.0 * 0.5 * ab
        j[0, 1] = j[0, n - 1] = -0.5 * ab
    elif name == "random_band":
        kmax = p["kmax"]
        if kmax > grid.dealias_cutoff:
            raise ConfigError(
                f"random_band kmax={kmax:g} exceeds the dealias cutoff "
                f"{grid.dealias_cutoff:g}"
            )
        rng = np.random.default_rng(seed)
        omega = _random_band_field(rng, grid, kmax, p["slope"], p["amplitude"])
        j = _random_band_field(rng, grid, kmax, p["slope"], p["amplitude"])
    else:
        raise ConfigError(f"unknown initial-condition generator {name!r}; known: {GENERATORS}")

    k1, k2 = _lattice(n)[:2]
    for arr, label in ((omega, "omega"), (j, "j")):
        occupied = np.abs(arr) > 0
        kmax_used = max(
            np.abs(k1[occupied]).max(initial=0.0), np.abs(k2[occupied]).max(initial=0.0)
        )
        if kmax_used > grid.dealias_cutoff:
            raise ConfigError(f"{label} initial condition extends past the dealias cutoff")

    warn_outside_theory(beta)
    state = FlowState(SpectralField(omega, grid), SpectralField(j, grid), 0.0, beta)
    state.validate()
    return state
