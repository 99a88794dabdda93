"""Time integration of the vorticity-current system.

State variables are the scalar vorticity w = curl u and current density
j = curl b in spectral space. The evolved system is

    dt w + u.grad w = b.grad j
    dt j + u.grad j + (-Laplace)^beta j
        = b.grad w + 2 d1(b1) (d2(u1) + d1(u2)) - 2 d1(u1) (d2(b1) + d1(b2))

with u, b recovered from w, j by the curl inversion, which keeps both fields
divergence-free exactly. The stiff diffusion multiplier exp(-|k|^(2 beta) t)
is applied exactly through an integrating factor; the classical RK4 stages
handle everything else, so a single linear mode decays by exactly
exp(-|k|^(2 beta) dt) per step. Nonlinear products are formed in physical
space from spectrally differentiated factors and truncated by the 2/3 rule,
which removes quadratic aliasing entirely for band-limited states.

The magnetic-energy dissipation integral int ||Lambda^beta b||_2^2 dt is
accumulated alongside the state from the RK4 stage values (Simpson-type
quadrature, globally 4th order); output-cadence trapezoids are far too coarse
for the energy-identity tolerances the diagnostics enforce.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .spectral import (
    TORUS_AREA,
    GridSpec,
    SpectralField,
    _dealias_mask,
    _lattice,
    curl_inverse_arrays,
    fft_forward,
    fft_inverse,
)

#: below this step size the CFL restriction is treated as a collapse
DT_FLOOR = 1e-13


class SolverAbort(RuntimeError):
    """Integration cannot continue.

    Attributes:
        cause: "non_finite" (NaN/inf appeared) or "cfl" (time step collapsed)
        t: simulation time at the abort
        max_u: largest |u| on the grid at the abort, when computable
    """

    def __init__(self, cause: str, t: float, max_u: float | None = None):
        self.cause = cause
        self.t = t
        self.max_u = max_u
        detail = f", max|u|={max_u:.6g}" if max_u is not None else ""
        super().__init__(f"solver abort ({cause}) at t={t:.6g}{detail}")


@dataclass
class FlowState:
    """Spectral vorticity/current pair at one instant."""

    omega_hat: SpectralField
    j_hat: SpectralField
    t: float
    beta: float

    def __post_init__(self):
        if self.omega_hat.grid != self.j_hat.grid:
            raise ValueError("omega and j live on different grids")
        if not (0.0 < self.beta <= 2.0):
            raise ValueError(f"beta must lie in (0, 2], got {self.beta!r}")

    @property
    def grid(self) -> GridSpec:
        return self.omega_hat.grid

    def validate(self, tol: float = 1e-12):
        """Check mean-free, Hermitian-symmetric, finite coefficients."""
        for name, f in (("omega", self.omega_hat), ("j", self.j_hat)):
            c = f.coeffs
            if not np.isfinite(c.view(np.float64)).all():
                raise ValueError(f"{name}_hat contains non-finite coefficients")
            scale = max(1.0, np.abs(c).max())
            if abs(c[0, 0]) > tol * scale:
                raise ValueError(f"{name}_hat is not mean-free")
            if not f.is_hermitian(tol):
                raise ValueError(f"{name}_hat is not Hermitian-symmetric")


@dataclass
class StepControl:
    """Per-step limits and physics switches."""

    cfl_number: float = 0.4
    dt_max: float = 0.01
    nonlinear_enabled: bool = True
    diffusion_enabled: bool = True

    def __post_init__(self):
        if not (0.0 < self.cfl_number <= 1.0):
            raise ValueError(f"cfl_number must lie in (0, 1], got {self.cfl_number!r}")
        if not (self.dt_max > 0.0):
            raise ValueError(f"dt_max must be positive, got {self.dt_max!r}")


def warn_outside_theory(beta: float):
    """Emit the one-time advisory for diffusion exponents at or below 1."""
    if beta <= 1.0:
        warnings.warn(
            f"beta={beta} is at or below the borderline exponent 1; runs are "
            "exploratory and the regularity diagnostics carry no guarantees",
            UserWarning,
            stacklevel=3,
        )


@lru_cache(maxsize=8)
def _diffusion_symbol(n: int, beta: float) -> np.ndarray:
    """|k|^(2 beta) on the lattice (mean mode 0), cached per (n, beta)."""
    ksq = _lattice(n)[4]
    with np.errstate(divide="ignore"):
        sym = ksq**beta
    sym[0, 0] = 0.0
    sym.setflags(write=False)
    return sym


@lru_cache(maxsize=8)
def _magnetic_weight(n: int, beta: float) -> np.ndarray:
    """|k|^(2 beta - 2) (mean mode 0): ||Lambda^beta b||^2 weight applied to j."""
    ksq = _lattice(n)[4]
    with np.errstate(divide="ignore"):
        w = ksq ** (beta - 1.0)
    w[0, 0] = 0.0
    if not np.isfinite(w).all():  # beta < 1 puts inf at the mean mode only
        w = np.where(np.isfinite(w), w, 0.0)
    w.setflags(write=False)
    return w


def _magnetic_dissipation_rate(j_coeffs: np.ndarray, weight: np.ndarray) -> float:
    """||Lambda^beta b||_2^2 for the vector field b with curl b = j."""
    return float(TORUS_AREA * np.sum(weight * (j_coeffs.real**2 + j_coeffs.imag**2)))


def _velocity_fields(coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    u1h, u2h = curl_inverse_arrays(coeffs)
    return fft_inverse(u1h), fft_inverse(u2h)


def _nonlinear_rhs(
    w: np.ndarray, jc: np.ndarray, grid: GridSpec, t: float
) -> tuple[np.ndarray, np.ndarray]:
    """Dealiased, mean-free non-diffusive tendencies on raw coefficient arrays."""
    n = grid.n
    _, _, kd1, kd2, _, _, inv_ksq = _lattice(n)
    u1h = (1j * kd2 * inv_ksq) * w
    u2h = (-1j * kd1 * inv_ksq) * w
    b1h = (1j * kd2 * inv_ksq) * jc
    b2h = (-1j * kd1 * inv_ksq) * jc

    u1 = fft_inverse(u1h)
    u2 = fft_inverse(u2h)
    b1 = fft_inverse(b1h)
    b2 = fft_inverse(b2h)
    dw1 = fft_inverse(1j * kd1 * w)
    dw2 = fft_inverse(1j * kd2 * w)
    dj1 = fft_inverse(1j * kd1 * jc)
    dj2 = fft_inverse(1j * kd2 * jc)
    d1b1 = fft_inverse(1j * kd1 * b1h)
    shear_u = fft_inverse(1j * kd2 * u1h + 1j * kd1 * u2h)  # d2 u1 + d1 u2
    d1u1 = fft_inverse(1j * kd1 * u1h)
    shear_b = fft_inverse(1j * kd2 * b1h + 1j * kd1 * b2h)  # d2 b1 + d1 b2

    n_w = -(u1 * dw1 + u2 * dw2) + (b1 * dj1 + b2 * dj2)
    n_j = (
        -(u1 * dj1 + u2 * dj2)
        + (b1 * dw1 + b2 * dw2)
        + 2.0 * d1b1 * shear_u
        - 2.0 * d1u1 * shear_b
    )

    mask = _dealias_mask(n, grid.dealias_fraction)
    nw_hat = np.where(mask, fft_forward(n_w), 0.0 + 0.0j)
    nj_hat = np.where(mask, fft_forward(n_j), 0.0 + 0.0j)
    nw_hat[0, 0] = 0.0
    nj_hat[0, 0] = 0.0
    if not (
        np.isfinite(nw_hat.view(np.float64)).all()
        and np.isfinite(nj_hat.view(np.float64)).all()
    ):
        speed = np.hypot(u1, u2)
        max_u = float(np.nanmax(speed)) if speed.size else None
        raise SolverAbort("non_finite", t, max_u)
    return nw_hat, nj_hat


def compute_rhs(state: FlowState) -> tuple[SpectralField, SpectralField]:
    """Non-diffusive tendencies (dw/dt, dj/dt); diffusion is applied in step()."""
    nw, nj = _nonlinear_rhs(state.omega_hat.coeffs, state.j_hat.coeffs, state.grid, state.t)
    return SpectralField(nw, state.grid), SpectralField(nj, state.grid)


def cfl_dt(state: FlowState, ctl: StepControl) -> float:
    """Advective step bound min(dt_max, cfl h / (max |u|+|b| + eps))."""
    u1, u2 = _velocity_fields(state.omega_hat.coeffs)
    b1, b2 = _velocity_fields(state.j_hat.coeffs)
    speed = np.hypot(u1, u2) + np.hypot(b1, b2)
    vmax = float(speed.max())
    if not math.isfinite(vmax):
        raise SolverAbort("non_finite", state.t, vmax)
    return min(ctl.dt_max, ctl.cfl_number * state.grid.h / (vmax + 1e-12))


@dataclass
class EnergyAccumulator:
    """Running int ||Lambda^beta b||_2^2 dt fed by the RK4 stage values."""

    value: float = 0.0


def step(
    state: FlowState,
    ctl: StepControl,
    dt: float | None = None,
    energy: EnergyAccumulator | None = None,
) -> FlowState:
    """Advance one step of size dt (CFL-limited when dt is None).

    With nonlinearity disabled the update is the bare integrating factor:
    j(k) -> exp(-|k|^(2 beta) dt) j(k) and w unchanged, exactly. When an
    EnergyAccumulator is supplied, the magnetic dissipation integral advances
    by the RK4 quadrature of the stage dissipation rates.
    """
    if dt is None:
        dt = cfl_dt(state, ctl)
    if dt < DT_FLOOR:
        raise SolverAbort("cfl", state.t)
    grid = state.grid
    n = grid.n
    w0 = state.omega_hat.coeffs
    j0 = state.j_hat.coeffs

    if ctl.diffusion_enabled:
        sym = _diffusion_symbol(n, state.beta)
        e_half = np.exp(-0.5 * dt * sym)
        e_full = np.exp(-dt * sym)
    else:
        e_half = e_full = np.ones((n, n))

    mw = _magnetic_weight(n, state.beta)

    if not ctl.nonlinear_enabled:
        j1 = e_full * j0
        if energy is not None:
            g0 = _magnetic_dissipation_rate(j0, mw)
            gh = _magnetic_dissipation_rate(e_half * j0, mw)
            g1 = _magnetic_dissipation_rate(j1, mw)
            energy.value += dt / 6.0 * (g0 + 4.0 * gh + g1)
        new = FlowState(
            SpectralField(w0.copy(), grid), SpectralField(j1, grid), state.t + dt, state.beta
        )
        _check_finite(new)
        return new

    # integrating-factor RK4: stage states in the physical gauge, only
    # decaying exponentials appear
    lw1, lj1 = _nonlinear_rhs(w0, j0, grid, state.t)
    w_s = w0 + 0.5 * dt * lw1
    j_s = e_half * (j0 + 0.5 * dt * lj1)
    g_rates = [_magnetic_dissipation_rate(j0, mw), _magnetic_dissipation_rate(j_s, mw)]

    lw2, lj2 = _nonlinear_rhs(w_s, j_s, grid, state.t + 0.5 * dt)
    w_s = w0 + 0.5 * dt * lw2
    j_s = e_half * j0 + 0.5 * dt * lj2
    g_rates.append(_magnetic_dissipation_rate(j_s, mw))

    lw3, lj3 = _nonlinear_rhs(w_s, j_s, grid, state.t + 0.5 * dt)
    w_s = w0 + dt * lw3
    j_s = e_full * j0 + dt * e_half * lj3
    g_rates.append(_magnetic_dissipation_rate(j_s, mw))

    lw4, lj4 = _nonlinear_rhs(w_s, j_s, grid, state.t + dt)
    w1 = w0 + dt / 6.0 * (lw1 + 2.0 * (lw2 + lw3) + lw4)
    j1 = e_full * j0 + dt / 6.0 * (e_full * lj1 + 2.0 * e_half * (lj2 + lj3) + lj4)
    w1[0, 0] = 0.0
    j1[0, 0] = 0.0

    if energy is not None:
        g0, g2, g3, g4 = g_rates
        energy.value += dt / 6.0 * (g0 + 2.0 * (g2 + g3) + g4)

    new = FlowState(
        SpectralField(w1, grid), SpectralField(j1, grid), state.t + dt, state.beta
    )
    _check_finite(new)
    return new


def _check_finite(state: FlowState):
    for f in (state.omega_hat, state.j_hat):
        if not np.isfinite(f.coeffs.view(np.float64)).all():
            u1, u2 = _velocity_fields(np.nan_to_num(state.omega_hat.coeffs))
            raise SolverAbort("non_finite", state.t, float(np.hypot(u1, u2).max()))


def advance_to(
    state: FlowState,
    ctl: StepControl,
    t_target: float,
    energy: EnergyAccumulator | None = None,
) -> tuple[FlowState, float]:
    """Step until t_target, clamping dt so the target is hit exactly.

    Returns (state_at_target, dt_used_on_the_final_step).
    """
    dt_used = 0.0
    while t_target - state.t > 1e-12:
        dt_cfl = cfl_dt(state, ctl)
        if dt_cfl < DT_FLOOR:
            raise SolverAbort("cfl", state.t)
        dt_used = min(dt_cfl, t_target - state.t)
        state = step(state, ctl, dt_used, energy)
    if state.t != t_target:
        state = replace(state, t=t_target)
    return state, dt_used
