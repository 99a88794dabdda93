"""Norm records, admissible parameter ranges, and inequality spot checks.

Every output step produces a NormRecord holding the monitored norms and the
running time integrals whose finiteness the solver's regularity diagnostics
track: kinetic/magnetic energies and the exact energy balance residual, L2 and
Lq norms of vorticity and current, dyadic-block (Besov) norms of the current,
sup norms, and gradient-of-current norms.

Admissibility of the diagnostic exponents, given the diffusion exponent
beta in (1, 2]:

    Lq norms:        2 <= q <= 2/(2-beta)   (any finite q >= 2 at beta = 2)
    Besov (s, q):    2/q < s < 2 beta - 1
    grad-j Lr:       2 <= r < 2/(4-3 beta) if beta <= 4/3, else 2 <= r <= inf

Inadmissible entries are still computed (the quadratures are always defined on
the grid) but flagged, so a run can monitor exponents outside the guaranteed
ranges deliberately.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .lp import DyadicFilterBank, besov_norm, project_shell_spectral
from .solver import FlowState, _magnetic_weight
from .spectral import (
    TORUS_AREA,
    RealField,
    SpectralField,
    _lattice,
    curl_inverse_arrays,
    fft_forward,
    fft_inverse,
    lq_norm,
)

# ---------------------------------------------------------------------------
# parameter ranges
# ---------------------------------------------------------------------------


def default_besov_smoothness(beta: float) -> float:
    """Midpoint of the admissible (1, 2 beta - 1) smoothness window: beta."""
    return beta


@dataclass
class RangeCheck:
    kind: str  # "beta" | "q" | "s" | "r"
    value: tuple
    admissible: bool
    constraint: str


@dataclass
class AdmissibilityReport:
    beta: float
    checks: list[RangeCheck]

    @property
    def all_admissible(self) -> bool:
        return all(c.admissible for c in self.checks)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            tag = "ok " if c.admissible else "BAD"
            vals = ", ".join(f"{v:g}" for v in c.value)
            out.append(f"[{tag}] {c.kind}=({vals})  {c.constraint}")
        return out


def q_admissible(beta: float, q: float) -> tuple[bool, str]:
    if beta == 2.0:
        return (2.0 <= q < math.inf), "2 <= q < inf (beta = 2)"
    hi = 2.0 / (2.0 - beta)
    return (2.0 <= q <= hi), f"2 <= q <= 2/(2-beta) = {hi:g}"

def s_admissible(beta: float, q: float, s: float) -> tuple[bool, str]:
    lo = 2.0 / q
    hi = 2.0 * beta - 1.0
    return (lo < s < hi), f"2/q = {lo:g} < s < 2 beta - 1 = {hi:g}"


def r_admissible(beta: float, r: float) -> tuple[bool, str]:
    if beta > 4.0 / 3.0:
        return (2.0 <= r), "2 <= r <= inf (beta > 4/3)"
    if beta == 4.0 / 3.0:
        return (2.0 <= r < math.inf), "2 <= r < inf (beta = 4/3)"
    hi = 2.0 / (4.0 - 3.0 * beta)
    return (2.0 <= r < hi), f"2 <= r < 2/(4-3 beta) = {hi:g}"


def validate_ranges(
    beta: float,
    q_list: list[float] | float = (),
    s_list: list[float] | float = (),
    r_list: list[float] | float = (),
) -> AdmissibilityReport:
    """Admissibility of diagnostic exponents; never raises for out-of-range beta.

    (q, s) pairs are checked as the cross product of the q and s lists, since
    a Besov smoothness is only meaningful relative to an integrability.
    """
    q_list = [q_list] if np.isscalar(q_list) else list(q_list)
    s_list = [s_list] if np.isscalar(s_list) else list(s_list)
    r_list = [r_list] if np.isscalar(r_list) else list(r_list)
    checks = []
    if not (1.0 < beta <= 2.0):
        checks.append(
            RangeCheck("beta", (beta,), False, "outside theorem hypothesis (need 1 < beta <= 2)")
        )
        return AdmissibilityReport(beta, checks)
    checks.append(RangeCheck("beta", (beta,), True, "1 < beta <= 2"))
    for q in q_list:
        ok, why = q_admissible(beta, q)
        checks.append(RangeCheck("q", (q,), ok, why))
    for s in s_list:
        for q in q_list or [2.0]:
            ok_q, _ = q_admissible(beta, q)
            ok_s, why = s_admissible(beta, q, s)
            checks.append(RangeCheck("s", (q, s), ok_q and ok_s, why))
    for r in r_list:
        ok, why = r_admissible(beta, r)
        checks.append(RangeCheck("r", (r,), ok, why))
    return AdmissibilityReport(beta, checks)


@dataclass
class RangeParams:
    """Diagnostic exponent lists plus the derived Besov (s, q) pairs."""

    beta: float
    q_list: list[float] = field(default_factory=lambda: [2.0, 4.0])
    s_list: list[float] = field(default_factory=list)
    r_list: list[float] = field(default_factory=lambda: [2.0, 4.0])

    def __post_init__(self):
        self.q_list = [float(q) for q in self.q_list]
        self.s_list = [float(s) for s in self.s_list]
        self.r_list = [float(r) for r in self.r_list]

    @property
    def besov_pairs(self) -> list[tuple[float, float]]:
        """(s, q) pairs monitored as ||j||_{B^s_{q,1}}; default (beta, 2)."""
        if not self.s_list:
            return [(default_besov_smoothness(self.beta), 2.0)]
        qs = self.q_list or [2.0]
        return [(s, q) for s in self.s_list for q in qs]

    def report(self) -> AdmissibilityReport:
        return validate_ranges(self.beta, self.q_list, self.s_list, self.r_list)

    def warn_inadmissible(self):
        rep = self.report()
        for c in rep.checks:
            if not c.admissible:
                vals = ", ".join(f"{v:g}" for v in c.value)
                warnings.warn(
                    f"diagnostic exponent {c.kind}=({vals}) is outside the "
                    f"guaranteed range ({c.constraint}); it is computed anyway",
                    UserWarning,
                    stacklevel=2,
                )


# ---------------------------------------------------------------------------
# per-output norm record
# ---------------------------------------------------------------------------


@dataclass
class NormRecord:
    """All monitored norms at one output time plus running time integrals."""

    t: float
    dt_used: float
    l2_u: float
    l2_b: float
    l2_lambda_beta_b: float
    energy_residual: float
    l2_omega: float
    l2_j: float
    l2_lambda_beta_j: float
    lq_omega: dict[float, float]
    lq_j: dict[float, float]
    besov_j: dict[tuple[float, float], float]
    linf_omega: float
    linf_b: float
    linf_j: float
    linf_grad_j: float
    lr_grad_j: dict[float, float]
    tail_weight: float
    int_l2_lambda_beta_b_sq: float
    int_l2_lambda_beta_j_sq: float
    int_besov_j: dict[tuple[float, float], float]
    int_linf_grad_j: float
    int_lr_grad_j: dict[float, float]
    int_linf_j: float


def _weighted_l2_sq(coeffs: np.ndarray, weight: np.ndarray) -> float:
    return float(TORUS_AREA * np.sum(weight * (coeffs.real**2 + coeffs.imag**2)))


def _trap(prev_t, t, f_prev, f_now):
    return 0.5 * (t - prev_t) * (f_prev + f_now)


def record(
    state: FlowState,
    params: RangeParams,
    bank: DyadicFilterBank,
    prev: NormRecord | None = None,
    *,
    dt_used: float = 0.0,
    int_l2_lambda_beta_b_sq: float | None = None,
) -> NormRecord:
    """Compute one NormRecord; cumulative integrals extend prev by trapezoids.

    The runner passes the magnetic dissipation integral it accumulates at RK4
    stage resolution via ``int_l2_lambda_beta_b_sq``; standalone callers can
    omit it and get an output-cadence trapezoid instead. The energy residual
    is tracked incrementally,

        residual(t) = residual(prev) + d(||u||^2 + ||b||^2) + 2 dIntegral,

    which telescopes to (||u||^2 + ||b||^2 + 2 int ||Lambda^beta b||^2) minus
    its initial value.
    """
    if prev is None and state.t > 0.0:
        raise ValueError("a previous record is required when t > 0 (cumulative integrals)")
    grid = state.grid
    beta = state.beta
    n = grid.n
    w = state.omega_hat.coeffs
    jc = state.j_hat.coeffs
    _, _, _, _, ksq, _, inv_ksq = _lattice(n)

    l2_omega = math.sqrt(_weighted_l2_sq(w, np.ones_like(ksq)))
    l2_j = math.sqrt(_weighted_l2_sq(jc, np.ones_like(ksq)))
    l2_u = math.sqrt(_weighted_l2_sq(w, inv_ksq))
    l2_b = math.sqrt(_weighted_l2_sq(jc, inv_ksq))
    mw = _magnetic_weight(n, beta)
    l2_lb_b = math.sqrt(_weighted_l2_sq(jc, mw))
    sym = np.ascontiguousarray(_lattice(n)[5]) ** (2.0 * beta)
    sym[0, 0] = 0.0
    l2_lb_j = math.sqrt(_weighted_l2_sq(jc, sym))

    # physical-space fields
    omega_phys = RealField(fft_inverse(w), grid)
    j_phys = RealField(fft_inverse(jc), grid)
    b1h, b2h = curl_inverse_arrays(jc)
    b_mag = np.hypot(fft_inverse(b1h), fft_inverse(b2h))
    kd1, kd2 = _lattice(n)[2:4]
    grad_j = np.hypot(fft_inverse(1j * kd1 * jc), fft_inverse(1j * kd2 * jc))
    grad_j_field = RealField(grad_j, grid)

    lq_omega = {q: lq_norm(omega_phys, q) for q in params.q_list}
    lq_j = {q: lq_norm(j_phys, q) for q in params.q_list}
    besov = {
        (s, q): besov_norm(j_phys, s, q, 1.0, bank) for (s, q) in params.besov_pairs
    }
    linf_omega = float(np.abs(omega_phys.values).max())
    linf_b = float(b_mag.max())
    linf_j = float(np.abs(j_phys.values).max())
    linf_grad_j = float(grad_j.max())
    lr_grad = {r: lq_norm(grad_j_field, r) for r in params.r_list}
    tail = (ksq > (n / 4.0) ** 2)
    tail_weight = float(np.sum(np.abs(w[tail]) ** 2 + np.abs(jc[tail]) ** 2))

    if prev is None:
        int_b = 0.0 if int_l2_lambda_beta_b_sq is None else float(int_l2_lambda_beta_b_sq)
        int_j = 0.0
        int_bes = {k: 0.0 for k in besov}
        int_gj_inf = 0.0
        int_gj_r = {r: 0.0 for r in lr_grad}
        int_j_inf = 0.0
        residual = 0.0
    else:
        t0, t1 = prev.t, state.t
        if int_l2_lambda_beta_b_sq is None:
            int_b = prev.int_l2_lambda_beta_b_sq + _trap(
                t0, t1, prev.l2_lambda_beta_b**2, l2_lb_b**2
            )
        else:
            int_b = float(int_l2_lambda_beta_b_sq)
        int_j = prev.int_l2_lambda_beta_j_sq + _trap(
            t0, t1, prev.l2_lambda_beta_j**2, l2_lb_j**2
        )
        int_bes = {
            k: prev.int_besov_j[k] + _trap(t0, t1, prev.besov_j[k], besov[k])
            for k in besov
        }
        int_gj_inf = prev.int_linf_grad_j + _trap(t0, t1, prev.linf_grad_j, linf_grad_j)
        int_gj_r = {
            r: prev.int_lr_grad_j[r] + _trap(t0, t1, prev.lr_grad_j[r], lr_grad[r])
            for r in lr_grad
        }
        int_j_inf = prev.int_linf_j + _trap(t0, t1, prev.linf_j, linf_j)
        residual = (
            prev.energy_residual
            + (l2_u**2 + l2_b**2)
            - (prev.l2_u**2 + prev.l2_b**2)
            + 2.0 * (int_b - prev.int_l2_lambda_beta_b_sq)
        )

    return NormRecord(
        t=state.t,
        dt_used=dt_used,
        l2_u=l2_u,
        l2_b=l2_b,
        l2_lambda_beta_b=l2_lb_b,
        energy_residual=residual,
        l2_omega=l2_omega,
        l2_j=l2_j,
        l2_lambda_beta_j=l2_lb_j,
        lq_omega=lq_omega,
        lq_j=lq_j,
        besov_j=besov,
        linf_omega=linf_omega,
        linf_b=linf_b,
        linf_j=linf_j,
        linf_grad_j=linf_grad_j,
        lr_grad_j=lr_grad,
        tail_weight=tail_weight,
        int_l2_lambda_beta_b_sq=int_b,
        int_l2_lambda_beta_j_sq=int_j,
        int_besov_j=int_bes,
        int_linf_grad_j=int_gj_inf,
        int_lr_grad_j=int_gj_r,
        int_linf_j=int_j_inf,
    )


# ---------------------------------------------------------------------------
# inequality spot checks
# ---------------------------------------------------------------------------


@dataclass
class SobolevRatioReport:
    """LHS/RHS ratios (constants stripped) for the interpolation inequalities.

    b_inf_ratio:      ||b||_inf / (||b||_2^(1-1/(1+beta)) ||L^b j||_2^(1/(1+beta)))
    grad_j_ratios[q]: ||grad j||_q / (||j||_2^(1-e) ||L^b j||_2^e), e = 2(q-1)/(beta q)
    j_inf_ratio:      ||j||_inf / (||j||_2^(1-1/beta) ||L^b j||_2^(1/beta))
    grad_pow_embedding: ||grad |j| ||_2 / (||j||_2 + ||L^b |j| ||_2), recorded only
    """

    b_inf_ratio: float | None
    grad_j_ratios: dict[float, float]
    j_inf_ratio: float | None
    grad_pow_embedding: float | None


def sobolev_ratio_checks(state: FlowState, q_list: list[float] = (2.0, 4.0)) -> SobolevRatioReport:
    """Evaluate the interpolation-inequality ratios on one state.

    Every ratio is invariant under amplitude rescaling of the state (both
    sides are 1-homogeneous). Ratios whose denominator vanishes (zero field)
    are reported as None rather than NaN.
    """
    grid = state.grid
    n = grid.n
    beta = state.beta
    jc = state.j_hat.coeffs
    kd1, kd2 = _lattice(n)[2:4]

    l2_j = math.sqrt(_weighted_l2_sq(jc, np.ones((n, n))))
    sym = np.ascontiguousarray(_lattice(n)[5]) ** (2.0 * beta)
    sym[0, 0] = 0.0
    l2_lb_j = math.sqrt(_weighted_l2_sq(jc, sym))

    b1h, b2h = curl_inverse_arrays(jc)
    b_mag = np.hypot(fft_inverse(b1h), fft_inverse(b2h))
    linf_b = float(b_mag.max())
    l2_b = math.sqrt(_weighted_l2_sq(jc, _lattice(n)[6]))

    theta = 1.0 / (1.0 + beta)
    denom = l2_b ** (1.0 - theta) * l2_lb_j**theta
    b_inf_ratio = linf_b / denom if denom > 0.0 else None

    grad_j = np.hypot(fft_inverse(1j * kd1 * jc), fft_inverse(1j * kd2 * jc))
    grad_field = RealField(grad_j, grid)
    grad_ratios = {}
    for q in q_list:
        e = 2.0 * (q - 1.0) / (beta * q)
        denom = l2_j ** (1.0 - e) * l2_lb_j**e
        grad_ratios[q] = lq_norm(grad_field, q) / denom if denom > 0.0 else None

    j_phys = fft_inverse(jc)
    linf_j = float(np.abs(j_phys).max())
    denom = l2_j ** (1.0 - 1.0 / beta) * l2_lb_j ** (1.0 / beta)
    j_inf_ratio = linf_j / denom if denom > 0.0 else None

    # gradient-of-power embedding ratio at q = 2 (|j|^(q/2) = |j|): monitored only
    absj_hat = fft_forward(np.abs(j_phys))
    grad_absj = np.hypot(fft_inverse(1j * kd1 * absj_hat), fft_inverse(1j * kd2 * absj_hat))
    lhs = lq_norm(RealField(grad_absj, grid), 2.0)
    rhs = l2_j + math.sqrt(_weighted_l2_sq(absj_hat, sym))
    grad_pow = lhs / rhs if rhs > 0.0 else None

    return SobolevRatioReport(b_inf_ratio, grad_ratios, j_inf_ratio, grad_pow)


@dataclass
class DiffusionBoundReport:
    """Sign/lower-bound check of the dissipation integral on one dyadic block.

    integral = h^2 sum f |f|^(q-2) (-Laplace)^beta f  with f the block field;
    ratio    = integral / (2^(2 beta k) ||f||_q^q);
    q = 2 additionally pins integral >= (3/4)^(2 beta) 2^(2 beta k) ||f||_2^2
    through the Plancherel identity.
    """

    k: int
    q: float
    beta: float
    integral: float
    block_norm_q: float
    ratio: float | None
    q2_lower_bound: float | None
    passed: bool


def diffusion_lower_bound_check(
    j: RealField,
    k: int,
    q: float,
    beta: float,
    bank: DyadicFilterBank,
) -> DiffusionBoundReport:
    """Check the dissipation lower bound on block k of j (q >= 2 required)."""
    if q < 2.0:
        raise ValueError(f"exponent must satisfy q >= 2, got {q!r}")
    F = SpectralField(fft_forward(j.values), j.grid)
    block = project_shell_spectral(F, k, bank)
    f_phys = fft_inverse(block.coeffs)
    n = j.grid.n
    absk = _lattice(n)[5]
    sym = absk ** (2.0 * beta)
    sym[0, 0] = 0.0
    lap_f = fft_inverse(sym * block.coeffs)
    h2 = j.grid.h**2
    integral = float(h2 * np.sum(f_phys * np.abs(f_phys) ** (q - 2.0) * lap_f))
    norm_q = lq_norm(RealField(f_phys, j.grid), q)
    scale = 2.0 ** (2.0 * beta * k) * norm_q**q
    ratio = integral / scale if scale > 0.0 else None

    if q == 2.0:
        # Plancherel: integral = ||Lambda^beta f||_2^2 >= (3/4 2^k)^(2 beta) ||f||_2^2
        lower = (0.75 ** (2.0 * beta)) * 2.0 ** (2.0 * beta * k) * norm_q**2
        passed = integral >= lower - 1e-10 * max(1.0, norm_q**2)
        return DiffusionBoundReport(k, q, beta, integral, norm_q, ratio, lower, passed)
    tol = 1e-10 * norm_q**q
    passed = integral >= -tol
    return DiffusionBoundReport(k, q, beta, integral, norm_q, ratio, None, passed)


# ---------------------------------------------------------------------------
# series summary
# ---------------------------------------------------------------------------


@dataclass
class QuantitySummary:
    name: str
    maximum: float
    argmax_t: float
    final: float
    finite: bool
    first_bad_t: float | None


@dataclass
class BoundednessSummary:
    quantities: list[QuantitySummary]

    @property
    def all_finite(self) -> bool:
        return all(q.finite for q in self.quantities)

    def lines(self) -> list[str]:
        out = [f"{'quantity':<28} {'max':>14} {'argmax t':>10} {'final':>14}  note"]
        for q in self.quantities:
            note = "" if q.finite else f"NON-FINITE from t={q.first_bad_t:g}"
            out.append(
                f"{q.name:<28} {q.maximum:>14.6g} {q.argmax_t:>10.4g} {q.final:>14.6g}  {note}"
            )
        return out


def boundedness_report(records: list[NormRecord], params: RangeParams) -> BoundednessSummary:
    """Per-quantity running maxima, argmax times and final cumulative values."""
    if not records:
        raise ValueError("empty record series")
    from .series import record_to_row, series_columns  # local import to avoid cycle

    cols = series_columns(params)
    rows = np.array([record_to_row(r, params) for r in records])
    t = rows[:, 0]
    out = []
    for i, name in enumerate(cols):
        if name == "t":
            continue
        vals = rows[:, i]
        finite = np.isfinite(vals)
        first_bad = None if finite.all() else float(t[int(np.argmin(finite))])
        with np.errstate(invalid="ignore"):
            arg = int(np.nanargmax(vals)) if finite.any() else 0
        out.append(
            QuantitySummary(
                name=name,
                maximum=float(vals[arg]),
                argmax_t=float(t[arg]),
                final=float(vals[-1]),
                finite=bool(finite.all()),
                first_bad_t=first_bad,
            )
        )
    return BoundednessSummary(out)
