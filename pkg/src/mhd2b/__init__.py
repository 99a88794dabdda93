"""Pseudospectral 2D incompressible MHD with fractional magnetic diffusion.

Subpackages map onto the project's functional areas:

    spectral     grid, transforms, Fourier-multiplier operators, quadrature norms
    lp           dyadic filter bank, block projections, Besov norms, Bernstein checks
    solver       vorticity-current tendencies and the integrating-factor RK4 stepper
    diagnostics  norm records, admissible exponent ranges, inequality spot checks
    ic           initial-condition generators
    config/series/checkpoint/runner/cli
                 run configuration, CSV/NDJSON series, binary checkpoints,
                 orchestration and the command-line front end
"""

from .config import ConfigError, RunConfig, load_config
from .diagnostics import (
    NormRecord,
    RangeParams,
    boundedness_report,
    diffusion_lower_bound_check,
    record,
    sobolev_ratio_checks,
    validate_ranges,
)
from .ic import make_initial_condition
from .lp import (
    DyadicFilterBank,
    ShellDecomposition,
    bernstein_check,
    besov_norm,
    build_filter_bank,
    partial_sum,
    project_shell,
    shell_decomposition,
)
from .runner import RunResult, resume, run, sweep
from .solver import FlowState, SolverAbort, StepControl, cfl_dt, compute_rhs, step
from .spectral import (
    GridSpec,
    MeanModeError,
    RealField,
    SpectralField,
    biot_savart,
    dealias,
    forward,
    fractional_laplacian,
    inverse,
    lambda_power,
    lq_norm,
    partial_derivative,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DyadicFilterBank",
    "FlowState",
    "GridSpec",
    "MeanModeError",
    "NormRecord",
    "RangeParams",
    "RealField",
    "RunConfig",
    "RunResult",
    "ShellDecomposition",
    "SolverAbort",
    "SpectralField",
    "StepControl",
    "bernstein_check",
    "besov_norm",
    "biot_savart",
    "boundedness_report",
    "build_filter_bank",
    "cfl_dt",
    "compute_rhs",
    "dealias",
    "diffusion_lower_bound_check",
    "forward",
    "fractional_laplacian",
    "inverse",
    "lambda_power",
    "load_config",
    "lq_norm",
    "make_initial_condition",
    "partial_derivative",
    "partial_sum",
    "project_shell",
    "record",
    "resume",
    "run",
    "shell_decomposition",
    "sobolev_ratio_checks",
    "step",
    "sweep",
    "validate_ranges",
]
