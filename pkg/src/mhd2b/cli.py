"""Command-line interface.

Subcommands: run, resume, sweep, check-lp, check-bernstein, check-ranges,
report. Exit codes: 0 success, 2 configuration error, 3 numerical abort,
4 property-check violation, 5 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VIOLATION = 4
EXIT_IO = 5


def _add_config_args(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a configuration key (repeatable; wins over the file)",
    )
    p.add_argument("--n", type=int, help="grid points per side")
    p.add_argument("--beta", type=float, help="diffusion exponent")
    p.add_argument("--t-end", type=float, help="integration horizon")
    p.add_argument("--output-dir", help="run directory")


def _collect_overrides(args) -> dict[str, str]:
    overrides: dict[str, str] = {}
    for item in args.overrides:
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        key, val = item.split("=", 1)
        overrides[key.strip()] = val.strip()
    for key, attr in (("n", "n"), ("beta", "beta"), ("t_end", "t_end"), ("output_dir", "output_dir")):
        val = getattr(args, attr)
        if val is not None:
            overrides[key] = str(val)
    return overrides


def _cmd_run(args) -> int:
    from .config import load_config
    from .runner import run

    cfg = load_config(args.config, _collect_overrides(args))
    result = run(cfg)
    out = cfg.resolved_output_dir()
    if result.status == "aborted":
        print(f"run aborted: {result.failure['message']} (outputs in {out})", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"run completed: {len(result.records)} records in {out}")
    return EXIT_OK


def _cmd_resume(args) -> int:
    from .runner import resume

    result = resume(args.run_dir, args.checkpoint, args.t_end, args.force_digest)
    if result.status == "aborted":
        print(f"resume aborted: {result.failure['message']}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"resume completed: {len(result.records)} records in {args.run_dir}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    from .config import load_config
    from .runner import sweep

    cfg = load_config(args.config, _collect_overrides(args))
    betas = [float(b) for b in args.betas.split(",") if b.strip()]
    if not betas:
        raise ValueError("--betas must list at least one exponent")
    manifest = sweep(cfg, betas, workers=args.workers)
    print(f"sweep manifest: {manifest}")
    return EXIT_OK


def _cmd_check_ranges(args) -> int:
    from .diagnostics import validate_ranges

    report = validate_ranges(args.beta, args.q or (), args.s or (), args.r or ())
    for line in report.lines():
        print(line)
    return EXIT_OK if report.all_admissible else EXIT_VIOLATION


def _cmd_check_lp(args) -> int:
    from .lp import build_filter_bank, shell_decomposition
    from .spectral import GridSpec, RealField, _lattice, fft_inverse

    failures = []
    for n in args.n:
        grid = GridSpec(n)
        bank = build_filter_bank(grid)
        absk = _lattice(n)[5]
        covered = absk <= 0.75 * 2.0**bank.j_max
        unity = bank.psi_hat + sum(bank.phi_hat)
        deviation = float(np.abs(unity[covered] - 1.0).max())
        print(f"n={n}: j_max={bank.j_max}, partition-of-unity max deviation {deviation:.3e}")
        if deviation > 1e-12:
            failures.append(f"n={n}: partition deviation {deviation:.3e} > 1e-12")

        rng = np.random.default_rng(2024)
        worst = 0.0
        band = (absk > 0.0) & (absk <= n / 3.0)
        for _ in range(args.fields):
            coeffs = np.fft.fft2(rng.standard_normal((n, n))) / (n * n) * band
            f = RealField(fft_inverse(coeffs), grid)
            total = sum(b.values for b in shell_decomposition(f, bank).blocks)
            scale = np.abs(f.values).max()
            worst = max(worst, float(np.abs(total - f.values).max() / scale))
        print(f"n={n}: worst reconstruction error over {args.fields} fields {worst:.3e}")
        if worst > 1e-10:
            failures.append(f"n={n}: reconstruction error {worst:.3e} > 1e-10")
    for f in failures:
        print(f"VIOLATION: {f}", file=sys.stderr)
    return EXIT_VIOLATION if failures else EXIT_OK


def _cmd_check_bernstein(args) -> int:
    from .lp import bernstein_check, build_filter_bank, project_shell
    from .spectral import GridSpec, RealField

    grid = GridSpec(args.n)
    bank = build_filter_bank(grid)
    rng = np.random.default_rng(7)
    failures = []
    for alpha in args.alpha:
        for trial in range(args.fields):
            j = trial % (bank.j_max + 1)
            white = RealField(rng.standard_normal((args.n, args.n)), grid)
            f = project_shell(white, j, bank)
            rep = bernstein_check(f, alpha, 2.0, 2.0, j, bank)
            lo = 0.75 ** (2.0 * alpha)
            hi = (8.0 / 3.0) ** (2.0 * alpha)
            if not (lo - 1e-10 <= rep.lower_ratio <= hi + 1e-10):
                failures.append(
                    f"alpha={alpha} j={j} trial={trial}: ratio {rep.lower_ratio:.6g} "
                    f"outside [{lo:.6g}, {hi:.6g}]"
                )
        print(f"alpha={alpha}: {args.fields} shell fields within the dyadic envelope")
    for f in failures:
        print(f"VIOLATION: {f}", file=sys.stderr)
    return EXIT_VIOLATION if failures else EXIT_OK


def _cmd_report(args) -> int:
    from .config import load_config
    from .diagnostics import boundedness_report
    from .runner import _params_from_config
    from .series import read_series

    run_dir = args.series.parent
    cfg = load_config(run_dir / "config.txt")
    params = _params_from_config(cfg)
    records = read_series(args.series, params)
    summary = boundedness_report(records, params)
    for line in summary.lines():
        print(line)
    if not summary.all_finite:
        print("WARNING: non-finite entries present", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhd2b",
        description=(
            "Pseudospectral 2D incompressible MHD with fractional magnetic "
            "diffusion: runs, sweeps, and property checks"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate a configuration")
    _add_config_args(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("resume", help="continue a run from a checkpoint")
    p.add_argument("--run-dir", type=Path, required=True)
    p.add_argument("--checkpoint", type=Path, help="default: <run-dir>/final.bin")
    p.add_argument("--t-end", type=float, help="extend the horizon")
    p.add_argument("--force-digest", action="store_true", help="skip the config digest check")
    p.set_defaults(func=_cmd_resume)

    p = sub.add_parser("sweep", help="run a grid of diffusion exponents")
    _add_config_args(p)
    p.add_argument("--betas", required=True, help="comma-separated exponents")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("check-ranges", help="admissibility of diagnostic exponents")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--q", type=float, action="append")
    p.add_argument("--s", type=float, action="append")
    p.add_argument("--r", type=lambda v: math.inf if v == "inf" else float(v), action="append")
    p.set_defaults(func=_cmd_check_ranges)

    p = sub.add_parser("check-lp", help="partition-of-unity and reconstruction checks")
    p.add_argument("--n", type=int, action="append", default=None)
    p.add_argument("--fields", type=int, default=20)
    p.set_defaults(func=_cmd_check_lp)

    p = sub.add_parser("check-bernstein", help="dyadic derivative-envelope checks")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--alpha", type=float, action="append", default=None)
    p.add_argument("--fields", type=int, default=50)
    p.set_defaults(func=_cmd_check_bernstein)

    p = sub.add_parser("report", help="boundedness summary of a series file")
    p.add_argument("--series", type=Path, required=True)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    from .checkpoint import CheckpointError
    from .config import ConfigError
    from .solver import SolverAbort

    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "check-lp" and not args.n:
        args.n = [64]
    if getattr(args, "command", None) == "check-bernstein" and not args.alpha:
        args.alpha = [0.5, 1.0, 1.25]
    try:
        return args.func(args)
    except (ConfigError, ValueError) as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverAbort as err:
        print(f"numerical abort: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CheckpointError as err:
        print(f"checkpoint error: {err}", file=sys.stderr)
        return EXIT_IO
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
