"""Run orchestration: integrate, record, checkpoint, resume, sweep.

A run directory contains:

    config.txt        canonical snapshot of the resolved configuration
    ranges.txt        admissibility report for the diagnostic exponents
    series.csv        one NormRecord row per output time (plus t = 0)
    series.ndjson     optional NDJSON mirror
    checkpoint_XXXX.bin  periodic checkpoints (XXXX = multiple index)
    final.bin         state at t_end (or at the abort point)
    failure.json      present only when the run aborted

Output events are the multiples of output_interval up to t_end; the step size
is clamped so every event time is hit exactly, which also makes a split run
(checkpoint + resume) reproduce an uninterrupted run bitwise: both see the
same event times and the same state, hence the same step sequence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint, verify_digest
from .config import RunConfig, config_digest, config_to_text, load_config, with_overrides
from .diagnostics import NormRecord, RangeParams, record
from .ic import make_initial_condition
from .lp import DyadicFilterBank, build_filter_bank
from .series import SeriesWriter, read_series, series_columns, record_to_row, truncate_series
from .solver import EnergyAccumulator, FlowState, SolverAbort, StepControl, advance_to
from .spectral import GridSpec, SpectralField

_EVENT_TOL = 1e-9


@dataclass
class RunResult:
    records: list[NormRecord]
    checkpoint_path: Path
    status: str  # "completed" | "aborted"
    failure: dict | None = None


@dataclass
class _Event:
    t: float
    is_output: bool
    is_checkpoint: bool
    checkpoint_index: int = 0


def _schedule(t_end: float, out_dt: float, cp_dt: float) -> list[_Event]:
    n_out = int(t_end / out_dt + _EVENT_TOL)
    n_cp = int(t_end / cp_dt + _EVENT_TOL)
    events: list[_Event] = [_Event(i * out_dt, True, False) for i in range(1, n_out + 1)]
    for m in range(1, n_cp + 1):
        t_cp = m * cp_dt
        for ev in events:
            if abs(ev.t - t_cp) <= _EVENT_TOL * max(1.0, t_cp):
                ev.is_checkpoint = True
                ev.checkpoint_index = m
                break
        else:
            events.append(_Event(t_cp, False, True, m))
    events.sort(key=lambda ev: ev.t)
    if t_end > 0.0 and (not events or t_end - events[-1].t > _EVENT_TOL):
        events.append(_Event(t_end, False, False))
    return events


def _params_from_config(cfg: RunConfig) -> RangeParams:
    return RangeParams(cfg.beta, list(cfg.q_list), list(cfg.s_list), list(cfg.r_list))


def _grid_from_config(cfg: RunConfig) -> GridSpec:
    return GridSpec(cfg.n, cfg.dealias_fraction)


def _control_from_config(cfg: RunConfig) -> StepControl:
    return StepControl(
        cfl_number=cfg.cfl_number,
        dt_max=cfg.dt_max,
        nonlinear_enabled=cfg.nonlinear_enabled,
        diffusion_enabled=cfg.diffusion_enabled,
    )


def _save_state(path: Path, cfg: RunConfig, state: FlowState):
    save_checkpoint(
        path,
        Checkpoint(
            n=cfg.n,
            beta=cfg.beta,
            t=state.t,
            seed=cfg.ic_seed,
            config_digest=config_digest(cfg),
            omega_hat=state.omega_hat.coeffs,
            j_hat=state.j_hat.coeffs,
        ),
    )


def _integrate(
    cfg: RunConfig,
    state: FlowState,
    events: list[_Event],
    params: RangeParams,
    bank: DyadicFilterBank,
    writer: SeriesWriter,
    records: list[NormRecord],
    energy: EnergyAccumulator,
    out_dir: Path,
) -> RunResult:
    ctl = _control_from_config(cfg)
    prev = records[-1]
    final_path = out_dir / "final.bin"
    try:
        for ev in events:
            state, dt_used = advance_to(state, ctl, ev.t, energy)
            if ev.is_output:
                prev = record(
                    state,
                    params,
                    bank,
                    prev,
                    dt_used=dt_used,
                    int_l2_lambda_beta_b_sq=energy.value,
                )
                records.append(prev)
                writer.append(prev)
            if ev.is_checkpoint:
                _save_state(out_dir / f"checkpoint_{ev.checkpoint_index:04d}.bin", cfg, state)
    except SolverAbort as abort:
        _save_state(final_path, cfg, state)
        failure = {
            "cause": abort.cause,
            "t": abort.t,
            "max_u": abort.max_u,
            "message": str(abort),
        }
        (out_dir / "failure.json").write_text(json.dumps(failure, indent=2) + "\n")
        return RunResult(records, final_path, "aborted", failure)
    _save_state(final_path, cfg, state)
    return RunResult(records, final_path, "completed")


def run(cfg: RunConfig) -> RunResult:
    """Integrate cfg from t = 0 to t_end, writing the run directory."""
    out_dir = cfg.resolved_output_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.txt").write_text(config_to_text(cfg))

    params = _params_from_config(cfg)
    report = params.report()
    (out_dir / "ranges.txt").write_text("\n".join(report.lines()) + "\n")
    params.warn_inadmissible()

    grid = _grid_from_config(cfg)
    bank = build_filter_bank(grid)
    state = make_initial_condition(cfg.ic, cfg.ic_params, cfg.ic_seed, grid, cfg.beta)

    writer = SeriesWriter(
        out_dir / "series.csv",
        params,
        out_dir / "series.ndjson" if cfg.ndjson else None,
    )
    writer.write_header()
    energy = EnergyAccumulator(0.0)
    rec0 = record(state, params, bank, None, dt_used=0.0, int_l2_lambda_beta_b_sq=0.0)
    records = [rec0]
    writer.append(rec0)
    _save_state(out_dir / "checkpoint_0000.bin", cfg, state)

    events = _schedule(cfg.t_end, cfg.output_interval, cfg.checkpoint_interval)
    return _integrate(cfg, state, events, params, bank, writer, records, energy, out_dir)


def resume(
    run_dir: Path,
    checkpoint: Path | None = None,
    t_end: float | None = None,
    force_digest: bool = False,
) -> RunResult:
    """Continue a run directory from a checkpoint (default: final.bin).

    Under a fixed configuration the continuation reproduces an uninterrupted
    run bitwise: series rows past the checkpoint are regenerated identically.
    """
    run_dir = Path(run_dir)
    cfg = load_config(run_dir / "config.txt")
    if t_end is not None:
        cfg = with_overrides(cfg, t_end=t_end)
    cp_path = Path(checkpoint) if checkpoint else run_dir / "final.bin"
    cp = load_checkpoint(cp_path)
    verify_digest(cp, config_digest(cfg), force=force_digest)
    if cp.n != cfg.n:
        raise ValueError(f"checkpoint n={cp.n} does not match config n={cfg.n}")

    grid = _grid_from_config(cfg)
    bank = build_filter_bank(grid)
    params = _params_from_config(cfg)
    state = FlowState(
        SpectralField(cp.omega_hat, grid), SpectralField(cp.j_hat, grid), cp.t, cp.beta
    )

    truncate_series(run_dir / "series.csv", params, cp.t)
    records = read_series(run_dir / "series.csv", params)
    if not records:
        raise ValueError(f"series in {run_dir} has no rows at or before t={cp.t:g}")
    writer = SeriesWriter(
        run_dir / "series.csv",
        params,
        run_dir / "series.ndjson" if cfg.ndjson else None,
    )
    if cfg.ndjson:  # regenerate the mirror for the kept rows
        with writer.ndjson_path.open("w") as fh:
            for rec in records:
                fh.write(json.dumps(dict(zip(writer.columns, record_to_row(rec, params)))) + "\n")

    energy = EnergyAccumulator(records[-1].int_l2_lambda_beta_b_sq)
    events = [
        ev
        for ev in _schedule(cfg.t_end, cfg.output_interval, cfg.checkpoint_interval)
        if ev.t > cp.t + _EVENT_TOL
    ]
    return _integrate(cfg, state, events, params, bank, writer, records, energy, run_dir)


def sweep(cfg: RunConfig, betas: list[float], workers: int = 1) -> Path:
    """Run one configuration across a list of diffusion exponents.

    Each member writes an independent run directory under the sweep root;
    a manifest.json indexes them. Members share no mutable state, so results
    do not depend on execution order or concurrency level.
    """
    root = cfg.resolved_output_dir()
    root.mkdir(parents=True, exist_ok=True)
    members = []
    for beta in betas:
        sub = root / f"beta_{beta:g}"
        members.append((beta, with_overrides(cfg, beta=beta, output_dir=str(sub))))

    statuses: dict[float, str] = {}
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(run, member): beta for beta, member in members}
            for fut, beta in futures.items():
                statuses[beta] = fut.result().status
    else:
        for beta, member in members:
            statuses[beta] = run(member).status

    manifest = {
        "root": str(root),
        "runs": [
            {
                "beta": beta,
                "dir": f"beta_{beta:g}",
                "series": f"beta_{beta:g}/series.csv",
                "status": statuses[beta],
            }
            for beta, _ in members
        ],
        "columns": series_columns(_params_from_config(cfg)),
    }
    manifest_path = root / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest_path
