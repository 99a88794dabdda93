"""CSV / NDJSON serialization of NormRecord time series.

The CSV schema is one column per record field in a fixed order; list-valued
fields expand to suffixed columns (lq_j_q4, besov_j_s1.25_q2, ...). Floats are
written with repr(), which round-trips bitwise, so a parsed series feeds a
resumed run without perturbing cumulative integrals.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .diagnostics import NormRecord, RangeParams

SCALAR_HEAD = [
    "t",
    "dt_used",
    "l2_u",
    "l2_b",
    "l2_lambda_beta_b",
    "energy_residual",
    "l2_omega",
    "l2_j",
    "l2_lambda_beta_j",
]
SCALAR_MID = ["linf_omega", "linf_b", "linf_j", "linf_grad_j"]
SCALAR_TAIL = ["tail_weight", "int_l2_lambda_beta_b_sq", "int_l2_lambda_beta_j_sq"]


def fmt_exponent(x: float) -> str:
    if x == math.inf:
        return "inf"
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def series_columns(params: RangeParams) -> list[str]:
    cols = list(SCALAR_HEAD)
    cols += [f"lq_omega_q{fmt_exponent(q)}" for q in params.q_list]
    cols += [f"lq_j_q{fmt_exponent(q)}" for q in params.q_list]
    cols += [f"besov_j_s{fmt_exponent(s)}_q{fmt_exponent(q)}" for s, q in params.besov_pairs]
    cols += SCALAR_MID
    cols += [f"lr_grad_j_r{fmt_exponent(r)}" for r in params.r_list]
    cols += SCALAR_TAIL
    cols += [f"int_besov_j_s{fmt_exponent(s)}_q{fmt_exponent(q)}" for s, q in params.besov_pairs]
    cols += ["int_linf_grad_j"]
    cols += [f"int_lr_grad_j_r{fmt_exponent(r)}" for r in params.r_list]
    cols += ["int_linf_j"]
    return cols


def record_to_row(rec: NormRecord, params: RangeParams) -> list[float]:
    row = [
        rec.t,
        rec.dt_used,
        rec.l2_u,
        rec.l2_b,
        rec.l2_lambda_beta_b,
        rec.energy_residual,
        rec.l2_omega,
        rec.l2_j,
        rec.l2_lambda_beta_j,
    ]
    row += [rec.lq_omega[q] for q in params.q_list]
    row += [rec.lq_j[q] for q in params.q_list]
    row += [rec.besov_j[pair] for pair in params.besov_pairs]
    row += [rec.linf_omega, rec.linf_b, rec.linf_j, rec.linf_grad_j]
    row += [rec.lr_grad_j[r] for r in params.r_list]
    row += [rec.tail_weight, rec.int_l2_lambda_beta_b_sq, rec.int_l2_lambda_beta_j_sq]
    row += [rec.int_besov_j[pair] for pair in params.besov_pairs]
    row += [rec.int_linf_grad_j]
    row += [rec.int_lr_grad_j[r] for r in params.r_list]
    row += [rec.int_linf_j]
    return row


def row_to_record(row: list[float], params: RangeParams) -> NormRecord:
    it = iter(row)
    take = lambda: float(next(it))
    head = [take() for _ in SCALAR_HEAD]
    lq_omega = {q: take() for q in params.q_list}
    lq_j = {q: take() for q in params.q_list}
    besov = {pair: take() for pair in params.besov_pairs}
    mid = [take() for _ in SCALAR_MID]
    lr = {r: take() for r in params.r_list}
    tail_weight, int_b, int_j = take(), take(), take()
    int_besov = {pair: take() for pair in params.besov_pairs}
    int_gj_inf = take()
    int_gj_r = {r: take() for r in params.r_list}
    int_j_inf = take()
    return NormRecord(
        t=head[0],
        dt_used=head[1],
        l2_u=head[2],
        l2_b=head[3],
        l2_lambda_beta_b=head[4],
        energy_residual=head[5],
        l2_omega=head[6],
        l2_j=head[7],
        l2_lambda_beta_j=head[8],
        lq_omega=lq_omega,
        lq_j=lq_j,
        besov_j=besov,
        linf_omega=mid[0],
        linf_b=mid[1],
        linf_j=mid[2],
        linf_grad_j=mid[3],
        lr_grad_j=lr,
        tail_weight=tail_weight,
        int_l2_lambda_beta_b_sq=int_b,
        int_l2_lambda_beta_j_sq=int_j,
        int_besov_j=int_besov,
        int_linf_grad_j=int_gj_inf,
        int_lr_grad_j=int_gj_r,
        int_linf_j=int_j_inf,
    )


class SeriesWriter:
    """Appends rows to a CSV file (and an optional NDJSON mirror)."""

    def __init__(self, csv_path: Path, params: RangeParams, ndjson_path: Path | None = None):
        self.csv_path = Path(csv_path)
        self.params = params
        self.columns = series_columns(params)
        self.ndjson_path = Path(ndjson_path) if ndjson_path else None

    def write_header(self):
        self.csv_path.write_text(",".join(self.columns) + "\n")
        if self.ndjson_path:
            self.ndjson_path.write_text("")

    def append(self, rec: NormRecord):
        row = record_to_row(rec, self.params)
        with self.csv_path.open("a") as fh:
            fh.write(",".join(repr(v) for v in row) + "\n")
        if self.ndjson_path:
            obj = dict(zip(self.columns, row))
            with self.ndjson_path.open("a") as fh:
                fh.write(json.dumps(obj) + "\n")


def read_series(csv_path: Path, params: RangeParams) -> list[NormRecord]:
    """Parse a series CSV back into records (schema must match params)."""
    lines = Path(csv_path).read_text().splitlines()
    if not lines:
        raise ValueError(f"empty series file: {csv_path}")
    header = lines[0].split(",")
    expected = series_columns(params)
    if header != expected:
        raise ValueError(
            f"series schema mismatch in {csv_path}: got {header}, expected {expected}"
        )
    records = []
    for line in lines[1:]:
        if not line.strip():
            continue
        records.append(row_to_record([float(v) for v in line.split(",")], params))
    return records


def truncate_series(csv_path: Path, params: RangeParams, t_max: float):
    """Drop rows with t > t_max (used before resuming mid-series)."""
    lines = Path(csv_path).read_text().splitlines()
    kept = [lines[0]]
    for line in lines[1:]:
        if not line.strip():
            continue
        if float(line.split(",", 1)[0]) <= t_max + 1e-12:
            kept.append(line)
    Path(csv_path).write_text("\n".join(kept) + "\n")
