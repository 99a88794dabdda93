"""Regenerate the boundedness regression fixture.

Runs the frozen low-exponent configuration and records the maxima/integrals
the acceptance suite compares against (5% tolerance). Rerun only when a
deliberate numerical change is supposed to shift these values, and commit the
updated JSON together with that change.

Usage: python3 scripts/gen_regression_fixture.py
"""

import json
import sys
import warnings
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from mhd2b.config import RunConfig  # noqa: E402
from mhd2b.runner import run  # noqa: E402

FIXTURE = REPO / "tests" / "data" / "regression_beta1p1.json"


def regression_config(output_dir: str) -> RunConfig:
    return RunConfig(
        n=128,
        beta=1.1,
        t_end=2.0,
        output_interval=0.02,
        checkpoint_interval=1.0,
        dt_max=0.01,
        ic="random_band",
        ic_seed=7,
        ic_params={"kmax": 8.0, "slope": 2.0, "amplitude": 3.0},
        q_list=[2.0, 4.0],
        s_list=[],
        r_list=[2.0],
        output_dir=output_dir,
    )


def extract(records) -> dict:
    return {
        "max_lq_omega_q2": max(r.lq_omega[2.0] for r in records),
        "max_lq_omega_q4": max(r.lq_omega[4.0] for r in records),
        "final_int_besov_j_s1.1_q2": records[-1].int_besov_j[(1.1, 2.0)],
        "final_int_linf_grad_j": records[-1].int_linf_grad_j,
    }


def main():
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            result = run(regression_config(tmp))
    if result.status != "completed":
        raise SystemExit(f"regression run did not complete: {result.failure}")
    values = extract(result.records)
    FIXTURE.write_text(json.dumps(values, indent=2, sort_keys=True) + "\n")
    print(f"wrote {FIXTURE}")
    for key, val in values.items():
        print(f"  {key} = {val!r}")


if __name__ == "__main__":
    main()
