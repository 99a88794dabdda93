"""Configuration, initial conditions, checkpoints, series files, CLI, resume."""

import json
import math
import warnings
from pathlib import Path

import numpy as np
import pytest

from mhd2b.checkpoint import (
    Checkpoint,
    CheckpointError,
    DigestMismatchError,
    load_checkpoint,
    save_checkpoint,
    verify_digest,
)
from mhd2b.cli import main
from mhd2b.config import (
    ConfigError,
    RunConfig,
    build_config,
    config_digest,
    config_to_text,
    load_config,
    parse_config_text,
)
from mhd2b.diagnostics import RangeParams
from mhd2b.ic import make_initial_condition
from mhd2b.runner import resume, run, sweep
from mhd2b.series import SeriesWriter, read_series, series_columns, truncate_series
from mhd2b.spectral import GridSpec, inverse


def small_config(tmp_path, **overrides) -> RunConfig:
    base = dict(
        n=32,
        beta=1.5,
        t_end=0.2,
        output_interval=0.02,
        checkpoint_interval=0.1,
        dt_max=0.005,
        ic="orszag_tang_like",
        q_list=[2.0],
        r_list=[2.0],
        output_dir=str(tmp_path / "run"),
    )
    base.update(overrides)
    return RunConfig(**base)


class TestConfig:
    def test_parse_and_build(self):
        text = """
        # comment
        n = 48
        beta = 1.25
        q_list = 2,4
        s_list =
        ic = random_band
        ic_seed = 7
        ic_kmax = 10
        determinism = true
        """
        cfg = build_config(parse_config_text(text))
        assert cfg.n == 48 and cfg.beta == 1.25
        assert cfg.q_list == [2.0, 4.0] and cfg.s_list == []
        assert cfg.ic == "random_band" and cfg.ic_seed == 7
        assert cfg.ic_params == {"kmax": 10.0}

    def test_snapshot_round_trips(self, tmp_path):
        cfg = small_config(tmp_path, ic="random_band", ic_params={"kmax": 9.0, "slope": 1.5})
        path = tmp_path / "config.txt"
        path.write_text(config_to_text(cfg))
        back = load_config(path)
        assert back == cfg

    def test_overrides_win(self, tmp_path):
        path = tmp_path / "c.txt"
        path.write_text("n = 32\nbeta = 1.5\n")
        cfg = load_config(path, {"beta": "1.75"})
        assert cfg.beta == 1.75

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown"):
            build_config({"viscosity": "0.1"})

    @pytest.mark.parametrize(
        "bad",
        [
            {"t_end": "-1"},
            {"output_interval": "0"},
            {"beta": "2.5"},
            {"beta": "0"},
            {"cfl_number": "1.5"},
            {"dt_max": "-0.1"},
            {"n": "banana"},
        ],
    )
    def test_invalid_values_rejected(self, bad):
        with pytest.raises(ConfigError):
            build_config(bad)

    def test_digest_ignores_locations_and_horizon(self, tmp_path):
        a = small_config(tmp_path)
        b = small_config(tmp_path, t_end=5.0, output_dir=str(tmp_path / "elsewhere"), ndjson=True)
        c = small_config(tmp_path, beta=1.25)
        assert config_digest(a) == config_digest(b)
        assert config_digest(a) != config_digest(c)


class TestInitialConditions:
    def test_zero(self):
        g = GridSpec(32)
        st = make_initial_condition("zero", {}, 0, g, 1.5)
        assert np.abs(st.omega_hat.coeffs).max() == 0.0
        assert np.abs(st.j_hat.coeffs).max() == 0.0

    def test_single_mode_b_current(self):
        g = GridSpec(64)
        st = make_initial_condition("single_mode_b", {}, 0, g, 1.5)
        _, x2 = g.nodes()
        j = inverse(st.j_hat)
        assert np.abs(j.values + np.cos(x2)).max() < 1e-13
        assert np.abs(st.omega_hat.coeffs).max() == 0.0

    def test_orszag_tang_like_fields(self):
        g = GridSpec(64)
        st = make_initial_condition("orszag_tang_like", {}, 0, g, 1.5)
        x1, x2 = g.nodes()
        w = inverse(st.omega_hat)
        j = inverse(st.j_hat)
        assert np.abs(w.values - 2.0 * (np.cos(x1) + np.cos(x2))).max() < 1e-12
        assert np.abs(j.values + 4.0 * np.cos(2 * x1) + np.cos(x2)).max() < 1e-12
        st.validate()

    def test_random_band_deterministic(self):
        g = GridSpec(64)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            a = make_initial_condition("random_band", {"kmax": 8.0}, 42, g, 1.1)
            b = make_initial_condition("random_band", {"kmax": 8.0}, 42, g, 1.1)
            c = make_initial_condition("random_band", {"kmax": 8.0}, 43, g, 1.1)
        assert np.array_equal(a.omega_hat.coeffs, b.omega_hat.coeffs)
        assert np.array_equal(a.j_hat.coeffs, b.j_hat.coeffs)
        assert not np.array_equal(a.omega_hat.coeffs, c.omega_hat.coeffs)
        a.validate()

    def test_random_band_normalization_and_band(self):
        from mhd2b.spectral import TORUS_AREA, _lattice

        g = GridSpec(64)
        st = make_initial_condition("random_band", {"kmax": 8.0, "amplitude": 2.5}, 1, g, 1.5)
        l2 = math.sqrt(TORUS_AREA * np.sum(np.abs(st.omega_hat.coeffs) ** 2))
        assert l2 == pytest.approx(2.5, rel=1e-12)
        absk = _lattice(64)[5]
        assert np.abs(st.omega_hat.coeffs[absk > 8.0]).max(initial=0.0) == 0.0

    def test_unknown_generator(self):
        g = GridSpec(32)
        with pytest.raises(ConfigError, match="unknown initial-condition"):
            make_initial_condition("vortex_soup", {}, 0, g, 1.5)

    def test_kmax_beyond_cutoff(self):
        g = GridSpec(32)  # cutoff is 32/3 ~ 10.7
        with pytest.raises(ConfigError, match="dealias cutoff"):
            make_initial_condition("random_band", {"kmax": 12.0}, 0, g, 1.5)

    def test_low_beta_warns(self):
        g = GridSpec(32)
        with pytest.warns(UserWarning, match="borderline"):
            make_initial_condition("zero", {}, 0, g, 0.8)


class TestCheckpoint:
    def test_round_trip_bitwise(self, tmp_path):
        rng = np.random.default_rng(0)
        n = 16
        w = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))).astype(complex)
        j = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))).astype(complex)
        cp = Checkpoint(n, 1.25, 0.75, 99, b"\x01" * 32, w, j)
        path = tmp_path / "state.bin"
        save_checkpoint(path, cp)
        back = load_checkpoint(path)
        assert back.n == n and back.beta == 1.25 and back.t == 0.75 and back.seed == 99
        assert back.config_digest == b"\x01" * 32
        assert np.array_equal(back.omega_hat, w)
        assert np.array_equal(back.j_hat, j)
        # saving the loaded checkpoint reproduces the file byte for byte
        path2 = tmp_path / "state2.bin"
        save_checkpoint(path2, back)
        assert path.read_bytes() == path2.read_bytes()

    def test_digest_verification(self, tmp_path):
        cp = Checkpoint(16, 1.5, 0.0, 0, b"\x02" * 32, np.zeros((16, 16), complex), np.zeros((16, 16), complex))
        with pytest.raises(DigestMismatchError):
            verify_digest(cp, b"\x03" * 32)
        verify_digest(cp, b"\x03" * 32, force=True)
        verify_digest(cp, b"\x02" * 32)

    def test_truncated_file_rejected(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"MHD2B01" + b"\x00" * 10)
        with pytest.raises(CheckpointError, match="truncated|expected"):
            load_checkpoint(path)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"NOTMAGIC" + b"\x00" * 100)
        with pytest.raises(CheckpointError, match="magic"):
            load_checkpoint(path)


class TestSeries:
    def test_row_count_and_bitwise_round_trip(self, tmp_path):
        cfg = small_config(tmp_path)
        res = run(cfg)
        params = RangeParams(cfg.beta, cfg.q_list, cfg.s_list, cfg.r_list)
        path = Path(cfg.output_dir) / "series.csv"
        records = read_series(path, params)
        assert len(records) == int(cfg.t_end / cfg.output_interval + 1e-9) + 1
        # rewrite parsed records: identical bytes
        writer = SeriesWriter(tmp_path / "copy.csv", params)
        writer.write_header()
        for rec in records:
            writer.append(rec)
        assert (tmp_path / "copy.csv").read_bytes() == path.read_bytes()

    def test_ndjson_mirror(self, tmp_path):
        cfg = small_config(tmp_path, ndjson=True)
        run(cfg)
        csv_lines = (Path(cfg.output_dir) / "series.csv").read_text().splitlines()
        nd_lines = (Path(cfg.output_dir) / "series.ndjson").read_text().splitlines()
        assert len(nd_lines) == len(csv_lines) - 1
        first = json.loads(nd_lines[0])
        assert first["t"] == 0.0
        assert set(first) == set(series_columns(RangeParams(cfg.beta, cfg.q_list, cfg.s_list, cfg.r_list)))

    def test_schema_mismatch_detected(self, tmp_path):
        cfg = small_config(tmp_path)
        run(cfg)
        other = RangeParams(cfg.beta, [2.0, 4.0], [], [2.0])
        with pytest.raises(ValueError, match="schema mismatch"):
            read_series(Path(cfg.output_dir) / "series.csv", other)

    def test_truncate_drops_later_rows(self, tmp_path):
        cfg = small_config(tmp_path)
        run(cfg)
        params = RangeParams(cfg.beta, cfg.q_list, cfg.s_list, cfg.r_list)
        path = Path(cfg.output_dir) / "series.csv"
        truncate_series(path, params, 0.1)
        records = read_series(path, params)
        assert records[-1].t <= 0.1 + 1e-12
        assert len(records) == 6


class TestRunAndResume:
    def test_zero_horizon_single_record(self, tmp_path):
        cfg = small_config(tmp_path, t_end=0.0)
        res = run(cfg)
        assert res.status == "completed"
        assert len(res.records) == 1
        assert res.records[0].t == 0.0
        assert (Path(cfg.output_dir) / "final.bin").exists()
        assert (Path(cfg.output_dir) / "checkpoint_0000.bin").exists()

    def test_split_and_resume_is_bitwise_identical(self, tmp_path):
        full_cfg = small_config(tmp_path, output_dir=str(tmp_path / "full"), t_end=0.2)
        split_cfg = small_config(tmp_path, output_dir=str(tmp_path / "split"), t_end=0.1)
        full = run(full_cfg)
        assert full.status == "completed"
        first = run(split_cfg)
        assert first.status == "completed"
        resumed = resume(Path(split_cfg.output_dir), t_end=0.2)
        assert resumed.status == "completed"
        full_series = (Path(full_cfg.output_dir) / "series.csv").read_bytes()
        split_series = (Path(split_cfg.output_dir) / "series.csv").read_bytes()
        assert full_series == split_series
        # final checkpoints agree bitwise
        a = (Path(full_cfg.output_dir) / "final.bin").read_bytes()
        b = (Path(split_cfg.output_dir) / "final.bin").read_bytes()
        assert a == b

    def test_resume_rejects_foreign_config(self, tmp_path):
        cfg = small_config(tmp_path)
        run(cfg)
        run_dir = Path(cfg.output_dir)
        text = (run_dir / "config.txt").read_text().replace("beta = 1.5", "beta = 1.25")
        (run_dir / "config.txt").write_text(text)
        with pytest.raises(DigestMismatchError):
            resume(run_dir)

    def test_abort_writes_failure_record_and_checkpoint(self, tmp_path):
        cfg = small_config(
            tmp_path,
            ic="single_mode_b",
            ic_params={"amplitude": 1e16},
            dt_max=1.0,
        )
        res = run(cfg)
        assert res.status == "aborted"
        assert res.failure["cause"] == "cfl"
        out = Path(cfg.output_dir)
        assert (out / "failure.json").exists()
        assert (out / "final.bin").exists()
        payload = json.loads((out / "failure.json").read_text())
        assert payload["cause"] == "cfl"

    def test_sweep_manifest(self, tmp_path):
        cfg = small_config(tmp_path, t_end=0.04, output_dir=str(tmp_path / "sw"))
        manifest = sweep(cfg, [1.2, 1.5, 2.0])
        data = json.loads(manifest.read_text())
        assert [r["beta"] for r in data["runs"]] == [1.2, 1.5, 2.0]
        for entry in data["runs"]:
            assert entry["status"] == "completed"
            assert (tmp_path / "sw" / entry["series"]).exists()

    def test_sweep_independent_of_concurrency(self, tmp_path):
        betas = [1.3, 1.8]
        seq = small_config(tmp_path, t_end=0.04, output_dir=str(tmp_path / "seq"))
        par = small_config(tmp_path, t_end=0.04, output_dir=str(tmp_path / "par"))
        sweep(seq, betas, workers=1)
        sweep(par, betas, workers=2)
        for beta in betas:
            a = (tmp_path / "seq" / f"beta_{beta:g}" / "series.csv").read_bytes()
            b = (tmp_path / "par" / f"beta_{beta:g}" / "series.csv").read_bytes()
            assert a == b

    def test_output_dir_env_default(self, tmp_path, monkeypatch):
        from mhd2b.config import ENV_OUTPUT_DIR

        monkeypatch.setenv(ENV_OUTPUT_DIR, str(tmp_path / "from_env"))
        cfg = small_config(tmp_path, output_dir=None)
        assert cfg.resolved_output_dir() == tmp_path / "from_env"


class TestCli:
    def test_run_zero_horizon(self, tmp_path, capsys):
        code = main(
            [
                "run",
                "--set", "n=32",
                "--set", "t_end=0",
                "--set", "q_list=2",
                "--set", "r_list=2",
                "--output-dir", str(tmp_path / "r"),
            ]
        )
        assert code == 0
        assert "1 records" in capsys.readouterr().out

    def test_check_ranges_admissible(self, capsys):
        code = main(["check-ranges", "--beta", "1.5", "--q", "4", "--s", "1.0", "--r", "8"])
        out = capsys.readouterr().out
        assert code == 0
        assert "ok" in out and "BAD" not in out

    def test_check_ranges_violation(self, capsys):
        code = main(["check-ranges", "--beta", "1.5", "--q", "8"])
        assert code == 4
        assert "BAD" in capsys.readouterr().out

    def test_check_lp(self, capsys):
        code = main(["check-lp", "--n", "32", "--fields", "5"])
        out = capsys.readouterr().out
        assert code == 0
        assert "partition-of-unity" in out

    def test_check_bernstein(self, capsys):
        code = main(["check-bernstein", "--n", "32", "--alpha", "0.75", "--fields", "10"])
        assert code == 0
        assert "within the dyadic envelope" in capsys.readouterr().out

    def test_report(self, tmp_path, capsys):
        cfg = small_config(tmp_path)
        run(cfg)
        code = main(["report", "--series", str(Path(cfg.output_dir) / "series.csv")])
        out = capsys.readouterr().out
        assert code == 0
        assert "linf_grad_j" in out

    def test_config_error_exit_code(self, tmp_path):
        code = main(["run", "--set", "beta=7", "--output-dir", str(tmp_path / "x")])
        assert code == 2

    def test_numerical_abort_exit_code(self, tmp_path):
        code = main(
            [
                "run",
                "--set", "n=32",
                "--set", "t_end=0.1",
                "--set", "ic=single_mode_b",
                "--set", "ic_amplitude=1e16",
                "--set", "dt_max=1.0",
                "--set", "q_list=2",
                "--set", "r_list=2",
                "--output-dir", str(tmp_path / "blow"),
            ]
        )
        assert code == 3

    def test_sweep_cli(self, tmp_path):
        code = main(
            [
                "sweep",
                "--betas", "1.3,1.8",
                "--set", "n=32",
                "--set", "t_end=0.02",
                "--set", "output_interval=0.01",
                "--set", "q_list=2",
                "--set", "r_list=2",
                "--output-dir", str(tmp_path / "sw"),
            ]
        )
        assert code == 0
        assert (tmp_path / "sw" / "manifest.json").exists()

    def test_resume_cli(self, tmp_path):
        out = str(tmp_path / "r")
        assert main(
            [
                "run",
                "--set", "n=32",
                "--set", "t_end=0.05",
                "--set", "output_interval=0.01",
                "--set", "checkpoint_interval=0.05",
                "--set", "q_list=2",
                "--set", "r_list=2",
                "--output-dir", out,
            ]
        ) == 0
        assert main(["resume", "--run-dir", out, "--t-end", "0.1"]) == 0
