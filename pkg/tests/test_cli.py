"""CLI configuration, table emission, sweeps plumbing, exit codes."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regen_capacity.cli import (ANALYTIC_FIELDS, RunConfig, emit, main,
                                read_config_file, run_figure)
from regen_capacity.errors import ConfigError
from regen_capacity.ideal_regen import IdealChannelSpec
from regen_capacity.sweeps import (SweepRecord, ideal_sweep_records,
                                   power_matched_mb, ring_segment_matrix,
                                   sine_sweep_records)


class TestRunConfig:
    def test_defaults_valid(self):
        RunConfig(command="ideal-sweep").validate()

    @pytest.mark.parametrize("field,value", [
        ("command", "plot"),
        ("R", 0),
        ("R", 2.5),
        ("N", -1.0),
        ("n", 3),
        ("format", "yaml"),
        ("constellation", "hex"),
        ("M", 1),
        ("snr_points", 0),
        ("seed", -1),
        ("threads", 0),
        ("tol", 0.0),
        ("alpha", -0.5),
    ])
    def test_invalid_field_named_in_message(self, field, value):
        cfg = RunConfig(command="ideal-sweep")
        setattr(cfg, field, value)
        with pytest.raises(ConfigError, match=f"invalid {field}"):
            cfg.validate()

    def test_descending_snr_grid_rejected(self):
        cfg = RunConfig(command="ideal-sweep", snr_db_min=5.0, snr_db_max=-5.0)
        with pytest.raises(ConfigError, match="snr_db_min"):
            cfg.validate()

    def test_sine_needs_stability_index(self):
        with pytest.raises(ConfigError, match="invalid q"):
            RunConfig(command="sine-sweep").validate()
        RunConfig(command="sine-sweep", q=1.0).validate()
        RunConfig(command="sine-sweep", alpha=0.5, beta=2.0).validate()
        with pytest.raises(ConfigError, match="invalid q"):
            RunConfig(command="sine-sweep", q=1.5).validate()

    def test_rho_grid_is_linear_in_db(self):
        cfg = RunConfig(command="ideal-sweep", snr_db_min=0.0, snr_db_max=20.0,
                        snr_points=3)
        assert np.allclose(cfg.rho_grid(), [1.0, 10.0, 100.0])

    @given(st.sampled_from(["R", "n", "snr_points", "threads", "seed", "M"]),
           st.integers(-5, 0))
    @settings(max_examples=60, deadline=None)
    def test_nonpositive_integers_rejected(self, field, value):
        if field == "seed" and value == 0:
            return  # seed 0 is valid
        cfg = RunConfig(command="ideal-sweep")
        setattr(cfg, field, value)
        with pytest.raises(ConfigError):
            cfg.validate()


class TestConfigFile:
    def test_parse_and_types(self, tmp_path):
        f = tmp_path / "run.cfg"
        f.write_text("# sweep setup\nR = 12\nN = 0.5\nsnr-points = 7\n"
                     "constellation = ring   # trailing comment\n\n")
        vals = read_config_file(str(f))
        assert vals == {"R": 12, "N": 0.5, "snr_points": 7,
                        "constellation": "ring"}

    def test_unknown_key(self, tmp_path):
        f = tmp_path / "bad.cfg"
        f.write_text("gamma = 1\n")
        with pytest.raises(ConfigError, match="unknown key"):
            read_config_file(str(f))

    def test_malformed_line(self, tmp_path):
        f = tmp_path / "bad.cfg"
        f.write_text("just some words\n")
        with pytest.raises(ConfigError, match="key=value"):
            read_config_file(str(f))

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            read_config_file("/nonexistent/run.cfg")

    def test_flags_override_file(self, tmp_path, capsys):
        f = tmp_path / "run.cfg"
        f.write_text("R = 3\nsnr-points = 2\nsnr-db-min = 0\nsnr-db-max = 10\n")
        out = tmp_path / "a.csv"
        rc = main(["analytic", "--config", str(f), "--R", "2",
                   "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 3  # header + R=1,2 (flag overrides file's R=3)


class TestEmit:
    def test_empty_table_is_header_only(self, tmp_path):
        p = tmp_path / "t.csv"
        emit([], ("a", "b"), "csv", str(p))
        assert p.read_bytes() == b"a,b\n"

    def test_csv_formatting(self, tmp_path):
        p = tmp_path / "t.csv"
        emit([{"a": 1.0 / 3.0, "b": None, "c": 5}], ("a", "b", "c"),
             "csv", str(p))
        assert p.read_text() == "a,b,c\n0.333333333333,,5\n"

    def test_lf_line_endings(self, tmp_path):
        p = tmp_path / "t.csv"
        emit([{"a": 1.0}, {"a": 2.0}], ("a",), "csv", str(p))
        assert b"\r" not in p.read_bytes()

    def test_json_roundtrip_byte_identical(self, tmp_path):
        rows = [{"a": 0.1, "b": "x", "c": None}, {"a": 2.0, "b": "y", "c": 3}]
        p1, p2 = tmp_path / "1.json", tmp_path / "2.json"
        emit(rows, ("a", "b", "c"), "json", str(p1))
        emit(json.loads(p1.read_text()), ("a", "b", "c"), "json", str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_stdout_when_no_path(self, capsys):
        emit([{"a": 1.0}], ("a",), "csv", None)
        assert capsys.readouterr().out == "a\n1\n"


class TestSweepPlumbing:
    def test_ring_segment_matrix_is_circulant_stochastic(self):
        w = ring_segment_matrix(8, radius=2.0, variance=0.4)
        assert np.allclose(w.sum(axis=0), 1.0, atol=1e-8)
        for l in range(8):
            assert np.allclose(w[:, l], np.roll(w[:, 0], l), atol=1e-12)
        # dominant entry is the transmitted symbol
        assert np.all(np.argmax(w, axis=0) == np.arange(8))

    def test_power_matched_mb(self):
        pts = np.array([-3.0, -1.0, 1.0, 3.0])
        S = 3.0  # below uniform power 5 -> tilted
        p = power_matched_mb(pts, S)
        assert p.sum() == pytest.approx(1.0)
        assert float(p @ pts**2) == pytest.approx(S, rel=1e-9)
        # above uniform power -> uniform
        assert np.allclose(power_matched_mb(pts, 10.0), 0.25)

    def test_ideal_sweep_records_schema(self):
        spec = IdealChannelSpec(R=10, N=1.0, n=2)
        recs = ideal_sweep_records(np.array([1.0, 10.0]), spec, "binary")
        assert len(recs) == 2
        r = recs[0]
        assert r.error is None
        assert r.constellation == "binary"
        assert r.snr_db == pytest.approx(0.0)
        assert r.capacity_bits > 0
        assert r.analytic_low is not None
        assert recs[1].capacity_bits > r.capacity_bits

    def test_numeric_failure_becomes_error_record(self):
        from regen_capacity.sweeps import _map_points

        def one(rho):
            if rho > 1.5:
                raise ValueError("synthetic failure")
            return _record_like(rho)

        def _record_like(rho):
            from regen_capacity.sweeps import _record
            return _record(rho, 1.0, R=1, constellation="rect")

        recs = _map_points(one, np.array([1.0, 2.0, 4.0]), threads=1)
        assert len(recs) == 3
        assert recs[0].error is None and recs[0].capacity_bits == 1.0
        for r in recs[1:]:
            assert r.capacity_bits is None
            assert "synthetic failure" in r.error

    def test_threaded_sweep_matches_serial(self):
        spec = IdealChannelSpec(R=5, N=1.0, n=2)
        grid = np.array([0.5, 1.0, 2.0, 4.0])
        serial = ideal_sweep_records(grid, spec, "rect", M=4, threads=1)
        threaded = ideal_sweep_records(grid, spec, "rect", M=4, threads=2)
        for a, b in zip(serial, threaded):
            assert a == b


class TestMainExitCodes:
    def test_config_error_is_2(self, capsys):
        assert main(["ideal-sweep", "--R", "0"]) == 2
        assert "config error" in capsys.readouterr().err

    def test_io_error_is_4(self, capsys):
        assert main(["analytic", "--R", "2",
                     "--out", "/nonexistent/dir/x.csv"]) == 4
        assert "io error" in capsys.readouterr().err

    def test_figure_unknown_preset(self, capsys):
        assert main(["figure", "--name", "no-such-figure"]) == 2

    def test_analytic_success(self, tmp_path):
        out = tmp_path / "a.csv"
        assert main(["analytic", "--R", "3", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(ANALYTIC_FIELDS)
        assert len(lines) == 4
        # superstable sine gain column equals the ideal gain column
        for line in lines[1:]:
            cells = line.split(",")
            assert cells[-1] == cells[-3]

    def test_optimize_requires_snr_db(self, capsys):
        assert main(["optimize", "--R", "5"]) == 2

    def test_determinism_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["ideal-sweep", "--R", "5", "--constellation", "binary",
                "--snr-db-min", "0", "--snr-db-max", "10",
                "--snr-points", "4"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b), "--threads", "2"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_console_script_entry(self):
        r = subprocess.run([sys.executable, "-m", "regen_capacity.cli",
                            "analytic", "--R", "2"],
                           capture_output=True, text=True)
        assert r.returncode == 0
        assert r.stdout.startswith(",".join(ANALYTIC_FIELDS))


class TestFigurePresets:
    def test_invalid_name_raises(self):
        with pytest.raises(ConfigError):
            run_figure(RunConfig(command="figure", name="bogus"))

    def test_preset_rows_well_formed(self, tmp_path, capsys):
        out = tmp_path / "f.csv"
        rc = main(["figure", "--name", "sine-gain", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(SweepRecord.FIELDS)
        assert len(lines) == 12  # preset fixes an 11-point SNR grid
