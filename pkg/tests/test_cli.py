"""End-to-end command-line checks: validation, file emission, determinism.

Everything here drives ``uom_sim.cli.main`` with argv lists and inspects the
exit code, the emitted files, and captured stdout/stderr.  Heavy scenarios
are avoided; the cheap analytic ones exercise the full pipeline.
"""

import csv
import json
import os

import numpy as np
import pytest

from uom_sim.cli import _default_jobs, main


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
    return str(path)


@pytest.fixture
def shift_config(tmp_path):
    # small grid keeps the diagonalization sweep to a few points
    return _write(
        tmp_path,
        "shift.json",
        {
            "scenario": "freq_shift",
            "grids": {"xi_min": -0.5, "xi_max": 0.5, "n_xi": 5},
            "truncations": {"mech": 12},
            "output": {"path": "shift_small"},
        },
    )


@pytest.fixture
def gain_config(tmp_path):
    return _write(
        tmp_path,
        "gain.json",
        {
            "scenario": "mpa_gain",
            "grids": {"n_phi": 16, "simulate": False},
            "output": {"path": "gain_quick"},
        },
    )


class TestValidate:
    def test_ok(self, shift_config, capsys):
        assert main(["validate", shift_config]) == 0
        out = capsys.readouterr().out
        assert "ok: freq_shift" in out

    def test_unknown_scenario(self, tmp_path, capsys):
        path = _write(tmp_path, "bad.json", {"scenario": "warp_drive"})
        assert main(["validate", path]) == 2
        report = json.loads(capsys.readouterr().err)
        assert report["error"] == "config"
        assert any("warp_drive" in m for m in report["messages"])

    def test_unknown_key_is_named(self, tmp_path, capsys):
        path = _write(
            tmp_path,
            "bad.json",
            {"scenario": "freq_shift", "grids": {"n_xi": 5, "xi_step": 0.1}},
        )
        assert main(["validate", path]) == 2
        report = json.loads(capsys.readouterr().err)
        assert any("xi_step" in m and "unknown key" in m for m in report["messages"])

    def test_several_errors_reported_together(self, tmp_path, capsys):
        path = _write(
            tmp_path,
            "bad.json",
            {
                "scenario": "freq_shift",
                "params": {"omega_q": -1.0},
                "grids": {"n_xi": 0},
            },
        )
        assert main(["validate", path]) == 2
        report = json.loads(capsys.readouterr().err)
        assert len(report["messages"]) >= 2

    def test_missing_file(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "nope.json")]) == 2
        report = json.loads(capsys.readouterr().err)
        assert report["error"] == "config"

    def test_invalid_json(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        assert main(["validate", str(path)]) == 2
        report = json.loads(capsys.readouterr().err)
        assert any("invalid JSON" in m for m in report["messages"])

    def test_output_path_with_separator_rejected(self, tmp_path, capsys):
        path = _write(
            tmp_path,
            "bad.json",
            {"scenario": "freq_shift", "output": {"path": "sub/dir"}},
        )
        assert main(["validate", path]) == 2


class TestRun:
    def test_writes_csv_and_metadata(self, shift_config, tmp_path, capsys):
        out_dir = tmp_path / "out"
        assert main(["run", shift_config, "--out", str(out_dir)]) == 0
        printed = capsys.readouterr().out.splitlines()
        csv_path = out_dir / "shift_small.csv"
        meta_path = out_dir / "shift_small.meta.json"
        assert str(csv_path) in printed and str(meta_path) in printed
        assert csv_path.exists() and meta_path.exists()

        with open(csv_path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == [
            "xi [1]",
            "shift_analytic [Hz]",
            "shift_numeric [Hz]",
            "abs_deviation [Hz]",
        ]
        assert len(rows) == 1 + 5
        xi = [float(r[0]) for r in rows[1:]]
        assert xi == pytest.approx(np.linspace(-0.5, 0.5, 5).tolist())

    def test_metadata_round_trips_config_bytes(self, shift_config, tmp_path):
        out_dir = tmp_path / "out"
        assert main(["run", shift_config, "--out", str(out_dir)]) == 0
        meta = json.loads((out_dir / "shift_small.meta.json").read_text(encoding="utf-8"))
        original = open(shift_config, "rb").read()
        assert meta["config_text"].encode("utf-8") == original
        assert meta["scenario"] == "freq_shift"
        assert {c["name"] for c in meta["columns"]} >= {"xi", "shift_numeric"}
        assert meta["config"]["grids"]["n_xi"] == 5
        assert "wall_time_s" in meta

    def test_rerun_is_byte_identical(self, shift_config, tmp_path):
        dir_a, dir_b = tmp_path / "a", tmp_path / "b"
        assert main(["run", shift_config, "--out", str(dir_a)]) == 0
        assert main(["run", shift_config, "--out", str(dir_b)]) == 0
        bytes_a = (dir_a / "shift_small.csv").read_bytes()
        bytes_b = (dir_b / "shift_small.csv").read_bytes()
        assert bytes_a == bytes_b
        # metadata matches apart from the wall-clock entry
        meta_a = json.loads((dir_a / "shift_small.meta.json").read_text(encoding="utf-8"))
        meta_b = json.loads((dir_b / "shift_small.meta.json").read_text(encoding="utf-8"))
        meta_a.pop("wall_time_s")
        meta_b.pop("wall_time_s")
        assert meta_a == meta_b

    def test_crlf_line_endings(self, gain_config, tmp_path):
        out_dir = tmp_path / "out"
        assert main(["run", gain_config, "--out", str(out_dir)]) == 0
        raw = (out_dir / "gain_quick.csv").read_bytes()
        assert b"\r\n" in raw

    def test_svg_emission(self, gain_config, tmp_path, capsys):
        out_dir = tmp_path / "out"
        assert main(["run", gain_config, "--out", str(out_dir), "--svg"]) == 0
        svg_path = out_dir / "gain_quick.svg"
        assert str(svg_path) in capsys.readouterr().out
        head = svg_path.read_text(encoding="utf-8")[:200]
        assert "<svg" in head or "<?xml" in head

    def test_svg_is_deterministic(self, gain_config, tmp_path):
        dir_a, dir_b = tmp_path / "a", tmp_path / "b"
        assert main(["run", gain_config, "--out", str(dir_a), "--svg"]) == 0
        assert main(["run", gain_config, "--out", str(dir_b), "--svg"]) == 0
        assert (dir_a / "gain_quick.svg").read_bytes() == (dir_b / "gain_quick.svg").read_bytes()

    def test_jobs_zero_rejected(self, gain_config, capsys):
        assert main(["run", gain_config, "--jobs", "0"]) == 2
        report = json.loads(capsys.readouterr().err)
        assert any("--jobs" in m for m in report["messages"])

    def test_jobs_flag_parallel_matches_serial(self, gain_config, tmp_path):
        dir_a, dir_b = tmp_path / "a", tmp_path / "b"
        assert main(["run", gain_config, "--out", str(dir_a)]) == 0
        assert main(["run", gain_config, "--out", str(dir_b), "--jobs", "2"]) == 0
        assert (dir_a / "gain_quick.csv").read_bytes() == (dir_b / "gain_quick.csv").read_bytes()

    def test_solver_failure_maps_to_exit_one(self, tmp_path, capsys):
        # kappa = 0 with thermal occupation is caught by an internal
        # consistency check inside the scan, after config validation passes
        path = _write(
            tmp_path,
            "snr.json",
            {
                "scenario": "snr_scan",
                "params": {"kappa": 0.0},
                "grids": {"n_th_min": 0.01, "n_th_max": 0.1, "n_points": 3, "refine": False},
            },
        )
        assert main(["run", path, "--out", str(tmp_path / "out")]) == 1
        report = json.loads(capsys.readouterr().err)
        assert report["error"] == "InternalConsistencyError"
        assert report["scenario"] == "snr_scan"


class TestParams:
    def test_table_includes_couplings(self, shift_config, capsys):
        assert main(["params", shift_config]) == 0
        out = capsys.readouterr().out
        lines = {ln.split()[0]: ln.split()[1] for ln in out.splitlines() if ln.strip()}
        assert float(lines["G_0"]) == pytest.approx(1.2e6, rel=1e-9)
        assert float(lines["G_1"]) == pytest.approx(-32e3, rel=1e-9)
        assert float(lines["chi"]) == pytest.approx(1208391.6083916083, rel=1e-12)
        assert float(lines["pair_resonance"]) == pytest.approx(495160083.10088944, rel=1e-12)

    def test_drive_dependent_rows(self, tmp_path, capsys):
        path = _write(
            tmp_path,
            "report.json",
            {
                "scenario": "params_report",
                "drive": {"kind": "qubit_cosine", "Omega_d": 100e6},
            },
        )
        assert main(["params", path]) == 0
        out = capsys.readouterr().out
        lines = {ln.split()[0]: ln.split()[1] for ln in out.splitlines() if ln.strip()}
        assert float(lines["pump_alpha"]) == pytest.approx(40e3, rel=1e-9)
        assert float(lines["G_c_db"]) == pytest.approx(28.265, abs=5e-3)


class TestJobsEnvironment:
    def test_env_fallback(self, monkeypatch):
        monkeypatch.setenv("UOM_SIM_JOBS", "3")
        assert _default_jobs() == 3

    def test_env_garbage_falls_back_to_one(self, monkeypatch):
        monkeypatch.setenv("UOM_SIM_JOBS", "many")
        assert _default_jobs() == 1

    def test_env_absent(self, monkeypatch):
        monkeypatch.delenv("UOM_SIM_JOBS", raising=False)
        assert _default_jobs() == 1


class TestShippedConfigs:
    def test_all_shipped_configs_validate(self, capsys):
        root = os.path.join(os.path.dirname(__file__), "..", "configs")
        names = sorted(os.listdir(root))
        assert len(names) >= 8
        for name in names:
            assert main(["validate", os.path.join(root, name)]) == 0, name
        capsys.readouterr()
