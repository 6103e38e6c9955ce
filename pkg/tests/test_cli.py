import json
import subprocess
import sys

import pytest

from bacnoma import (
    ScenarioConfig,
    convergence_trace,
    minimize_delay,
    render_sweep_csv,
    render_trace_csv,
    sample_channels,
    solve_p3_instance,
    sweep_data_length,
)


def run_cli(*args, **kwargs):
    return subprocess.run(
        [sys.executable, "-m", "bacnoma.cli", *args],
        capture_output=True,
        text=True,
        timeout=600,
        **kwargs,
    )


@pytest.fixture(scope="module")
def finite_cfg_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "finite.cfg"
    path.write_text("energy_budget_joules = 1e9\n", encoding="utf-8")
    return str(path)


class TestSingle:
    def test_matches_library(self, finite_cfg_file):
        proc = run_cli("single", "--config", finite_cfg_file, "--seed", "11")
        assert proc.returncode == 0
        doc = json.loads(proc.stdout)
        cfg = ScenarioConfig(energy_budget_joules=1e9)
        sol = minimize_delay(sample_channels(cfg, 11), cfg)
        assert doc["scheme"] == sol.scheme
        assert doc["total_delay_s"] == sol.total_delay_s
        assert doc["rates"]["sum_rb_bps"] == sol.rates.sum_rb_bps
        assert "constraint_slacks" in doc

    def test_missing_config_exits_2(self):
        proc = run_cli("single", "--config", "/nonexistent/path.cfg")
        assert proc.returncode == 2
        assert "error:" in proc.stderr

    def test_unknown_key_exits_2(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("mystery_knob = 4\n", encoding="utf-8")
        proc = run_cli("single", "--config", str(bad))
        assert proc.returncode == 2

    def test_sentinel_exits_3(self, tmp_path):
        cfg = tmp_path / "sentinel.cfg"
        cfg.write_text("pa_max_watts = 0\n", encoding="utf-8")
        proc = run_cli("single", "--config", str(cfg), "--seed", "0")
        assert proc.returncode == 3
        assert json.loads(proc.stdout)["sentinel"] is True


class TestSweep:
    def test_single_step_single_row(self, finite_cfg_file):
        proc = run_cli(
            "sweep", "--config", finite_cfg_file, "--from", "5e5", "--to", "5e5",
            "--steps", "1", "--realizations", "4", "--seed", "2",
        )
        assert proc.returncode == 0
        lines = proc.stdout.splitlines()
        assert len(lines) == 2
        cfg = ScenarioConfig(energy_budget_joules=1e9)
        assert proc.stdout == render_sweep_csv(sweep_data_length(cfg, [5e5], 4, 2))

    def test_grid_matches_library(self, finite_cfg_file):
        proc = run_cli(
            "sweep", "--config", finite_cfg_file, "--from", "2e5", "--to", "1e6",
            "--steps", "3", "--realizations", "3", "--seed", "0",
        )
        cfg = ScenarioConfig(energy_budget_joules=1e9)
        assert proc.stdout == render_sweep_csv(sweep_data_length(cfg, [2e5, 6e5, 1e6], 3, 0))


class TestConvergence:
    def test_alpha_flag_overrides_config(self, finite_cfg_file):
        proc = run_cli(
            "convergence", "--config", finite_cfg_file, "--seed", "3",
            "--alpha", "1e-4",
        )
        cfg = ScenarioConfig(energy_budget_joules=1e9, si_residual_alpha=1e-4)
        assert proc.stdout == render_trace_csv(convergence_trace(cfg, 3))


class TestInstanceCommands:
    def test_dump_round_trips_and_is_stable(self, tmp_path, finite_cfg_file):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        for out in (out1, out2):
            proc = run_cli(
                "dump-instance", "--config", finite_cfg_file, "--seed", "4",
                "--iteration", "0", "--out", str(out),
            )
            assert proc.returncode == 0
        assert out1.read_bytes() == out2.read_bytes()
        instance = json.loads(out1.read_text())
        assert set(instance) == {
            "y", "mu", "sigma2", "alpha", "h_si_sq", "p0_max", "pa_max", "e_max",
            "gamma0_tilde", "h4", "h2", "w_qos", "h0_sq", "L_tilde", "t0", "B",
        }

    def test_solve_instance_matches_library(self, tmp_path, finite_cfg_file):
        instance_path = tmp_path / "inst.json"
        run_cli(
            "dump-instance", "--config", finite_cfg_file, "--seed", "4",
            "--iteration", "0", "--out", str(instance_path),
        )
        proc = run_cli("solve-instance", "--instance", str(instance_path))
        assert proc.returncode == 0
        result = json.loads(proc.stdout)
        expected = solve_p3_instance(json.loads(instance_path.read_text()))
        assert result["status"] == expected["status"]
        assert result["objective_bits"] == pytest.approx(expected["objective_bits"])

    def test_iteration_out_of_range_exits_2(self, tmp_path, finite_cfg_file):
        proc = run_cli(
            "dump-instance", "--config", finite_cfg_file, "--seed", "4",
            "--iteration", "9999", "--out", str(tmp_path / "x.json"),
        )
        assert proc.returncode == 2

    def test_missing_instance_file_exits_2(self):
        proc = run_cli("solve-instance", "--instance", "/nope.json")
        assert proc.returncode == 2
