"""Command-line interface: JSON in, exit codes and CSV/JSON/SVG artifacts out."""

from __future__ import annotations

import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from ifpsync.cli import main

CUBIC_TF = {"num": [1.0], "den": [0.0, 3.0, 2.0, 1.0]}

INTEGRATOR_PAIR = {
    "adjacency": [[0.0, 1.0], [1.0, 0.0]],
    "agents": [
        {"type": "lti", "num": [1.0], "den": [0.0, 1.0], "x0": [1.0]},
        {"type": "lti", "num": [1.0], "den": [0.0, 1.0], "x0": [0.0]},
    ],
    "protocol": {"type": "plain"},
    "sim": {"dt": 0.001, "t_final": 10.0, "record_stride": 10},
}

DIVERGING_TRIO = {
    "adjacency": [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]],
    "agents": [
        {"type": "lti", "num": [1.0], "den": [0.0, 1.0, 1.0, 1.0], "x0": [0.5, 0.0, 0.0]},
        {"type": "lti", "num": [1.0], "den": [0.0, 1.0, 1.0, 1.0], "x0": [-0.3, 0.0, 0.0]},
        {"type": "lti", "num": [1.0], "den": [0.0, 1.0, 1.0, 1.0], "x0": [0.1, 0.0, 0.0]},
    ],
    "protocol": {"type": "plain"},
    "sim": {"dt": 0.005, "t_final": 150.0, "record_stride": 20},
}

HARMONIC_TINY = {
    "scenario_type": "harmonic", "omega1": 1.0, "omega2": 2.0, "k": 1.0,
    "sim": {"dt": 0.01, "t_final": 1.0, "record_stride": 10, "tol": 0.1},
}


def write_json(path: Path, payload) -> Path:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def run_cli(capsys, *argv: str) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


# ---------------------------------------------------------------------------
# ifp
# ---------------------------------------------------------------------------

class TestIfpCommand:
    def test_cubic_deficit(self, tmp_path, capsys):
        f = write_json(tmp_path / "tf.json", CUBIC_TF)
        code, out = run_cli(capsys, "ifp", str(f))
        assert code == 0
        report = json.loads(out)
        assert report["certifiable"] is True
        assert abs(report["alpha"] - 0.25) < 1e-6
        assert report["conditions"]["freq_condition_ok"] is True

    def test_integrator_is_passive(self, tmp_path, capsys):
        f = write_json(tmp_path / "tf.json", {"num": [1.0], "den": [0.0, 1.0]})
        code, out = run_cli(capsys, "ifp", str(f))
        assert code == 0
        assert json.loads(out)["alpha"] == 0.0

    def test_unstable_pole_exits_not_certifiable(self, tmp_path, capsys):
        f = write_json(tmp_path / "tf.json", {"num": [1.0], "den": [-1.0, 1.0]})
        code, out = run_cli(capsys, "ifp", str(f))
        assert code == 2
        assert json.loads(out)["certifiable"] is False

    def test_malformed_json_exits_input_error(self, tmp_path, capsys):
        f = tmp_path / "tf.json"
        f.write_text("{not json", encoding="utf-8")
        assert main(["ifp", str(f)]) == 1

    def test_missing_file_exits_input_error(self, tmp_path):
        assert main(["ifp", str(tmp_path / "absent.json")]) == 1


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------

class TestCertifyCommand:
    def test_weakly_coupled_pair_passes(self, tmp_path, capsys):
        f = write_json(tmp_path / "net.json",
                       {"adjacency": [[0, 1], [1, 0]], "alpha": [0.2, 0.2]})
        code, out = run_cli(capsys, "certify", str(f))
        assert code == 0
        report = json.loads(out)
        assert report["passes"] is True
        assert np.allclose(report["weak_coupling"]["slack"], [0.3, 0.3])

    def test_strong_coupling_fails_with_offenders_listed(self, tmp_path, capsys):
        f = write_json(tmp_path / "net.json",
                       {"adjacency": [[0, 3], [3, 0]], "alpha": [0.2, 0.2]})
        code, out = run_cli(capsys, "certify", str(f))
        assert code == 3
        report = json.loads(out)
        assert report["weak_coupling"]["offending"] == [0, 1]

    def test_deficits_derived_from_agent_models(self, tmp_path, capsys):
        f = write_json(tmp_path / "net.json", {
            "adjacency": [[0, 1], [1, 0]],
            "agents": [
                {"type": "lti", "num": [1.0], "den": [0.0, 3.0, 2.0, 1.0]},
                {"type": "vehicle", "tau": 0.1, "mu": 2.0},
            ],
        })
        code, out = run_cli(capsys, "certify", str(f))
        assert code == 0
        assert np.allclose(json.loads(out)["alpha"], [0.25, 0.25], atol=1e-6)

    def test_pinned_variant_uses_the_tightened_bound(self, tmp_path, capsys):
        f = write_json(tmp_path / "net.json", {
            "adjacency": [[0, 1], [1, 0]],
            "alpha": [0.2, 0.2],
            "b": [1.0, 0.0],
        })
        code, out = run_cli(capsys, "certify", str(f), "--reference")
        assert code == 3
        assert np.allclose(json.loads(out)["weak_coupling"]["slack"], [-0.1, 0.3])

    def test_platoon_gain_block_checked_alongside(self, tmp_path, capsys):
        f = write_json(tmp_path / "net.json", {
            "adjacency": [[0, 0.5, 0], [0.5, 0, 0.5], [0, 1.0, 0]],
            "alpha": [0.25, 0.25, 0.25],
            "b": [0.4, 0.0, 0.0],
            "gains": {"mu": [2.0, 2.0, 2.0], "eta": [0.4, 0.5, 1.0],
                      "nu": [0.5, 0.5], "tau": [0.1, 0.1, 0.1]},
        })
        code, out = run_cli(capsys, "certify", str(f), "--reference")
        assert code == 0
        report = json.loads(out)
        assert report["gains"]["passes"] is True
        assert report["passes"] is True

    def test_invalid_deficit_formula_exits_not_certifiable(self, tmp_path, capsys):
        f = write_json(tmp_path / "net.json", {
            "adjacency": [[0, 1], [1, 0]],
            "agents": [
                {"type": "vehicle", "tau": 0.3, "mu": 2.0},
                {"type": "vehicle", "tau": 0.1, "mu": 2.0},
            ],
        })
        assert main(["certify", str(f)]) == 2


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

class TestSimulateCommand:
    def test_writes_csv_and_metrics(self, tmp_path, capsys):
        f = write_json(tmp_path / "pair.json", INTEGRATOR_PAIR)
        code, out = run_cli(capsys, "simulate", str(f), "--output-dir", str(tmp_path))
        assert code == 0
        summary = json.loads(out)
        assert summary["metrics"]["synchronized"] is True
        csv_path = tmp_path / "pair.csv"
        lines = csv_path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "t,y_1,y_2,u_1,u_2"
        assert len(lines) - 1 == int(10.0 / (0.001 * 10)) + 1
        assert (tmp_path / "pair.metrics.json").exists()

    def test_repeated_runs_are_bitwise_identical(self, tmp_path, capsys):
        f = write_json(tmp_path / "pair.json", INTEGRATOR_PAIR)
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        assert main(["simulate", str(f), "--output-dir", str(tmp_path / "a")]) == 0
        assert main(["simulate", str(f), "--output-dir", str(tmp_path / "b")]) == 0
        capsys.readouterr()
        assert (tmp_path / "a" / "pair.csv").read_bytes() == \
               (tmp_path / "b" / "pair.csv").read_bytes()

    def test_existing_artifacts_guarded_without_force(self, tmp_path, capsys):
        f = write_json(tmp_path / "pair.json", INTEGRATOR_PAIR)
        assert main(["simulate", str(f), "--output-dir", str(tmp_path)]) == 0
        assert main(["simulate", str(f), "--output-dir", str(tmp_path)]) == 1
        assert main(["simulate", str(f), "--output-dir", str(tmp_path), "--force"]) == 0
        capsys.readouterr()

    def test_overrides_change_the_sampling(self, tmp_path, capsys):
        f = write_json(tmp_path / "pair.json", INTEGRATOR_PAIR)
        code, _ = run_cli(capsys, "simulate", str(f), "--output-dir", str(tmp_path),
                          "--dt", "0.002", "--t-final", "4.0")
        assert code == 0
        lines = (tmp_path / "pair.csv").read_text(encoding="utf-8").splitlines()
        assert len(lines) - 1 == int(4.0 / (0.002 * 10)) + 1

    def test_plot_writes_svg_polylines(self, tmp_path, capsys):
        f = write_json(tmp_path / "pair.json", INTEGRATOR_PAIR)
        code, _ = run_cli(capsys, "simulate", str(f), "--output-dir", str(tmp_path), "--plot")
        assert code == 0
        svg = (tmp_path / "pair.svg").read_text(encoding="utf-8")
        assert svg.count("<polyline") == 2
        assert "time [s]" in svg and "output" in svg

    def test_divergence_exits_4_with_partial_trajectory(self, tmp_path, capsys):
        f = write_json(tmp_path / "trio.json", DIVERGING_TRIO)
        code, out = run_cli(capsys, "simulate", str(f), "--output-dir", str(tmp_path))
        assert code == 4
        summary = json.loads(out)
        assert summary["metrics"]["diverged"] is True
        assert summary["metrics"]["t_diverged"] is not None
        lines = (tmp_path / "trio.csv").read_text(encoding="utf-8").splitlines()
        full = int(150.0 / (0.005 * 20)) + 1
        assert 1 < len(lines) - 1 < full

    def test_vector_outputs_flattened_with_dimension_suffix(self, tmp_path, capsys):
        net = {
            "adjacency": [[0.0, 0.5], [0.5, 0.0]],
            "agents": [
                {"type": "delayed_integrator", "delay": 0.0, "dim": 2, "x0": [1.0, -1.0]},
                {"type": "delayed_integrator", "delay": 0.0, "dim": 2, "x0": [0.0, 0.5]},
            ],
            "protocol": {"type": "plain"},
            "sim": {"dt": 0.01, "t_final": 1.0, "record_stride": 10},
        }
        f = write_json(tmp_path / "vec.json", net)
        code, _ = run_cli(capsys, "simulate", str(f), "--output-dir", str(tmp_path))
        assert code == 0
        header = (tmp_path / "vec.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header == "t,y_1_1,y_1_2,y_2_1,y_2_2,u_1_1,u_1_2,u_2_1,u_2_2"

    def test_output_dir_env_var_respected(self, tmp_path, capsys, monkeypatch):
        out_dir = tmp_path / "from_env"
        monkeypatch.setenv("IFPSYNC_OUTPUT_DIR", str(out_dir))
        f = write_json(tmp_path / "pair.json", INTEGRATOR_PAIR)
        code, _ = run_cli(capsys, "simulate", str(f))
        assert code == 0
        assert (out_dir / "pair.csv").exists()


# ---------------------------------------------------------------------------
# scenario
# ---------------------------------------------------------------------------

class TestScenarioCommand:
    def test_harmonic_report(self, tmp_path, capsys):
        f = write_json(tmp_path / "osc.json", HARMONIC_TINY)
        code, out = run_cli(capsys, "scenario", str(f), "--output-dir", str(tmp_path))
        assert code == 0
        report = json.loads(out)
        assert abs(report["amplitude_ratio"] - 2.0 / np.sqrt(13.0)) < 1e-9
        assert (tmp_path / "osc.report.json").exists()
        assert (tmp_path / "osc.csv").exists()

    def test_traffic_ring_report(self, tmp_path, capsys):
        scn = {
            "scenario_type": "traffic", "topology_preset": "bidirectional_ring",
            "n": 3, "K": 0.3, "delays": [0.2, 0.3, 0.4],
            "v_init": [10.0, 15.0, 20.0],
            "sim": {"dt": 0.002, "t_final": 60.0, "record_stride": 10},
        }
        f = write_json(tmp_path / "ring.json", scn)
        code, out = run_cli(capsys, "scenario", str(f), "--output-dir", str(tmp_path))
        assert code == 0
        report = json.loads(out)
        assert report["certificate"]["weak_coupling"]["passes"] is True
        assert report["synchronized"] is True

    def test_divergent_counterexample_exits_4(self, tmp_path, capsys):
        scn = {"scenario_type": "remark1", "p": 1.0, "q": 1.0, "n_agents": 3, "kappa": 1.0}
        f = write_json(tmp_path / "blow.json", scn)
        code, out = run_cli(capsys, "scenario", str(f), "--output-dir", str(tmp_path))
        assert code == 4
        report = json.loads(out)
        assert report["predicted"] is False and report["observed"] is False

    def test_sweep_runs_a_list_concurrently_with_indexed_names(self, tmp_path, capsys):
        f = write_json(tmp_path / "batch.json", [HARMONIC_TINY, HARMONIC_TINY])
        code, out = run_cli(capsys, "scenario", str(f), "--sweep",
                            "--output-dir", str(tmp_path))
        assert code == 0
        reports = json.loads(out)
        assert len(reports) == 2
        assert (tmp_path / "batch_000.csv").exists()
        assert (tmp_path / "batch_001.report.json").exists()

    def test_list_without_sweep_flag_rejected(self, tmp_path, capsys):
        f = write_json(tmp_path / "batch.json", [HARMONIC_TINY])
        assert main(["scenario", str(f), "--output-dir", str(tmp_path)]) == 1


# ---------------------------------------------------------------------------
# selftest / parser behavior
# ---------------------------------------------------------------------------

class TestSelftestAndParser:
    def test_selftest_passes_and_reports_three_suites(self, capsys):
        code, out = run_cli(capsys, "selftest", "--seed", "7", "--trials", "10")
        assert code == 0
        lines = [ln for ln in out.splitlines() if ln.startswith("selftest ")]
        assert len(lines) == 3
        assert all("PASS" in ln for ln in lines)

    def test_unknown_subcommand_exits_input_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 1

    def test_console_entry_point_runs_in_a_subprocess(self, tmp_path):
        exe = shutil.which("ifp-syncnet")
        f = write_json(tmp_path / "tf.json", CUBIC_TF)
        cmd = [exe, "ifp", str(f)] if exe else [sys.executable, "-m", "ifpsync", "ifp", str(f)]
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0
        assert abs(json.loads(proc.stdout)["alpha"] - 0.25) < 1e-6
