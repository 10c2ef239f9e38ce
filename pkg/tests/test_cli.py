"""CLI surface: subcommands, formats, determinism, exit codes."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from chshlab.cli import main

TSIRELSON = 2.8284271247461903


def run(capsys, argv):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


class TestJm:
    def test_incompatible_above_threshold(self, capsys):
        rc, out, _ = run(capsys, ["jm", "--axes", "z,x", "--lambda", "0.8"])
        assert rc == 0
        doc = json.loads(out)
        assert doc["verdicts"][0]["status"] == "Incompatible"

    def test_parallel_axes_compatible(self, capsys):
        rc, out, _ = run(capsys, ["jm", "--axes", "z,z", "--lambda", "0.99"])
        assert rc == 0
        assert json.loads(out)["verdicts"][0]["status"] == "Compatible"

    def test_threshold(self, capsys):
        rc, out, _ = run(capsys, ["jm", "--axes", "z,x", "--threshold", "--precision", "15"])
        assert rc == 0
        doc = json.loads(out)
        assert doc["threshold"] == pytest.approx(1 / np.sqrt(2), abs=1e-6)

    def test_lambda_range_includes_threshold(self, capsys):
        rc, out, _ = run(capsys, ["jm", "--axes", "z,x", "--lambda", "0.5:1:6"])
        assert rc == 0
        doc = json.loads(out)
        assert len(doc["verdicts"]) == 6
        statuses = [v["status"] for v in doc["verdicts"]]
        assert statuses[0] == "Compatible"
        assert statuses[-1] == "Incompatible"
        assert doc["threshold"] == pytest.approx(0.707107, abs=1e-5)

    def test_feasibility_method(self, capsys):
        rc, out, _ = run(
            capsys, ["jm", "--axes", "z,x", "--lambda", "0.9", "--method", "feasibility"]
        )
        assert rc == 0
        doc = json.loads(out)
        assert doc["verdicts"][0]["status"] == "Incompatible"
        assert doc["verdicts"][0]["method"] == "Feasibility"

    def test_triple_axis_token(self, capsys):
        rc, out, _ = run(capsys, ["jm", "--axes", "z,1:0:1", "--threshold", "--precision", "12"])
        assert rc == 0
        # 45 degrees between axes: threshold = 2/(|a+b| + |a-b|)
        a = np.array([0, 0, 1.0])
        b = np.array([1.0, 0, 1.0]) / np.sqrt(2)
        expected = 2 / (np.linalg.norm(a + b) + np.linalg.norm(a - b))
        assert json.loads(out)["threshold"] == pytest.approx(expected, abs=1e-6)

    def test_malformed_axes(self, capsys):
        rc, _, err = run(capsys, ["jm", "--axes", "z", "--lambda", "0.5"])
        assert rc == 2
        assert json.loads(err)["code"] == "usage"


class TestChsh:
    def test_tsirelson(self, capsys):
        rc, out, _ = run(
            capsys,
            ["chsh", "--canonical", "pi/2,pi/2", "--state", "phi+", "--precision", "15"],
        )
        assert rc == 0
        doc = json.loads(out)
        assert doc["value"] == pytest.approx(TSIRELSON, abs=1e-9)
        assert doc["violates"] is True

    def test_noisy_boundary(self, capsys):
        rc, out, _ = run(capsys, ["chsh", "--noisy", "0.840896", "--max"])
        assert rc == 0
        doc = json.loads(out)
        assert doc["value"] == pytest.approx(2.0, abs=1e-5)
        assert doc["violates"] is False

    def test_commuting_canonical_max(self, capsys):
        rc, out, _ = run(capsys, ["chsh", "--canonical", "0,0", "--max", "--precision", "12"])
        assert rc == 0
        assert json.loads(out)["value"] == pytest.approx(2.0, abs=1e-9)

    def test_schmidt_state(self, capsys):
        rc, out, _ = run(
            capsys,
            ["chsh", "--canonical", "pi/2,pi/2", "--state", "schmidt:0.25", "--precision", "15"],
        )
        assert rc == 0
        # closed form at delta=1: (2-X) sqrt(2)
        x = 1 - 2 * np.sqrt(0.25 * 0.75)
        assert json.loads(out)["value"] == pytest.approx((2 - x) * np.sqrt(2), abs=1e-9)

    def test_state_file(self, capsys, tmp_path):
        rho = np.eye(4) / 4
        payload = {"rho": [[[float(c.real), float(c.imag)] for c in row] for row in rho]}
        path = tmp_path / "rho.json"
        path.write_text(json.dumps(payload))
        rc, out, _ = run(capsys, ["chsh", "--canonical", "pi/2,pi/2", "--state", str(path)])
        assert rc == 0
        assert json.loads(out)["value"] == pytest.approx(0.0, abs=1e-9)

    def test_invalid_state_file(self, capsys, tmp_path):
        rho = np.eye(4)  # trace 4
        payload = [[[float(c.real), float(c.imag)] for c in row] for row in rho]
        path = tmp_path / "rho.json"
        path.write_text(json.dumps(payload))
        rc, _, err = run(capsys, ["chsh", "--canonical", "pi/2,pi/2", "--state", str(path)])
        assert rc == 2
        assert json.loads(err)["code"] == "invalid_state"

    def test_degrees_rejected(self, capsys):
        rc, _, err = run(capsys, ["chsh", "--canonical", "90deg,90deg", "--max"])
        assert rc == 2
        assert json.loads(err)["code"] == "usage"

    def test_needs_state_or_max(self, capsys):
        rc, _, err = run(capsys, ["chsh", "--canonical", "0,0"])
        assert rc == 2


class TestRegion:
    def test_rows_and_flags(self, capsys):
        rc, out, _ = run(
            capsys,
            ["region", "--e-grid", "0.03:0.03:1", "--delta-grid", "0.1:1:2", "--precision", "12"],
        )
        assert rc == 0
        doc = json.loads(out)
        rows = doc["rows"]
        assert rows[0]["nonlocal"] is True  # (0.03, 0.1)
        assert rows[1]["nonlocal"] is False  # (0.03, 1.0)
        assert rows[0]["chsh_max"] == pytest.approx(2.031652424931163, abs=1e-9)
        assert rows[1]["chsh_max"] == pytest.approx(1.896707085645688, abs=1e-9)
        assert doc["entanglement_threshold"] == pytest.approx(0.04491013943777261, abs=1e-9)

    def test_maximal_cell(self, capsys):
        rc, out, _ = run(capsys, ["region", "--e-grid", "0.5:0.5:1", "--delta-grid", "1:1:1"])
        doc = json.loads(out)
        assert doc["rows"][0]["chsh_max"] == pytest.approx(2.82843, abs=1e-5)
        assert doc["rows"][0]["nonlocal"] is True

    def test_zero_delta_never_nonlocal(self, capsys):
        rc, out, _ = run(capsys, ["region", "--e-grid", "0:0.5:6", "--delta-grid", "0:0:1"])
        for row in json.loads(out)["rows"]:
            assert row["chsh_max"] == 2
            assert row["nonlocal"] is False

    def test_csv_schema(self, capsys):
        rc, out, _ = run(
            capsys,
            ["region", "--e-grid", "0:0.5:2", "--delta-grid", "0:1:3", "--format", "csv"],
        )
        assert rc == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("# entanglement_threshold = ")
        assert lines[1] == "E,delta,chsh_max,nonlocal"
        assert len(lines) == 2 + 2 * 3
        first = lines[2].split(",")
        assert first[3] in ("true", "false")

    def test_byte_determinism(self, capsys):
        argv = ["region", "--e-grid", "0:0.5:4", "--delta-grid", "0:1:4", "--format", "csv"]
        _, out1, _ = run(capsys, argv)
        _, out2, _ = run(capsys, argv)
        assert out1 == out2

    def test_malformed_grid(self, capsys):
        rc, _, err = run(capsys, ["region", "--e-grid", "0.5:0:3", "--delta-grid", "0:1:3"])
        assert rc == 2
        assert json.loads(err)["code"] == "usage"
        rc, _, _ = run(capsys, ["region", "--e-grid", "0:0.5:0", "--delta-grid", "0:1:3"])
        assert rc == 2
        rc, _, _ = run(capsys, ["region", "--e-grid", "0:0.9:3", "--delta-grid", "0:1:3"])
        assert rc == 2


class TestSample:
    ARGS = ["sample", "--canonical", "pi/2,pi/2", "--state", "phi+", "--shots", "20000"]

    def test_estimate_within_5_sigma(self, capsys):
        rc, out, _ = run(capsys, self.ARGS + ["--seed", "3", "--precision", "15"])
        assert rc == 0
        doc = json.loads(out)
        assert doc["exact"] == pytest.approx(TSIRELSON, abs=1e-9)
        assert abs(doc["estimate"] - doc["exact"]) <= 5 * doc["std_error"]
        assert doc["n_sigma"] <= 5

    def test_byte_determinism(self, capsys):
        _, out1, _ = run(capsys, self.ARGS + ["--seed", "3"])
        _, out2, _ = run(capsys, self.ARGS + ["--seed", "3"])
        assert out1 == out2

    def test_seed_changes_output(self, capsys):
        _, out1, _ = run(capsys, self.ARGS + ["--seed", "1"])
        _, out2, _ = run(capsys, self.ARGS + ["--seed", "2"])
        assert out1 != out2


class TestVerify:
    def test_list(self, capsys):
        rc, out, _ = run(capsys, ["verify", "--list"])
        assert rc == 0
        assert out.split() == ["f1", "jm", "landau"]
        rc, out, _ = run(capsys, ["verify", "--list", "--format", "json"])
        assert json.loads(out)["suites"] == ["f1", "jm", "landau"]

    def test_jm_suite_passes(self, capsys):
        rc, out, _ = run(capsys, ["verify", "jm", "--seed", "7", "--format", "json"])
        assert rc == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        assert {c["check"] for c in doc["checks"]} == {"analytic_vs_feasibility", "threshold_z_x"}

    def test_text_output_lines(self, capsys):
        rc, out, _ = run(capsys, ["verify", "jm", "--seed", "7"])
        assert rc == 0
        lines = out.strip().splitlines()
        assert all(line.startswith("PASS") for line in lines[:-1])
        assert lines[-1] == "OK"

    def test_landau_suite_passes(self, capsys):
        rc, out, _ = run(capsys, ["verify", "landau", "--format", "json"])
        assert rc == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        assert len(doc["checks"]) == 3

    def test_unknown_suite(self, capsys):
        rc, _, err = run(capsys, ["verify", "nope"])
        assert rc == 2
        assert json.loads(err)["code"] == "usage"

    def test_failing_check_exits_one(self, capsys, monkeypatch):
        from chshlab import cli as cli_mod

        monkeypatch.setitem(
            cli_mod._SUITES, "stub", lambda seed: [{"check": "broken", "max_dev": 1.0, "tol": 0.0}]
        )
        rc, out, _ = run(capsys, ["verify", "stub"])
        assert rc == 1
        assert out.strip().splitlines()[-1] == "FAILED"


class TestPlumbing:
    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "out.json"
        rc, out, _ = run(
            capsys, ["chsh", "--canonical", "0,0", "--max", "--output", str(path)]
        )
        assert rc == 0
        assert out == ""
        assert json.loads(path.read_text())["value"] == 2

    def test_config_file_defaults_and_override(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"e_grid": "0:0.5:2", "delta_grid": "0:1:2", "precision": 9}))
        rc, out, _ = run(capsys, ["region", "--config", str(cfg)])
        assert rc == 0
        assert len(json.loads(out)["rows"]) == 4
        # flag overrides config
        rc, out, _ = run(capsys, ["region", "--config", str(cfg), "--delta-grid", "0:1:3"])
        assert len(json.loads(out)["rows"]) == 6

    def test_config_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"no_such_flag": 1}))
        rc, _, err = run(capsys, ["region", "--config", str(cfg), "--e-grid", "0:0:1", "--delta-grid", "0:0:1"])
        assert rc == 2
        assert "no_such_flag" in json.loads(err)["message"]

    def test_precision_flag_width(self, capsys):
        _, out6, _ = run(capsys, ["chsh", "--canonical", "pi/2,pi/2", "--state", "phi+"])
        _, out15, _ = run(
            capsys,
            ["chsh", "--canonical", "pi/2,pi/2", "--state", "phi+", "--precision", "15"],
        )
        assert json.loads(out6)["value"] == 2.82843
        assert json.loads(out15)["value"] == pytest.approx(TSIRELSON, abs=1e-14)

    def test_precision_out_of_range(self, capsys):
        rc, _, _ = run(capsys, ["chsh", "--canonical", "0,0", "--max", "--precision", "16"])
        assert rc == 2

    def test_json_round_trip(self, capsys):
        _, out, _ = run(capsys, ["region", "--e-grid", "0:0.5:3", "--delta-grid", "0:1:3"])
        doc = json.loads(out)
        assert json.loads(json.dumps(doc)) == doc

    def test_module_entrypoint(self):
        env = dict(os.environ)
        root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
        env["PYTHONPATH"] = os.path.join(root, "src")
        proc = subprocess.run(
            [sys.executable, "-m", "chshlab.cli", "chsh", "--canonical", "0,0", "--max"],
            capture_output=True,
            text=True,
            env=env,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["value"] == 2
