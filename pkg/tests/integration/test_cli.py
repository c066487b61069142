"""Integration tests for the command-line interface."""

import json

import numpy as np
import pytest

from tests.fixtures.sample_mdps import EXAMPLE_MDP
from tropical_adp.cli import build_parser, main

pytestmark = [pytest.mark.integration, pytest.mark.usefixtures("restore_root_logger", "clean_env")]


def _last_error(capsys):
    """Parse the structured error report printed as the last stderr line."""
    lines = [line for line in capsys.readouterr().err.splitlines() if line.strip()]
    return json.loads(lines[-1])


@pytest.fixture
def mdp_file(tmp_path):
    path = tmp_path / "mdp.json"
    assert main(["gen", "--n", "6", "--d", "2", "--seed", "3", "--out", str(path)]) == 0
    return path


class TestGen:
    """Test the random MDP generator command."""

    def test_stdout(self, capsys):
        """Test that the MDP document goes to stdout by default."""
        assert main(["gen", "--n", "4", "--d", "3", "--alpha", "0.5", "--reward-range", "2", "5"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert (data["n"], data["d"], data["alpha"]) == (4, 3, 0.5)
        rewards = np.array(data["rewards"])
        assert rewards.min() >= 2 and rewards.max() <= 5

    def test_file_is_seeded(self, tmp_path):
        """Test that the same seed writes the same file."""
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        main(["gen", "--n", "5", "--d", "2", "--seed", "8", "--out", str(first)])
        main(["gen", "--n", "5", "--d", "2", "--seed", "8", "--out", str(second)])
        assert first.read_bytes() == second.read_bytes()


class TestSolve:
    """Test the exact solver command."""

    def test_writes_solution(self, mdp_file, tmp_path):
        """Test solution.json with agreeing VI and PI values."""
        out = tmp_path / "solved"
        assert main(["solve", str(mdp_file), "--out", str(out)]) == 0
        solution = json.loads((out / "solution.json").read_text())
        assert len(solution["J_star"]) == 6
        assert np.array(solution["Q_star"]).shape == (6, 2)
        assert solution["value_iteration_vs_policy_iteration"] <= 1e-7

    def test_example_to_stdout(self, tmp_path, capsys):
        """Test the two-state example: J* = 1 / (1 − 0.9) = 10."""
        path = tmp_path / "example.json"
        path.write_text(json.dumps(EXAMPLE_MDP), encoding="utf-8")
        assert main(["--log-level", "warning", "solve", str(path)]) == 0
        solution = json.loads(capsys.readouterr().out)
        np.testing.assert_allclose(solution["J_star"], [10.0, 10.0], atol=1e-8)

    def test_convergence_failure_exit_code(self, mdp_file, capsys):
        """Test exit code 3 when the iteration budget is too small."""
        assert main(["solve", str(mdp_file), "--max-iter", "1"]) == 3
        error = _last_error(capsys)
        assert error["error"] == "ConvergenceError"
        assert error["iterations"] == 1

    def test_invalid_mdp_exit_code(self, tmp_path, capsys):
        """Test exit code 2 for transition rows that do not sum to one."""
        broken = dict(EXAMPLE_MDP, transitions=[[[0.5, 0.4], [0.5, 0.5]]])
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(broken), encoding="utf-8")
        assert main(["solve", str(path)]) == 2
        error = _last_error(capsys)
        assert error["error"] == "InvalidArgumentError"
        assert "state=0" in error["message"]

    def test_unwritable_output_exit_code(self, mdp_file, tmp_path, capsys):
        """Test exit code 4 when the output directory sits below a regular file."""
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        assert main(["solve", str(mdp_file), "--out", str(blocker / "out")]) == 4
        assert _last_error(capsys)["error"] == "OutputError"

    def test_missing_file_exit_code(self, tmp_path):
        """Test that a missing MDP file is an I/O failure."""
        assert main(["solve", str(tmp_path / "absent.json")]) == 4


class TestApprox:
    """Test the AQI/VAQI command."""

    def test_outputs(self, mdp_file, tmp_path):
        """Test approx.json, its bounds and the feature CSV."""
        out = tmp_path / "approx"
        args = ["approx", str(mdp_file), "--features", "bins:3", "--inf", "sentinel:1000", "--w", "random:4:0.5"]
        assert main(args + ["--out", str(out)]) == 0
        payload = json.loads((out / "approx.json").read_text())
        assert payload["features"] == "bins:3"
        assert payload["infinity"] == "sentinel:1000"
        for name in ("aqi", "vaqi"):
            bound = payload[name]["bound"]
            assert bound["measured"] <= bound["bound"] + 1e-6
            assert len(payload[name]["policy"]) == 6
        assert payload["aqi"]["bound"]["beta"] == 0.0
        assert (out / "features.csv").read_text().count("\n") == 12

    def test_identity_w_matches_aqi(self, mdp_file, capsys):
        """Test that W = identity prints identical AQI and VAQI tables."""
        assert main(["--log-level", "error", "approx", str(mdp_file), "--w", "identity"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["vaqi"]["q_approx"] == payload["aqi"]["q_approx"]

    def test_feature_file(self, mdp_file, tmp_path, capsys):
        """Test custom features loaded from a file."""
        features = tmp_path / "phi.json"
        features.write_text(json.dumps([[0.0, "inf"]] * 6 + [["inf", 0.0]] * 6), encoding="utf-8")
        argv = ["--log-level", "error", "approx", str(mdp_file), "--features", f"file:{features}", "--w", "identity"]
        assert main(argv) == 0
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["aqi"]["weights"]) == 2

    def test_feature_row_mismatch(self, mdp_file, tmp_path, capsys):
        """Test that a feature file with the wrong row count fails with exit code 2."""
        features = tmp_path / "phi.json"
        features.write_text(json.dumps([[0.0]] * 5), encoding="utf-8")
        assert main(["approx", str(mdp_file), "--features", f"file:{features}"]) == 2
        assert _last_error(capsys)["error"] == "FeatureLoadError"


class TestExperiment:
    """Test the experiment command."""

    def test_run(self, tmp_path, capsys):
        """Test the written artifacts and the errors printed to stdout."""
        out = tmp_path / "results"
        argv = ["experiment", "--n", "10", "--d", "2", "--k", "3", "--seed", "5", "--out", str(out)]
        assert main(argv + ["--solvers", "exact,aqi,vaqi,api", "--inf", "sentinel:500", "--w", "random:5:0.5"]) == 0
        errors = json.loads(capsys.readouterr().out)
        assert set(errors) >= {"J_tilde_EP", "J_tilde_W", "J_u_EP", "J_u_W", "J_u_arbt", "J_u_API"}
        report = json.loads((out / "report.json").read_text())
        assert report["config"]["infinity"] == "sentinel:500"
        assert (out / "J_u_API.dat").exists()

    def test_config_file_with_override(self, tmp_path, capsys):
        """Test that command-line flags override the config file."""
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"n": 8, "d": 2, "k": 2, "seed": 1, "solvers": ["aqi"]}), encoding="utf-8")
        out = tmp_path / "results"
        assert main(["experiment", "--config", str(config), "--seed", "4", "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["config"]["seed"] == 4
        assert report["config"]["n"] == 8

    def test_invalid_config_value(self, tmp_path, capsys):
        """Test that out-of-range values exit with code 2."""
        assert main(["experiment", "--n", "5", "--alpha", "1.5", "--out", str(tmp_path)]) == 2
        assert _last_error(capsys)["error"] == "InvalidArgumentError"


class TestGlobalOptions:
    """Test parser-level behaviour and environment settings."""

    def test_unknown_solver_is_a_usage_error(self):
        """Test that argparse rejects unknown solver names."""
        with pytest.raises(SystemExit) as exc_info:
            main(["experiment", "--solvers", "exact,td"])
        assert exc_info.value.code == 2

    def test_bad_environment(self, clean_env, capsys):
        """Test that invalid settings in the environment exit with code 2."""
        clean_env.setenv("TROPICAL_ADP_LOG_FORMAT", "xml")
        assert main(["gen", "--n", "2", "--d", "1"]) == 2
        assert "log format" in _last_error(capsys)["message"]

    def test_json_logging(self, mdp_file, capsys):
        """Test that JSON log lines carry solver fields as keys."""
        assert main(["--log-format", "json", "solve", str(mdp_file)]) == 0
        records = [json.loads(line) for line in capsys.readouterr().err.splitlines() if line.startswith("{")]
        converged = [r for r in records if r.get("message") == "Fixed-point iteration converged"]
        assert converged and "iterations" in converged[0]

    def test_parser_requires_command(self):
        """Test that a subcommand is mandatory."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])
