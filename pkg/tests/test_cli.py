"""CLI: subcommands, exit codes, override precedence."""

import json
from pathlib import Path

import pytest

from qrlforge.cli import parse_and_dispatch
from qrlforge.metrics import MetricsSink, MetricRecord


def write_config(tmp_path, name="c.json", **extra):
    payload = {
        "run_name": "cli-trial",
        "algorithm": "reinforce",
        "agent_kind": "classical",
        "env_id": "cartpole",
        "seed": 2,
        "total_episodes": 2,
        "output_dir": str(tmp_path / "out"),
        "agent_params": {"hidden_layers": [8]},
    }
    payload.update(extra)
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


class TestTrainCommand:
    def test_success_exit_zero(self, tmp_path, capsys):
        path = write_config(tmp_path)
        assert parse_and_dispatch(["train", "--config", str(path)]) == 0
        out = capsys.readouterr().out
        assert "cli-trial/seed2" in out
        assert (tmp_path / "out" / "cli-trial" / "seed2" / "metrics.jsonl").exists()

    def test_seed_override(self, tmp_path):
        path = write_config(tmp_path)
        assert parse_and_dispatch(["train", "--config", str(path), "--seed", "9"]) == 0
        assert (tmp_path / "out" / "cli-trial" / "seed9").exists()

    def test_output_dir_flag_beats_env(self, tmp_path, monkeypatch):
        path = write_config(tmp_path)
        monkeypatch.setenv("QRLFORGE_OUTPUT_DIR", str(tmp_path / "from-env"))
        assert parse_and_dispatch(["train", "--config", str(path), "--output-dir", str(tmp_path / "from-flag")]) == 0
        assert (tmp_path / "from-flag" / "cli-trial").exists()
        assert not (tmp_path / "from-env").exists()

    def test_output_dir_env_fallback(self, tmp_path, monkeypatch):
        path = write_config(tmp_path)
        monkeypatch.setenv("QRLFORGE_OUTPUT_DIR", str(tmp_path / "from-env"))
        assert parse_and_dispatch(["train", "--config", str(path)]) == 0
        assert (tmp_path / "from-env" / "cli-trial").exists()

    def test_config_error_exit_one(self, tmp_path, capsys):
        path = write_config(tmp_path, env_id="atari")
        assert parse_and_dispatch(["train", "--config", str(path)]) == 1
        assert "config error" in capsys.readouterr().err

    def test_missing_file_exit_one(self, tmp_path):
        assert parse_and_dispatch(["train", "--config", str(tmp_path / "nope.json")]) == 1


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        assert parse_and_dispatch(["dance"]) == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag(self, capsys):
        assert parse_and_dispatch(["train", "--confg", "x.json"]) == 1

    def test_no_subcommand(self, capsys):
        assert parse_and_dispatch([]) == 1


class TestTuneCommand:
    def test_zero_parallel_exit_one(self, tmp_path, capsys):
        payload = {
            "run_name": "g",
            "algorithm": "reinforce",
            "agent_kind": "classical",
            "env_id": "cartpole",
            "total_episodes": 1,
            "output_dir": str(tmp_path / "o"),
            "grid": {"algorithm_params.lr": [0.1]},
        }
        path = tmp_path / "grid.json"
        path.write_text(json.dumps(payload))
        assert parse_and_dispatch(["tune", "--grid", str(path), "--max-parallel", "0"]) == 1

    def test_small_grid_runs(self, tmp_path, capsys):
        payload = {
            "run_name": "g",
            "algorithm": "reinforce",
            "agent_kind": "classical",
            "env_id": "cartpole",
            "total_episodes": 1,
            "output_dir": str(tmp_path / "o"),
            "agent_params": {"hidden_layers": [4]},
            "grid": {"algorithm_params.lr": [0.1, 0.01]},
        }
        path = tmp_path / "grid.json"
        path.write_text(json.dumps(payload))
        assert parse_and_dispatch(["tune", "--grid", str(path), "--max-parallel", "1"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("rank,run_name,config_hash")


class TestReportCommand:
    def test_csv_on_stdout(self, tmp_path, capsys):
        path = tmp_path / "m.jsonl"
        with MetricsSink(path) as sink:
            sink.log(
                MetricRecord(
                    episode=0,
                    global_step=12,
                    episodic_return=195.0,
                    length=12,
                    loss=None,
                    epsilon=None,
                    circuit_executions=0,
                    wall_time_s=0.1,
                )
            )
        code = parse_and_dispatch(["report", "--metrics", str(tmp_path / "**/*.jsonl"), "--threshold", "195"])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("metrics_path,")
        assert ",12," in out

    def test_malformed_metrics_exit_two(self, tmp_path):
        bad = tmp_path / "m.jsonl"
        bad.write_text("{broken\n")
        assert parse_and_dispatch(["report", "--metrics", str(bad)]) == 2
