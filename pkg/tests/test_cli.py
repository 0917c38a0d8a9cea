import json

import pytest

from profilecast.cli import main
from profilecast.synthetic import write_daily_activity_csv


def test_run_json_stdout(synthetic_csv, capsysbinary):
    assert main(["run", "--input", str(synthetic_csv)]) == 0
    report = json.loads(capsysbinary.readouterr().out)
    assert report["dataset"]["n_users"] == 33
    assert len(report["validity_grid"]) == 18


def test_run_markdown_to_file(synthetic_csv, tmp_path):
    out = tmp_path / "report.md"
    assert main(["run", "--input", str(synthetic_csv), "--format", "markdown", "--output", str(out), "--k", "3"]) == 0
    text = out.read_text()
    assert "| Silhouette Score |" in text


def test_seed_flag_beats_env(synthetic_csv, tmp_path, monkeypatch, capsysbinary):
    monkeypatch.setenv("PROFILECAST_SEED", "123")
    assert main(["run", "--input", str(synthetic_csv)]) == 0
    assert json.loads(capsysbinary.readouterr().out)["config"]["seed"] == 123
    assert main(["run", "--input", str(synthetic_csv), "--seed", "8"]) == 0
    assert json.loads(capsysbinary.readouterr().out)["config"]["seed"] == 8


def test_flags_reach_config(synthetic_csv, capsysbinary):
    args = ["run", "--input", str(synthetic_csv), "--corr-threshold", "0.8", "--pca-components", "2",
            "--no-standardize", "--modules", "original,pca", "--drop-bad-rows"]
    assert main(args) == 0
    cfg = json.loads(capsysbinary.readouterr().out)["config"]
    assert cfg["corr_threshold"] == 0.8 and cfg["pca_components"] == 2
    assert cfg["standardize"] is False and cfg["modules"] == ["original", "pca"] and cfg["drop_bad_rows"] is True


def test_exit_code_input_error(tmp_path):
    assert main(["run", "--input", str(tmp_path / "missing.csv")]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("Id,ActivityDate\n")
    assert main(["run", "--input", str(bad)]) == 2


def test_exit_code_config_error(synthetic_csv, tmp_path):
    assert main(["run", "--input", str(synthetic_csv), "--corr-threshold", "2"]) == 3
    assert main(["run"]) == 3
    cfg = tmp_path / "c.toml"
    cfg.write_text("unknown_key = 1\n")
    assert main(["run", "--input", str(synthetic_csv), "--config", str(cfg)]) == 3


def test_exit_code_numeric_failure(tmp_path):
    path = tmp_path / "one.csv"
    write_daily_activity_csv(path, n_users=1, days_per_user=(1,))
    assert main(["run", "--input", str(path), "--modules", "pca", "--k", "1"]) == 4


def test_k_above_user_count(tmp_path):
    path = tmp_path / "tiny.csv"
    write_daily_activity_csv(path, n_users=2, days_per_user=(3, 3))
    assert main(["run", "--input", str(path)]) == 3  # k > users is a parameter problem
    assert main(["run", "--input", str(path), "--k", "2", "--modules", "original"]) == 0


def test_k_and_auto_k_are_exclusive(synthetic_csv):
    with pytest.raises(SystemExit):
        main(["run", "--input", str(synthetic_csv), "--k", "3", "--auto-k"])
