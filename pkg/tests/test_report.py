import csv
import io
import json
import re

import pytest

from profilecast.config import Config, resolve_config
from profilecast.errors import ConfigError, ParameterError, PipelineError
from profilecast.report import RunReport, render_report, run_pipeline
from profilecast.validity import ALGORITHMS, METRICS


@pytest.fixture(scope="module")
def report(synthetic_csv):
    return run_pipeline(Config(input=str(synthetic_csv)))


def test_default_run_shape(report):
    assert report.dataset["n_records"] == 940 and report.dataset["n_users"] == 33
    assert set(report.modules) == {"original", "pca", "correlation"}
    assert all(info["k"] == 4 and len(info["cluster_sizes"]) == 4 for info in report.modules.values())
    assert report.modules["pca"]["profile_dim"] == 18
    assert report.robust_profile is not None
    assert len(report.validity_grid) == 18
    assert report.config["seed"] == 42


def test_json_round_trip(report):
    assert RunReport.from_json(render_report(report, "json")) == report


def test_markdown_table_layout(report):
    md = render_report(report, "markdown").decode()
    table = [ln for ln in md.splitlines() if ln.startswith("| Silhouette") or ln.startswith("| Davies") or ln.startswith("| Calinski")]
    assert len(table) == 3
    for line in table:
        cells = [c.strip() for c in line.strip("|").split("|")]
        assert len(cells) == 7
        assert all(re.fullmatch(r"-?\d+\.\d{5}", c) for c in cells[1:])
    assert "K-means Clustering: Original" in md and "Robust Clustering: Correlation" in md


def test_markdown_and_json_agree(report):
    md = render_report(report, "markdown").decode()
    rows = {ln.split("|")[1].strip(): [c.strip() for c in ln.strip("|").split("|")[1:]]
            for ln in md.splitlines() if ln.startswith("| ") and ln.split("|")[1].strip().endswith(("Score", "Index"))}
    grid = RunReport.from_json(render_report(report, "json")).grid
    labels = {"ss": "Silhouette Score", "dbi": "Davies Bouldin Index", "chi": "Calinski Harabasz Index"}
    for metric in METRICS:
        printed = rows[labels[metric]]
        expected = [f"{grid.value(a, m, metric):.5f}" for a in ALGORITHMS for m in ("original", "pca", "correlation")]
        assert printed == expected


def test_csv_one_cell_per_row(report):
    rows = list(csv.DictReader(io.StringIO(render_report(report, "csv").decode())))
    assert len(rows) == 18
    assert {r["metric"] for r in rows} == set(METRICS)
    assert float(rows[0]["value"]) == report.validity_grid[0]["value"]


def test_unknown_format(report):
    with pytest.raises(ParameterError):
        render_report(report, "xml")


def test_all_cells_errored_still_renders(report):
    broken = RunReport.from_dict({**report.to_dict(), "validity_grid": [
        {**c, "value": None, "error": "UndefinedMetricError: k too small"} for c in report.validity_grid]})
    md = render_report(broken, "markdown").decode()
    assert md.count("ERR") == 18


def test_byte_identical_reruns(synthetic_csv):
    cfg = Config(input=str(synthetic_csv), seed=9)
    assert render_report(run_pipeline(cfg)) == render_report(run_pipeline(cfg))


def test_config_echo_replays(report):
    replay = run_pipeline(Config.from_dict(report.config))
    assert render_report(replay) == render_report(report)


def test_single_module_skips_robust(synthetic_csv):
    r = run_pipeline(Config(input=str(synthetic_csv), modules=("original",)))
    assert r.robust_profile is None
    assert any("robust clustering skipped" in n for n in r.notices)
    assert r.grid.get("robust", "original", "ss").error == "robust clustering skipped"
    assert r.grid.value("kmeans", "original", "ss") is not None


def test_auto_k_records_elbow_curve(synthetic_csv):
    r = run_pipeline(Config(input=str(synthetic_csv), auto_k=True))
    for info in r.modules.values():
        assert info["elbow"]["ks"] == list(range(1, 11))
        assert info["k"] == info["elbow"]["k"]


def test_dumps(synthetic_csv, tmp_path):
    cfg = Config(input=str(synthetic_csv), dump_features=str(tmp_path / "f"), dump_profiles=str(tmp_path / "p"))
    run_pipeline(cfg)
    assert sorted(p.name for p in (tmp_path / "f").iterdir()) == [
        "features_correlation.csv", "features_original.csv", "features_pca.csv"]
    header = (tmp_path / "p" / "profiles_original.csv").read_text().splitlines()[0].split(",")
    assert header[:3] == ["Id", "n_records", "TotalSteps_max"] and len(header) == 68


def test_phase_errors_are_labelled(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("Id,ActivityDate\n")
    with pytest.raises(PipelineError, match=r"^\[ingest\] SchemaError"):
        run_pipeline(Config(input=str(bad)))


def test_k_larger_than_users_is_clustering_error(synthetic_csv):
    with pytest.raises(PipelineError, match=r"\[clustering:original\]"):
        run_pipeline(Config(input=str(synthetic_csv), k=40))


# --- configuration ---------------------------------------------------------

def test_config_precedence(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('seed = 5\ncorr-threshold = 0.8\nmodules = ["pca", "original"]\n[k]\npca = 3\n')
    cfg = resolve_config(path, env={})
    assert (cfg.seed, cfg.corr_threshold, cfg.modules) == (5, 0.8, ("original", "pca"))
    assert cfg.k_for("pca") == 3 and cfg.k_for("original") == 4
    assert resolve_config(path, env={"PROFILECAST_SEED": "77"}).seed == 77
    assert resolve_config(path, env={"PROFILECAST_SEED": "77"}, seed=1).seed == 1


def test_config_json_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"auto_k": True, "pca_components": 2}))
    cfg = resolve_config(path, env={})
    assert cfg.auto_k and cfg.pca_components == 2


@pytest.mark.parametrize("data", [{"bogus": 1}, {"corr_threshold": 0}, {"modules": ["nope"]}, {"k": 0}, {"format": "xml"}])
def test_config_validation(data):
    with pytest.raises(ConfigError):
        Config.from_dict(data)
