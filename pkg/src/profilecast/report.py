"""End-to-end pipeline orchestration and report rendering."""

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .clustering import elbow_select_k, intersect_partitions, kmeans_fit
from .config import FORMATS, Config
from .errors import IngestError, ParameterError, PipelineError, ProfilecastError
from .features import ALL_MODULES, FeatureModule, select_features
from .fusion import fuse_user_records
from .ingest import dataset_summary, drop_duplicate_features, parse_csv
from .validity import ALGORITHM_LABELS, ALGORITHMS, METRIC_LABELS, METRICS, ValidityReport, score_all

logger = logging.getLogger(__name__)


@dataclass
class RunReport:
    """Everything a run produced, as plain JSON-compatible data."""

    config: dict
    dataset: dict
    modules: dict
    robust_profile: object  # list of {cluster_id, signature, members} or None
    validity_grid: list
    notices: list
    versions: dict

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        return cls(**data)

    @classmethod
    def from_json(cls, text) -> "RunReport":
        return cls.from_dict(json.loads(text))

    @property
    def grid(self) -> ValidityReport:
        return ValidityReport.from_list(self.validity_grid)


class _Phase:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        logger.debug("phase %s", self.name)
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, (ProfilecastError, OSError)) and not isinstance(exc, PipelineError):
            raise PipelineError(self.name, exc) from exc
        return False


def _plain(obj):
    """Round-trip through JSON so the report holds only lists/dicts/str/float/int."""
    return json.loads(json.dumps(obj))


def run_pipeline(config: Config) -> RunReport:
    """ingest -> clean -> feature modules -> fusion -> k-means -> intersection -> validity."""
    if config.input is None:
        raise PipelineError("config", ParameterError("no input CSV given"))
    notices = []

    with _Phase("ingest"):
        raw = parse_csv(config.input, drop_bad_rows=config.drop_bad_rows)
        ds = drop_duplicate_features(raw)
        summary = dataset_summary(ds)
        if len(ds) == 0:
            raise IngestError(f"{config.input}: no records")

    modules = [FeatureModule.parse(m) for m in config.modules]
    feature_mats, profiles, partitions, per_module = {}, {}, {}, {}

    for module in modules:
        with _Phase(f"features:{module.value}"):
            fm = select_features(ds, module, n_components=config.pca_components,
                                 threshold=config.corr_threshold, standardize=config.standardize)
            feature_mats[module] = fm
            if config.dump_features:
                out = Path(config.dump_features)
                out.mkdir(parents=True, exist_ok=True)
                fm.write_csv(out / f"features_{module.value}.csv")

        with _Phase(f"fusion:{module.value}"):
            pm = fuse_user_records(fm, standardize=config.standardize)
            profiles[module] = pm
            if config.dump_profiles:
                out = Path(config.dump_profiles)
                out.mkdir(parents=True, exist_ok=True)
                pm.write_csv(out / f"profiles_{module.value}.csv")

        with _Phase(f"clustering:{module.value}"):
            kw = dict(max_iter=config.max_iter, tol=config.tol, n_init=config.n_init)
            elbow = None
            if config.auto_k:
                k_max = min(config.k_max, len(pm))
                if k_max < config.k_max:
                    notices.append(f"{module.value}: elbow range capped at k={k_max} ({len(pm)} users)")
                elbow = elbow_select_k(pm, (config.k_min, k_max), seed=config.seed, **kw)
                k = elbow.k
            else:
                k = config.k_for(module)
            model = kmeans_fit(pm, k, seed=config.seed, **kw)
            partitions[module] = model.partition

        per_module[module.value] = {
            "features": list(fm.feature_names),
            "dropped_features": list(fm.dropped),
            "triggering_pairs": [list(p) for p in fm.triggering_pairs],
            "explained_variance_ratio": None if fm.explained_variance_ratio is None else fm.explained_variance_ratio.tolist(),
            "n_users": len(pm),
            "profile_dim": pm.values.shape[1],
            "fusion_warnings": list(pm.warnings),
            "elbow": None if elbow is None else {"ks": list(elbow.ks), "inertias": list(elbow.inertias), "k": elbow.k},
            "k": k,
            "inertia": model.inertia,
            "iterations": model.iterations,
            "converged": model.converged,
            "best_restart": model.restart,
            "cluster_sizes": model.partition.sizes(),
            "clusters": [list(m) for m in model.partition.members()],
        }

    robust = None
    if set(modules) == set(ALL_MODULES):
        with _Phase("robust"):
            robust = intersect_partitions(*(partitions[m] for m in ALL_MODULES))
    else:
        notices.append("robust clustering skipped: it needs all three feature modules (original, pca, correlation)")

    with _Phase("validity"):
        grid = score_all(profiles, partitions, robust)

    report = RunReport(
        config=config.to_dict(),
        dataset={
            **summary.to_dict(),
            "feature_names": list(ds.feature_names),
            "dropped_columns": list(ds.dropped_columns),
            "warnings": list(ds.warnings),
        },
        modules=per_module,
        robust_profile=None if robust is None else robust.to_records(),
        validity_grid=grid.to_list(),
        notices=notices,
        versions={"profilecast": __version__, "numpy": np.__version__},
    )
    return RunReport.from_dict(_plain(report.to_dict()))


def _fmt(value, error):
    return "ERR" if error is not None else f"{value:.5f}"


def render_table(report: RunReport) -> str:
    """Validity grid as a markdown table: metrics as rows, algorithm/module as columns."""
    grid = report.grid
    header = ["Metrics \\ Feature Selection"]
    for alg in ALGORITHMS:
        for mod in ALL_MODULES:
            header.append(f"{ALGORITHM_LABELS[alg]}: {mod.label}")
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    notes = []
    for metric in METRICS:
        row = [METRIC_LABELS[metric]]
        for alg in ALGORITHMS:
            for mod in ALL_MODULES:
                cell = grid.get(alg, mod, metric)
                row.append(_fmt(cell.value, cell.error))
                if cell.error is not None:
                    notes.append(f"{alg}/{mod.value}/{metric}: {cell.error}")
        lines.append("| " + " | ".join(row) + " |")
    out = "\n".join(lines) + "\n"
    if notes:
        out += "\nErrors:\n\n" + "".join(f"- {n}\n" for n in notes)
    return out


def _render_markdown(report: RunReport) -> str:
    ds = report.dataset
    parts = [
        "# Activity-based profiling report\n",
        f"Records: {ds['n_records']}, users: {ds['n_users']}, features: {len(ds['feature_names'])} "
        f"(dropped: {', '.join(ds['dropped_columns']) or 'none'})\n",
        "## Validity indices\n",
        render_table(report),
        "## K-means per feature module\n",
        "| Module | Features | k | Cluster sizes | Inertia |",
        "|---|---|---|---|---|",
    ]
    for name, info in report.modules.items():
        parts.append(
            f"| {FeatureModule.parse(name).label} | {len(info['features'])} | {info['k']} | "
            f"{', '.join(map(str, info['cluster_sizes']))} | {info['inertia']:.5f} |"
        )
    parts.append("")
    for name, info in report.modules.items():
        if info["elbow"]:
            curve = ", ".join(f"{k}: {w:.5f}" for k, w in zip(info["elbow"]["ks"], info["elbow"]["inertias"]))
            parts.append(f"Elbow curve ({name}): {curve}\n")
    if report.robust_profile is not None:
        parts += ["## Robust profiles\n", "| Cluster | Signature | Size | Members |", "|---|---|---|---|"]
        for rec in report.robust_profile:
            parts.append(
                f"| {rec['cluster_id']} | {tuple(rec['signature'])} | {len(rec['members'])} | "
                f"{', '.join(map(str, rec['members']))} |"
            )
        parts.append("")
    if report.notices:
        parts += ["## Notices\n"] + [f"- {n}" for n in report.notices] + [""]
    return "\n".join(parts)


def _render_csv(report: RunReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algorithm", "module", "metric", "value", "error"])
    for c in report.validity_grid:
        w.writerow([c["algorithm"], c["module"], c["metric"], "" if c["value"] is None else repr(c["value"]), c["error"] or ""])
    return buf.getvalue()


def render_report(report: RunReport, format: str = "json") -> bytes:
    if format == "json":
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    elif format == "csv":
        text = _render_csv(report)
    elif format == "markdown":
        text = _render_markdown(report)
    else:
        raise ParameterError(f"unknown report format {format!r}; expected one of {', '.join(FORMATS)}")
    return text.encode("utf-8")


def write_outputs(report: RunReport, config: Config) -> bytes:
    """Render in the configured format; also persist the robust profile next to dumped profiles."""
    data = render_report(report, config.format)
    if config.output:
        Path(config.output).write_bytes(data)
    if config.dump_profiles and report.robust_profile is not None:
        out = Path(config.dump_profiles)
        out.mkdir(parents=True, exist_ok=True)
        (out / "robust_profiles.json").write_text(json.dumps(report.robust_profile, indent=2) + "\n", encoding="utf-8")
    return data
