"""The three record-level feature sets: Original, PCA and Correlation."""

import csv
import enum
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import numeric
from .errors import InsufficientDataError, ParameterError
from .ingest import Dataset, format_date

logger = logging.getLogger(__name__)

DEFAULT_CORR_THRESHOLD = 0.9
DEFAULT_PCA_COMPONENTS = 3


class FeatureModule(str, enum.Enum):
    ORIGINAL = "original"
    PCA = "pca"
    CORRELATION = "correlation"

    @property
    def label(self) -> str:
        return {"original": "Original", "pca": "PCA", "correlation": "Correlation"}[self.value]

    @classmethod
    def parse(cls, name) -> "FeatureModule":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ParameterError(f"unknown feature module {name!r}; expected one of original, pca, correlation") from None


ALL_MODULES = (FeatureModule.ORIGINAL, FeatureModule.PCA, FeatureModule.CORRELATION)


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    module: FeatureModule
    user_ids: np.ndarray
    dates: tuple
    values: np.ndarray
    feature_names: tuple
    explained_variance_ratio: Optional[np.ndarray] = None
    dropped: tuple = ()
    triggering_pairs: tuple = ()  # (kept, dropped, |r|) per elimination step

    @property
    def row_keys(self) -> list:
        return list(zip(self.user_ids.tolist(), self.dates))

    @property
    def shape(self):
        return self.values.shape

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["Id", "ActivityDate", *self.feature_names])
            for uid, day, row in zip(self.user_ids.tolist(), self.dates, self.values.tolist()):
                w.writerow([uid, format_date(day), *(repr(v) for v in row)])


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def select_original(ds: Dataset) -> FeatureMatrix:
    return FeatureMatrix(FeatureModule.ORIGINAL, ds.user_ids, ds.dates, _frozen(ds.values), ds.feature_names)


def project_pca(ds: Dataset, n_components: int = DEFAULT_PCA_COMPONENTS, standardize: bool = True) -> FeatureMatrix:
    """Project records onto the leading principal axes of the (z-scored) features."""
    n_features = len(ds.feature_names)
    if not 1 <= n_components <= n_features:
        raise ParameterError(f"n_components must be in [1, {n_features}], got {n_components}")
    if len(ds) < 2:
        raise InsufficientDataError(f"PCA needs at least 2 records, got {len(ds)}")
    x = numeric.standardize(ds.values).values if standardize else ds.values - ds.values.mean(axis=0)
    eig = numeric.eigh_symmetric(numeric.covariance_matrix(x))
    axes = eig.eigenvectors[:, :n_components]
    scores = x @ axes
    total = float(np.sum(np.clip(eig.eigenvalues, 0.0, None)))
    ratio = np.clip(eig.eigenvalues[:n_components], 0.0, None) / total if total > 0 else np.zeros(n_components)
    names = tuple(f"PC{i + 1}" for i in range(n_components))
    return FeatureMatrix(FeatureModule.PCA, ds.user_ids, ds.dates, _frozen(scores), names, _frozen(ratio))


def correlation_elimination(corr: np.ndarray, threshold: float):
    """Greedy removal of highly correlated columns from a correlation matrix.

    While some surviving pair has ``|r| >= threshold``: take the pair with
    the largest ``|r|`` (earliest pair on ties) and drop whichever member has
    the larger mean ``|r|`` to the other survivors; on a tie drop the later
    column. Returns ``(kept_indices, dropped_indices, pairs)``.
    """
    if not 0.0 < threshold <= 1.0:
        raise ParameterError(f"correlation threshold must be in (0, 1], got {threshold}")
    absr = np.abs(np.asarray(corr, dtype=np.float64))
    alive = list(range(absr.shape[0]))
    dropped, pairs = [], []
    while len(alive) > 1:
        sub = absr[np.ix_(alive, alive)]
        off = sub.copy()
        np.fill_diagonal(off, -np.inf)
        best = off.max()
        if best < threshold:
            break
        flat = int(np.argmax(off))  # first maximum in row-major order
        i, j = divmod(flat, len(alive))
        i, j = min(i, j), max(i, j)
        m = len(alive) - 1
        mean_i = (sub[i].sum() - sub[i, i]) / m
        mean_j = (sub[j].sum() - sub[j, j]) / m
        loser, winner = (i, j) if mean_i > mean_j else (j, i)
        pairs.append((alive[winner], alive[loser], float(best)))
        dropped.append(alive[loser])
        del alive[loser]
    return alive, dropped, pairs


def select_by_correlation(ds: Dataset, threshold: float = DEFAULT_CORR_THRESHOLD) -> FeatureMatrix:
    if not 0.0 < threshold <= 1.0:
        raise ParameterError(f"correlation threshold must be in (0, 1], got {threshold}")
    if len(ds) < 2:
        raise InsufficientDataError(f"correlation selection needs at least 2 records, got {len(ds)}")
    corr = numeric.pearson_correlation_matrix(numeric.standardize(ds.values).values)
    kept, dropped, pairs = correlation_elimination(corr, threshold)
    names = ds.feature_names
    if dropped:
        logger.info("correlation module dropped %s", ", ".join(names[i] for i in dropped))
    return FeatureMatrix(
        FeatureModule.CORRELATION,
        ds.user_ids,
        ds.dates,
        _frozen(ds.values[:, kept]),
        tuple(names[i] for i in kept),
        dropped=tuple(names[i] for i in dropped),
        triggering_pairs=tuple((names[a], names[b], r) for a, b, r in pairs),
    )


def select_features(ds: Dataset, module, *, n_components=DEFAULT_PCA_COMPONENTS,
                    threshold=DEFAULT_CORR_THRESHOLD, standardize=True) -> FeatureMatrix:
    module = FeatureModule.parse(module)
    if module is FeatureModule.ORIGINAL:
        return select_original(ds)
    if module is FeatureModule.PCA:
        return project_pca(ds, n_components, standardize=standardize)
    return select_by_correlation(ds, threshold)
