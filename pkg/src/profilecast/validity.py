"""Silhouette, Davies-Bouldin and Calinski-Harabasz indices, and the comparison grid."""

import logging
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from . import numeric
from .clustering import Partition, RobustPartition
from .errors import (
    CoincidentCentroidsError,
    InfiniteIndexError,
    ProfilecastError,
    UndefinedMetricError,
)
from .features import ALL_MODULES, FeatureModule

logger = logging.getLogger(__name__)

METRICS = ("ss", "dbi", "chi")
METRIC_LABELS = {"ss": "Silhouette Score", "dbi": "Davies Bouldin Index", "chi": "Calinski Harabasz Index"}
ALGORITHMS = ("kmeans", "robust")
ALGORITHM_LABELS = {"kmeans": "K-means Clustering", "robust": "Robust Clustering"}


def _points_and_labels(data, partition):
    """Align a ProfileMatrix/array with a Partition/label vector."""
    if hasattr(data, "standardized_values"):
        x = np.asarray(data.standardized_values, dtype=np.float64)
        users = data.user_ids
    else:
        x = numeric.as_matrix(data)
        users = None
    if isinstance(partition, RobustPartition):
        partition = partition.partition
    if isinstance(partition, Partition):
        labels = partition.labels_for(users if users is not None else range(x.shape[0]))
    else:
        labels = np.asarray(partition).ravel()
        if len(labels) != x.shape[0]:
            raise UndefinedMetricError(f"{x.shape[0]} points but {len(labels)} labels")
    _, labels = np.unique(labels, return_inverse=True)
    return x, labels.ravel()


def silhouette_samples(x, labels) -> np.ndarray:
    k = int(labels.max()) + 1
    n = len(labels)
    d = numeric.pairwise_distances(x)
    sizes = np.bincount(labels, minlength=k)
    onehot = np.zeros((n, k))
    onehot[np.arange(n), labels] = 1.0
    sums = d @ onehot  # sum of distances from each point to each cluster
    own = sizes[labels]
    a = np.where(own > 1, sums[np.arange(n), labels] / np.maximum(own - 1, 1), 0.0)
    means = sums / sizes
    means[np.arange(n), labels] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where(denom > 0, (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    s[own == 1] = 0.0
    return s


def silhouette_score(data, partition) -> float:
    """Mean silhouette; members of singleton clusters score 0."""
    x, labels = _points_and_labels(data, partition)
    n, k = len(labels), int(labels.max()) + 1 if len(labels) else 0
    if not 2 <= k <= n - 1:
        raise UndefinedMetricError(f"silhouette needs 2 <= k <= n - 1 (k={k}, n={n})")
    return float(np.mean(silhouette_samples(x, labels)))


def _centroids(x, labels, k):
    return np.array([x[labels == j].mean(axis=0) for j in range(k)])


def davies_bouldin_index(data, partition) -> float:
    x, labels = _points_and_labels(data, partition)
    n, k = len(labels), int(labels.max()) + 1 if len(labels) else 0
    if not 2 <= k <= n:
        raise UndefinedMetricError(f"Davies-Bouldin needs 2 <= k <= n (k={k}, n={n})")
    cents = _centroids(x, labels, k)
    scatter = np.array([np.mean(np.sqrt(np.sum((x[labels == j] - cents[j]) ** 2, axis=1))) for j in range(k)])
    sep = numeric.pairwise_distances(cents)
    worst = np.zeros(k)
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            if sep[i, j] == 0.0:
                raise CoincidentCentroidsError(f"clusters {i} and {j} have coincident centroids", pair=(i, j))
            worst[i] = max(worst[i], (scatter[i] + scatter[j]) / sep[i, j])
    return float(worst.mean())


def calinski_harabasz_index(data, partition) -> float:
    x, labels = _points_and_labels(data, partition)
    n, k = len(labels), int(labels.max()) + 1 if len(labels) else 0
    if not 2 <= k <= n - 1:
        raise UndefinedMetricError(f"Calinski-Harabasz needs 2 <= k <= n - 1 (k={k}, n={n})")
    cents = _centroids(x, labels, k)
    sizes = np.bincount(labels, minlength=k)
    grand = x.mean(axis=0)
    between = float(np.sum(sizes * np.sum((cents - grand) ** 2, axis=1)))
    within = float(np.sum((x - cents[labels]) ** 2))
    if within == 0.0:
        raise InfiniteIndexError("within-cluster dispersion is zero; Calinski-Harabasz index is infinite")
    return (between / (k - 1)) / (within / (n - k))


METRIC_FUNCTIONS = {"ss": silhouette_score, "dbi": davies_bouldin_index, "chi": calinski_harabasz_index}


@dataclass(frozen=True)
class ValidityScores:
    ss: float
    dbi: float
    chi: float


def validity_scores(data, partition) -> ValidityScores:
    return ValidityScores(*(METRIC_FUNCTIONS[m](data, partition) for m in METRICS))


@dataclass(frozen=True)
class Cell:
    algorithm: str
    module: str
    metric: str
    value: Optional[float] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm, "module": self.module, "metric": self.metric,
                "value": self.value, "error": self.error}


@dataclass(frozen=True)
class ValidityReport:
    """The fixed 2 algorithms x 3 modules x 3 metrics grid; failures stay in their cell."""

    cells: tuple

    def get(self, algorithm: str, module, metric: str) -> Cell:
        module = FeatureModule.parse(module).value
        for c in self.cells:
            if (c.algorithm, c.module, c.metric) == (algorithm, module, metric):
                return c
        raise KeyError((algorithm, module, metric))

    def value(self, algorithm: str, module, metric: str) -> Optional[float]:
        return self.get(algorithm, module, metric).value

    def to_list(self) -> list:
        return [c.to_dict() for c in self.cells]

    @classmethod
    def from_list(cls, items) -> "ValidityReport":
        return cls(tuple(Cell(**item) for item in items))


def _cell(algorithm, module, metric, fn):
    try:
        return Cell(algorithm, module.value, metric, value=float(fn()))
    except ProfilecastError as exc:
        logger.warning("%s/%s/%s: %s", algorithm, module.value, metric, exc)
        return Cell(algorithm, module.value, metric, error=f"{type(exc).__name__}: {exc}")


def score_all(profile_matrices: Mapping, kmeans: Mapping, robust: Optional[RobustPartition]) -> ValidityReport:
    """Score each module's own k-means partition and the shared robust partition in every module's space."""
    pms = {FeatureModule.parse(m): pm for m, pm in profile_matrices.items()}
    kms = {FeatureModule.parse(m): p for m, p in kmeans.items()}
    cells = []
    for algorithm in ALGORITHMS:
        for module in ALL_MODULES:
            pm = pms.get(module)
            part = kms.get(module) if algorithm == "kmeans" else robust
            for metric in METRICS:
                if pm is None:
                    cells.append(Cell(algorithm, module.value, metric, error="module not run"))
                elif part is None:
                    what = "robust clustering skipped" if algorithm == "robust" else "no k-means partition"
                    cells.append(Cell(algorithm, module.value, metric, error=what))
                else:
                    fn = METRIC_FUNCTIONS[metric]
                    cells.append(_cell(algorithm, module, metric, lambda: fn(pm, part)))
    return ValidityReport(tuple(cells))
