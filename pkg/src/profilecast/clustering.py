"""K-means (k-means++ seeding, Lloyd iterations), elbow selection and robust partitions.

A robust partition groups users whose cluster labels agree in every input
partition: two users share a robust cluster iff their label tuples are equal.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import numeric
from .errors import ConvergenceError, InputMismatchError, ParameterError

logger = logging.getLogger(__name__)

DEFAULT_K = 4
DEFAULT_SEED = 42
DEFAULT_RESTARTS = 10
DEFAULT_K_RANGE = (1, 10)


def canonical_labels(labels) -> np.ndarray:
    """Renumber labels 0..k-1 in order of first appearance."""
    mapping = {}
    out = np.empty(len(labels), dtype=np.int64)
    for i, lab in enumerate(np.asarray(labels).tolist()):
        out[i] = mapping.setdefault(lab, len(mapping))
    return out


@dataclass(frozen=True)
class Partition:
    """Cluster assignment of users.

    ``user_ids`` is ascending and ``labels`` is aligned with it. Instances
    built through :meth:`from_labels` are canonical: clusters are numbered by
    first appearance when users are walked in ascending id order.
    """

    user_ids: tuple
    labels: tuple
    canonical: bool = True

    @classmethod
    def from_labels(cls, user_ids, labels) -> "Partition":
        uid = np.asarray(user_ids, dtype=np.int64).ravel()
        lab = np.asarray(labels).ravel()
        if uid.shape != lab.shape:
            raise ParameterError(f"{len(uid)} user ids but {len(lab)} labels")
        if len(np.unique(uid)) != len(uid):
            raise ParameterError("user ids must be unique")
        order = np.argsort(uid, kind="stable")
        return cls(tuple(uid[order].tolist()), tuple(canonical_labels(lab[order]).tolist()), True)

    @property
    def k(self) -> int:
        return len(set(self.labels))

    @property
    def n(self) -> int:
        return len(self.user_ids)

    @property
    def label_array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.int64)

    def as_dict(self) -> dict:
        return dict(zip(self.user_ids, self.labels))

    def members(self) -> list:
        """Ascending user ids of each cluster, indexed by label."""
        groups = {}
        for u, lab in zip(self.user_ids, self.labels):
            groups.setdefault(lab, []).append(u)
        return [tuple(groups[lab]) for lab in sorted(groups)]

    def labels_for(self, user_ids) -> np.ndarray:
        """Labels re-ordered to match ``user_ids``."""
        lookup = self.as_dict()
        try:
            return np.asarray([lookup[int(u)] for u in user_ids], dtype=np.int64)
        except KeyError as exc:
            raise InputMismatchError(f"user {exc.args[0]} is not covered by the partition") from None

    def sizes(self) -> list:
        return [len(m) for m in self.members()]


@dataclass(frozen=True, eq=False)
class KMeansModel:
    k: int
    centroids: np.ndarray  # row i is the centroid of cluster label i
    partition: Partition
    inertia: float
    iterations: int
    seed: int
    restart: int
    converged: bool
    inertia_history: tuple = ()

    @property
    def labels(self) -> np.ndarray:
        return self.partition.label_array


def _data(pm):
    """``(points, user_ids)`` from a ProfileMatrix or a bare array."""
    if hasattr(pm, "standardized_values"):
        return np.asarray(pm.standardized_values, dtype=np.float64), np.asarray(pm.user_ids)
    x = numeric.as_matrix(pm)
    return x, np.arange(x.shape[0])


def assign(x, centroids) -> np.ndarray:
    """Index of the nearest centroid for every point (lowest index on ties)."""
    return np.argmin(numeric.squared_distances(x, centroids), axis=1)


def _sse(x, centroids, labels):
    d = x - centroids[labels]
    return float(np.sum(d * d))


def kmeans_plus_plus(x, k, rng) -> np.ndarray:
    n = x.shape[0]
    first = int(rng.integers(n))
    centers = [x[first]]
    closest = numeric.squared_distances(x, x[first:first + 1])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            idx = int(rng.integers(n))
        centers.append(x[idx])
        closest = np.minimum(closest, numeric.squared_distances(x, x[idx:idx + 1])[:, 0])
    return np.array(centers)


def _repair_empty(x, centroids, labels, k):
    """Give every empty cluster the point farthest from its own centroid."""
    labels = labels.copy()
    centroids = centroids.copy()
    for j in range(k):
        if np.any(labels == j):
            continue
        counts = np.bincount(labels, minlength=k)
        d = x - centroids[labels]
        dist = np.einsum("ij,ij->i", d, d)
        dist[counts[labels] <= 1] = -1.0  # never empty another cluster
        far = int(np.argmax(dist))
        logger.info("k-means: cluster %d empty, reassigning point %d (sq. distance %.6g)", j, far, dist[far])
        labels[far] = j
        centroids[j] = x[far]
    return centroids, labels


def _lloyd(x, centroids, k, max_iter, tol):
    history = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        labels = assign(x, centroids)
        centroids, labels = _repair_empty(x, centroids, labels, k)
        sse = _sse(x, centroids, labels)
        if history and sse > history[-1] + 1e-12 * max(1.0, history[-1]):
            raise ConvergenceError(f"k-means inertia increased from {history[-1]!r} to {sse!r} at iteration {it}")
        history.append(sse)
        updated = np.array([x[labels == j].mean(axis=0) for j in range(k)])
        shift = float(np.max(np.sqrt(np.sum((updated - centroids) ** 2, axis=1))))
        centroids = updated
        if shift < tol:
            converged = True
            break
    labels = assign(x, centroids)
    if len(np.unique(labels)) < k:
        centroids, labels = _repair_empty(x, centroids, labels, k)
    sse = _sse(x, centroids, labels)
    if history and sse > history[-1] + 1e-12 * max(1.0, history[-1]):
        raise ConvergenceError(f"k-means inertia increased from {history[-1]!r} to {sse!r} on final assignment")
    history.append(sse)
    return centroids, labels, sse, it, converged, history


def kmeans_fit(pm, k: int, seed: int = DEFAULT_SEED, max_iter: int = 300, tol: float = 1e-6,
               n_init: int = DEFAULT_RESTARTS) -> KMeansModel:
    """Best of ``n_init`` seeded k-means++/Lloyd runs (seeds ``seed .. seed + n_init - 1``).

    ``pm`` is a :class:`~profilecast.fusion.ProfileMatrix` (its
    standardized values are clustered) or a plain ``(n, d)`` array whose rows
    are treated as users ``0..n-1``.
    """
    x, user_ids = _data(pm)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ParameterError(f"k must be in [1, {n}], got {k}")
    if n_init < 1 or max_iter < 1:
        raise ParameterError("n_init and max_iter must be positive")

    best = None
    for r in range(n_init):
        rng = np.random.default_rng(seed + r)
        init = kmeans_plus_plus(x, k, rng)
        result = _lloyd(x, init, k, max_iter, tol)
        if best is None or result[2] < best[1][2]:
            best = (r, result)
    r, (centroids, labels, sse, iters, converged, history) = best

    # relabel clusters canonically and permute centroids to match
    part = Partition.from_labels(user_ids, labels)
    order = np.argsort(user_ids, kind="stable")
    old_to_new = {}
    for old, new in zip(labels[order].tolist(), part.labels):
        old_to_new.setdefault(old, new)
    perm = np.empty(k, dtype=np.int64)
    for old, new in old_to_new.items():
        perm[new] = old
    centroids = centroids[perm]
    centroids.setflags(write=False)
    return KMeansModel(k, centroids, part, sse, iters, seed, r, converged, tuple(history))


def elbow_from_curve(ks: Sequence[int], inertias: Sequence[float]) -> int:
    """k at the largest discrete second difference of the inertia curve (smallest k on ties)."""
    ks = list(ks)
    w = np.asarray(inertias, dtype=np.float64)
    if len(ks) != len(w):
        raise ParameterError("ks and inertias differ in length")
    if len(ks) < 3:
        raise ParameterError(f"elbow search needs at least 3 values of k, got {len(ks)}")
    if any(b - a != 1 for a, b in zip(ks, ks[1:])):
        raise ParameterError("elbow search needs consecutive values of k")
    second = w[:-2] - 2.0 * w[1:-1] + w[2:]
    return ks[1 + int(np.argmax(second))]


@dataclass(frozen=True)
class ElbowResult:
    k: int
    ks: tuple
    inertias: tuple


def elbow_select_k(pm, k_range=DEFAULT_K_RANGE, seed: int = DEFAULT_SEED, **kmeans_kw) -> ElbowResult:
    """Fit k-means for every k in the inclusive ``(k_min, k_max)`` range and pick the elbow."""
    x, _ = _data(pm)
    ks = list(range(k_range[0], k_range[1] + 1)) if isinstance(k_range, tuple) else list(k_range)
    if len(ks) < 3:
        raise ParameterError(f"elbow search needs at least 3 values of k, got {ks}")
    if max(ks) > x.shape[0] or min(ks) < 1:
        raise ParameterError(f"k range {ks[0]}..{ks[-1]} not within 1..{x.shape[0]}")
    inertias = [kmeans_fit(pm, k, seed=seed, **kmeans_kw).inertia for k in ks]
    return ElbowResult(elbow_from_curve(ks, inertias), tuple(ks), tuple(inertias))


@dataclass(frozen=True)
class RobustPartition:
    partition: Partition
    signatures: tuple  # per robust cluster, the tuple of input labels
    members: tuple  # per robust cluster, ascending user ids

    @property
    def k(self) -> int:
        return len(self.members)

    def to_records(self) -> list:
        return [
            {"cluster_id": i, "signature": list(sig), "members": list(mem)}
            for i, (sig, mem) in enumerate(zip(self.signatures, self.members))
        ]

    @classmethod
    def from_records(cls, records) -> "RobustPartition":
        records = sorted(records, key=lambda r: r["cluster_id"])
        users, labels = [], []
        for rec in records:
            users.extend(rec["members"])
            labels.extend([rec["cluster_id"]] * len(rec["members"]))
        part = Partition.from_labels(users, labels)
        return cls(part, tuple(tuple(r["signature"]) for r in records), tuple(tuple(r["members"]) for r in records))

    def to_json(self) -> str:
        return json.dumps(self.to_records(), indent=2)

    def write_json(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def read_json(cls, path) -> "RobustPartition":
        return cls.from_records(json.loads(Path(path).read_text(encoding="utf-8")))


def intersect_partitions(*partitions: Partition) -> RobustPartition:
    """Cells of the joint labelling: users with identical label tuples share a cluster."""
    if not partitions:
        raise ParameterError("need at least one partition")
    users = set(partitions[0].user_ids)
    for p in partitions[1:]:
        other = set(p.user_ids)
        if other != users:
            diff = sorted(users ^ other)
            raise InputMismatchError(f"partitions cover different users; symmetric difference: {diff}")
    user_ids = sorted(users)
    lookups = [p.as_dict() for p in partitions]
    signatures = [tuple(lk[u] for lk in lookups) for u in user_ids]
    cells = {}
    for u, sig in zip(user_ids, signatures):
        cells.setdefault(sig, []).append(u)
    # dict preserves first-appearance order, i.e. clusters sorted by smallest member
    part = Partition.from_labels(user_ids, canonical_labels([list(cells).index(s) for s in signatures]))
    return RobustPartition(part, tuple(cells), tuple(tuple(m) for m in cells.values()))
