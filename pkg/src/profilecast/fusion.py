"""Per-user aggregation of daily records into fixed-length profile vectors."""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import numeric
from .errors import EmptyInputError
from .features import FeatureMatrix, FeatureModule

logger = logging.getLogger(__name__)

STATISTICS = ("max", "min", "range", "std", "mean", "median")
MIN_RECORDS_WARNING = 5


@dataclass(frozen=True)
class UserProfileVector:
    user_id: int
    module: FeatureModule
    values: tuple
    stat_names: tuple


@dataclass(frozen=True, eq=False)
class ProfileMatrix:
    """One fused row per user, sorted by ascending user id.

    ``values`` holds the raw statistics; ``standardized_values`` is the space
    clustering and validity metrics operate in (a z-scored copy, or a plain
    copy when standardization is disabled).
    """

    module: FeatureModule
    user_ids: np.ndarray
    values: np.ndarray
    stat_names: tuple
    standardized_values: np.ndarray
    record_counts: np.ndarray
    standardized: bool = True
    warnings: tuple = ()

    def __len__(self):
        return len(self.user_ids)

    @property
    def rows(self) -> list:
        return [
            UserProfileVector(int(u), self.module, tuple(v), self.stat_names)
            for u, v in zip(self.user_ids.tolist(), self.values.tolist())
        ]

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["Id", "n_records", *self.stat_names])
            for uid, cnt, row in zip(self.user_ids.tolist(), self.record_counts.tolist(), self.values.tolist()):
                w.writerow([uid, cnt, *(repr(v) for v in row)])


def user_statistics(x: np.ndarray) -> np.ndarray:
    """The six statistics for each column of one user's ``(n_days, n_features)`` block.

    Returns a ``(n_features, 6)`` array ordered as :data:`STATISTICS`.
    """
    x = np.asarray(x, dtype=np.float64)
    hi = x.max(axis=0)
    lo = x.min(axis=0)
    mean = np.clip(x.mean(axis=0), lo, hi)  # guard against rounding past the extremes
    std = x.std(axis=0)  # population
    med = np.median(x, axis=0)
    return np.stack([hi, lo, hi - lo, std, mean, med], axis=1)


def fuse_user_records(fm: FeatureMatrix, standardize: bool = True) -> ProfileMatrix:
    """Collapse each user's rows into ``6 * n_features`` statistics."""
    if fm.values.shape[0] == 0:
        raise EmptyInputError(f"cannot fuse an empty {fm.module.label} feature matrix")
    users, inverse, counts = np.unique(fm.user_ids, return_inverse=True, return_counts=True)
    users = users.astype(np.int64)
    n_feat = fm.values.shape[1]
    fused = np.empty((len(users), n_feat * len(STATISTICS)))
    for i in range(len(users)):
        block = fm.values[inverse == i]
        fused[i] = user_statistics(block).ravel()
    names = tuple(f"{f}_{s}" for f in fm.feature_names for s in STATISTICS)

    warnings = []
    sparse = users[counts < MIN_RECORDS_WARNING]
    if len(sparse):
        msg = f"{len(sparse)} user(s) with fewer than {MIN_RECORDS_WARNING} records: {', '.join(map(str, sparse.tolist()))}"
        logger.warning("%s module: %s", fm.module.label, msg)
        warnings.append(msg)

    space = numeric.standardize(fused).values if standardize else fused.copy()
    for arr in (users, fused, space, counts):
        arr.setflags(write=False)
    return ProfileMatrix(fm.module, users, fused, names, space, counts, standardize, tuple(warnings))
