"""Reading, validating and cleaning Fitbit-style ``dailyActivity`` CSV exports."""

import csv
import logging
import math
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import CSVParseError, DuplicateRecordError, RecordValidationError, SchemaError

logger = logging.getLogger(__name__)

ID_COLUMN = "Id"
DATE_COLUMN = "ActivityDate"

FITBIT_COLUMNS = (
    "Id",
    "ActivityDate",
    "TotalSteps",
    "TotalDistance",
    "TrackerDistance",
    "LoggedActivitiesDistance",
    "VeryActiveDistance",
    "ModeratelyActiveDistance",
    "LightActiveDistance",
    "SedentaryActiveDistance",
    "VeryActiveMinutes",
    "FairlyActiveMinutes",
    "LightlyActiveMinutes",
    "SedentaryMinutes",
    "Calories",
)

# Columns that carry no information beyond other columns.
DUPLICATE_COLUMNS = ("ActivityDate", "TrackerDistance", "LoggedActivitiesDistance")

MINUTE_COLUMNS = ("VeryActiveMinutes", "FairlyActiveMinutes", "LightlyActiveMinutes", "SedentaryMinutes")
MINUTES_PER_DAY = 1440

# alternative spellings seen in the wild, keyed by normalized name
_ALIASES = {"loggedactivitydistance": "LoggedActivitiesDistance"}


def _norm(name: str) -> str:
    return name.strip().lower()


def canonical_column(name: str, schema: Sequence[str] = FITBIT_COLUMNS) -> Optional[str]:
    """Map a header cell to its schema spelling (case/whitespace-insensitive)."""
    key = _norm(name)
    for col in schema:
        if _norm(col) == key:
            return col
    alias = _ALIASES.get(key)
    if alias is not None and alias in schema:
        return alias
    return None


def parse_date(text: str) -> date:
    text = text.strip()
    try:
        return datetime.strptime(text, "%m/%d/%Y").date()
    except ValueError:
        pass
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise ValueError(f"unrecognised date {text!r} (expected MM/DD/YYYY or YYYY-MM-DD)") from None


def format_date(d: date) -> str:
    return f"{d.month:02d}/{d.day:02d}/{d.year:04d}"


@dataclass(frozen=True)
class ActivityRecord:
    """One user-day. ``features`` maps column name to value."""

    user_id: int
    activity_date: date
    features: Mapping[str, float]

    def __getitem__(self, name: str) -> float:
        return self.features[name]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable table of user-days.

    ``values`` has one row per record and one column per entry of
    ``feature_names``. Identity columns (user id, date) are held separately.
    """

    user_ids: np.ndarray
    dates: tuple
    values: np.ndarray
    feature_names: tuple
    dropped_columns: tuple = ()
    warnings: tuple = ()

    def __post_init__(self):
        uid = np.asarray(self.user_ids, dtype=np.int64).reshape(-1)
        vals = np.asarray(self.values, dtype=np.float64).reshape(len(uid), len(self.feature_names))
        uid.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "user_ids", uid)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "dropped_columns", tuple(self.dropped_columns))
        object.__setattr__(self, "warnings", tuple(self.warnings))
        if len(self.dates) != len(uid):
            raise ValueError("user_ids and dates differ in length")
        for reserved in (ID_COLUMN, DATE_COLUMN):
            if reserved in self.feature_names:
                raise ValueError(f"{reserved} cannot be a feature column")

    def __len__(self):
        return len(self.user_ids)

    def __eq__(self, other):
        # metadata (dropped_columns, warnings) is not part of record identity
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.feature_names == other.feature_names
            and self.dates == other.dates
            and np.array_equal(self.user_ids, other.user_ids)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    @property
    def n_records(self) -> int:
        return len(self)

    @property
    def n_users(self) -> int:
        return len(np.unique(self.user_ids))

    @property
    def records(self) -> list:
        return [self.record(i) for i in range(len(self))]

    def record(self, i: int) -> ActivityRecord:
        feats = MappingProxyType(dict(zip(self.feature_names, self.values[i].tolist())))
        return ActivityRecord(int(self.user_ids[i]), self.dates[i], feats)

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.feature_names.index(name)]

    @property
    def row_keys(self) -> list:
        return list(zip(self.user_ids.tolist(), self.dates))


def _validate_rows(user_ids, values, feature_names, line_numbers):
    """Return ``{line_number: reason}`` for rows breaking the record invariants."""
    bad = {}
    neg = (values < 0).any(axis=1)
    for i in np.flatnonzero(neg):
        cols = [feature_names[j] for j in np.flatnonzero(values[i] < 0)]
        bad[line_numbers[i]] = f"negative value in {', '.join(cols)}"
    minute_idx = [feature_names.index(c) for c in MINUTE_COLUMNS if c in feature_names]
    if minute_idx:
        mins = values[:, minute_idx]
        over = (mins > MINUTES_PER_DAY).any(axis=1) | (mins.sum(axis=1) > MINUTES_PER_DAY)
        for i in np.flatnonzero(over):
            bad.setdefault(line_numbers[i], f"activity minutes exceed {MINUTES_PER_DAY} per day")
    return bad


def parse_csv(path, schema: Sequence[str] = FITBIT_COLUMNS, drop_bad_rows: bool = False) -> Dataset:
    """Read a daily-activity CSV into a :class:`Dataset`.

    Every column in ``schema`` must be present in the header (matched
    case-insensitively); ``Id`` and ``ActivityDate`` are always required.
    Unknown columns are ignored. Row order is preserved.

    Bad rows (empty or non-numeric cells, negative values, more than 1440
    activity minutes) raise unless ``drop_bad_rows`` is set, in which case
    they are dropped and listed in ``Dataset.warnings``.
    """
    path = Path(path)
    schema = tuple(schema)
    for required in (ID_COLUMN, DATE_COLUMN):
        if required not in schema:
            schema = (required,) + schema
    feature_names = tuple(c for c in schema if c not in (ID_COLUMN, DATE_COLUMN))

    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty (header row required)") from None

        positions = {}
        ignored = []
        for pos, cell in enumerate(header):
            col = canonical_column(cell, schema)
            if col is None:
                ignored.append(cell)
            elif col in positions:
                raise SchemaError(f"{path}: column {col!r} appears more than once in the header")
            else:
                positions[col] = pos
        for col in schema:
            if col not in positions:
                raise SchemaError(f"{path}: missing required column {col!r}")

        warnings = []
        if ignored:
            warnings.append(f"ignored unknown column(s): {', '.join(ignored)}")

        ids, dates, rows, lines = [], [], [], []
        errors = []  # (line, column, message)
        bad_lines = set()
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            row_errors = []

            def cell(col):
                pos = positions[col]
                return row[pos] if pos < len(row) else ""

            try:
                uid = int(cell(ID_COLUMN).strip())
            except ValueError:
                row_errors.append((line_no, ID_COLUMN, f"invalid user id {cell(ID_COLUMN)!r}"))
                uid = None
            try:
                day = parse_date(cell(DATE_COLUMN))
            except ValueError as exc:
                row_errors.append((line_no, DATE_COLUMN, str(exc)))
                day = None
            vals = []
            for col in feature_names:
                text = cell(col).strip()
                try:
                    v = float(text)
                    if not math.isfinite(v):
                        raise ValueError
                except ValueError:
                    msg = "empty value" if not text else f"non-numeric value {text!r}"
                    row_errors.append((line_no, col, msg))
                    v = math.nan
                vals.append(v)
            if row_errors:
                errors.extend(row_errors)
                bad_lines.add(line_no)
                continue
            ids.append(uid)
            dates.append(day)
            rows.append(vals)
            lines.append(line_no)

    values = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(feature_names))
    invalid = _validate_rows(ids, values, list(feature_names), lines)

    if errors and not drop_bad_rows:
        shown = "; ".join(f"line {ln}, column {col}: {msg}" for ln, col, msg in errors[:10])
        more = f" (+{len(errors) - 10} more)" if len(errors) > 10 else ""
        raise CSVParseError(f"{path}: {shown}{more}")
    if invalid and not drop_bad_rows:
        shown = "; ".join(f"line {ln}: {msg}" for ln, msg in sorted(invalid.items())[:10])
        raise RecordValidationError(f"{path}: invalid record(s): {shown}")

    if drop_bad_rows and (errors or invalid):
        dropped_lines = sorted(bad_lines | set(invalid))
        keep = np.array([ln not in invalid for ln in lines], dtype=bool)
        ids = [u for u, k in zip(ids, keep) if k]
        dates = [d for d, k in zip(dates, keep) if k]
        lines = [ln for ln, k in zip(lines, keep) if k]
        values = values[keep]
        msg = f"dropped {len(dropped_lines)} bad row(s) at line(s) {', '.join(map(str, dropped_lines))}"
        logger.warning("%s: %s", path, msg)
        warnings.append(msg)

    seen = {}
    for uid, day, ln in zip(ids, dates, lines):
        key = (uid, day)
        if key in seen:
            raise DuplicateRecordError(
                f"{path}: duplicate record for user {uid} on {day.isoformat()} (lines {seen[key]} and {ln})"
            )
        seen[key] = ln

    return Dataset(np.asarray(ids, dtype=np.int64), dates, values, feature_names, (), warnings)


def drop_duplicate_features(ds: Dataset, columns: Iterable[str] = DUPLICATE_COLUMNS) -> Dataset:
    """Remove redundant columns; never drops rows.

    ``ActivityDate`` is kept as record identity but listed as dropped so the
    cleaning step is auditable. Columns that are absent are skipped with a
    warning.
    """
    dropped = list(ds.dropped_columns)
    warnings = list(ds.warnings)
    keep = list(ds.feature_names)
    for col in columns:
        if col == DATE_COLUMN:
            if col not in dropped:
                dropped.append(col)
            continue
        if col in keep:
            keep.remove(col)
            dropped.append(col)
        else:
            msg = f"column {col!r} not present; nothing to drop"
            logger.warning(msg)
            warnings.append(msg)
    idx = [ds.feature_names.index(c) for c in keep]
    return Dataset(ds.user_ids, ds.dates, ds.values[:, idx], keep, dropped, warnings)


@dataclass(frozen=True)
class FeatureStats:
    min: float
    max: float
    mean: float


@dataclass(frozen=True)
class DatasetSummary:
    n_records: int
    n_users: int
    features: Mapping[str, FeatureStats] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n_records": self.n_records,
            "n_users": self.n_users,
            "features": {
                name: {"min": s.min, "max": s.max, "mean": s.mean} for name, s in self.features.items()
            },
        }


def dataset_summary(ds: Dataset) -> DatasetSummary:
    if len(ds) == 0:
        return DatasetSummary(0, 0, {})
    stats = {}
    for j, name in enumerate(ds.feature_names):
        col = ds.values[:, j]
        stats[name] = FeatureStats(float(col.min()), float(col.max()), float(col.mean()))
    return DatasetSummary(len(ds), ds.n_users, stats)


def write_csv(ds: Dataset, path) -> None:
    """Serialize ``ds`` in the same CSV dialect :func:`parse_csv` reads.

    Values are written with ``repr`` so they round-trip exactly.
    """
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([ID_COLUMN, DATE_COLUMN, *ds.feature_names])
        for uid, day, row in zip(ds.user_ids.tolist(), ds.dates, ds.values.tolist()):
            w.writerow([uid, format_date(day), *(repr(v) for v in row)])


def dataset_schema(ds: Dataset) -> tuple:
    return (ID_COLUMN, DATE_COLUMN, *ds.feature_names)
