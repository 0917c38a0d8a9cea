"""
Reading and cleaning a daily-activity export
=============================================

Run as ``python demos/01_ingest_and_clean.py [dailyActivity_merged.csv]``.
"""

import numpy as np

from profilecast.ingest import dataset_summary, drop_duplicate_features, parse_csv

from _data import input_csv

path = input_csv()

# Header matching ignores case and surrounding whitespace; bad cells raise with line and column.
raw = parse_csv(path)
print(f"{raw.n_records} records from {raw.n_users} users, {len(raw.feature_names)} numeric columns")

# TrackerDistance mirrors TotalDistance, so it carries nothing new
r = np.corrcoef(raw.column("TrackerDistance"), raw.column("TotalDistance"))[0, 1]
print(f"corr(TrackerDistance, TotalDistance) = {r:.4f}")

clean = drop_duplicate_features(raw)
print("dropped:", ", ".join(clean.dropped_columns))
print("kept:   ", ", ".join(clean.feature_names))

summary = dataset_summary(clean)
for name, s in summary.features.items():
    print(f"  {name:26s} min {s.min:10.2f}  max {s.max:10.2f}  mean {s.mean:10.2f}")

# Records are immutable; each exposes user, date and a read-only feature mapping.
first = clean.records[0]
print(first.user_id, first.activity_date, first["TotalSteps"])
