"""
Robust profiles from three partitions, and how they score
=========================================================
"""

from profilecast.clustering import intersect_partitions, kmeans_fit
from profilecast.features import ALL_MODULES, select_features
from profilecast.fusion import fuse_user_records
from profilecast.ingest import drop_duplicate_features, parse_csv
from profilecast.report import RunReport, render_table
from profilecast.validity import score_all

from _data import input_csv

ds = drop_duplicate_features(parse_csv(input_csv()))
profiles = {m: fuse_user_records(select_features(ds, m)) for m in ALL_MODULES}
partitions = {m: kmeans_fit(pm, 4, seed=42).partition for m, pm in profiles.items()}

# Users sharing a cluster in all three partitions form one robust cluster.
robust = intersect_partitions(*(partitions[m] for m in ALL_MODULES))
print(f"{robust.k} robust clusters")
for rec in robust.to_records():
    print(f"  #{rec['cluster_id']} signature {tuple(rec['signature'])}: {len(rec['members'])} users")

# The one robust labelling is scored in each module's profile space, next to
# that module's own k-means partition.
grid = score_all(profiles, partitions, robust)
stub = RunReport({}, {}, {}, None, grid.to_list(), [], {})
print()
print(render_table(stub))
