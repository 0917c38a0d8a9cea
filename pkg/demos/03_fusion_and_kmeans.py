"""
Per-user profiles and k-means with an elbow search
==================================================
"""

from profilecast.clustering import elbow_select_k, kmeans_fit
from profilecast.features import ALL_MODULES, select_features
from profilecast.fusion import fuse_user_records
from profilecast.ingest import drop_duplicate_features, parse_csv

from _data import input_csv

ds = drop_duplicate_features(parse_csv(input_csv()))

for module in ALL_MODULES:
    # six statistics (max, min, range, std, mean, median) per feature and user, then z-scored
    pm = fuse_user_records(select_features(ds, module))
    print(f"\n{module.label}: {pm.values.shape[0]} users x {pm.values.shape[1]} statistics")

    elbow = elbow_select_k(pm, (1, 10), seed=42)
    curve = "  ".join(f"{k}:{w:.1f}" for k, w in zip(elbow.ks, elbow.inertias))
    print(f"  inertia curve  {curve}")
    print(f"  elbow (largest second difference) at k={elbow.k}")

    model = kmeans_fit(pm, 4, seed=42)
    print(f"  k=4: sizes {model.partition.sizes()}, inertia {model.inertia:.3f}, "
          f"{model.iterations} Lloyd iterations (best of 10 restarts: #{model.restart})")
