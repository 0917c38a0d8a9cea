"""
Three views of the same records: Original, PCA and Correlation
===============================================================
"""

import numpy as np

from profilecast.features import project_pca, select_by_correlation, select_original
from profilecast.ingest import drop_duplicate_features, parse_csv
from profilecast.numeric import pearson_correlation_matrix

from _data import input_csv

ds = drop_duplicate_features(parse_csv(input_csv()))

original = select_original(ds)
print("Original:", original.shape)

# PCA on z-scored features; components come out uncorrelated and sorted by variance.
pca = project_pca(ds, n_components=3)
print("PCA:", pca.shape, "explained variance ratio", np.round(pca.explained_variance_ratio, 4))

# Correlation heat map as text
corr = pearson_correlation_matrix(ds.values)
short = [n.replace("Active", "").replace("Distance", "Dist")[:10] for n in ds.feature_names]
print(" " * 11 + " ".join(f"{s:>10s}" for s in short))
for s, row in zip(short, corr):
    print(f"{s:>10s} " + " ".join(f"{v:10.2f}" for v in row))

# Greedy elimination at |r| >= 0.9: drop the member of the worst pair that is
# more correlated with everything else.
corr_fm = select_by_correlation(ds, threshold=0.9)
for kept, dropped, r in corr_fm.triggering_pairs:
    print(f"|r| = {r:.3f}: kept {kept}, dropped {dropped}")
print("Correlation module keeps:", ", ".join(corr_fm.feature_names))
