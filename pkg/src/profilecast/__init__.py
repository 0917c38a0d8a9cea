"""Activity-based user profiling from wearable daily-activity exports."""

__version__ = "0.1.0"

from .clustering import (  # noqa: E402
    KMeansModel,
    Partition,
    RobustPartition,
    elbow_select_k,
    intersect_partitions,
    kmeans_fit,
)
from .config import Config, resolve_config  # noqa: E402
from .features import FeatureMatrix, FeatureModule, project_pca, select_by_correlation, select_original  # noqa: E402
from .fusion import ProfileMatrix, fuse_user_records  # noqa: E402
from .ingest import Dataset, dataset_summary, drop_duplicate_features, parse_csv  # noqa: E402
from .report import RunReport, render_report, run_pipeline  # noqa: E402
from .validity import (  # noqa: E402
    calinski_harabasz_index,
    davies_bouldin_index,
    score_all,
    silhouette_score,
)
