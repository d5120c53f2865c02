"""fuzzbin: fuzzy-clustered binning of feature template databases.

The package trains a fuzzy (or hard) cluster index over enrolled feature
vectors, answers identification queries by searching only the clusters
with the highest query membership grades, extracts a 27-dimension
descriptor from scanned signature images, and benchmarks bin-miss and
penetration rates across cluster counts. A FastAPI service wraps the
library; the CLI is a thin client of that service.
"""

from .core import (
    ClusterModel,
    LabeledDataset,
    Normalization,
    load_csv,
    normalize_fit,
    pairwise_sq_distances,
    save_csv,
    squared_distance,
)
from .errors import (
    DataError,
    DegenerateClusterError,
    EmptySignatureError,
    FuzzbinError,
    NumericError,
    UsageError,
)
from .evalbench import EvalReport, EvalRow, bin_miss_count, emit_report, gen_synthetic, penetration_rate, sweep
from .fcm import FcmTrace, fcm_train, hard_assign, init_partition, update_memberships
from .identify import IdentificationResult, exhaustive_identify, identify, query_distances, query_memberships, retrieve_clusters
from .kmeans import kmeans_assign, kmeans_train

__version__ = "0.1.0"

__all__ = [
    "ClusterModel",
    "DataError",
    "DegenerateClusterError",
    "EmptySignatureError",
    "EvalReport",
    "EvalRow",
    "FcmTrace",
    "FuzzbinError",
    "IdentificationResult",
    "LabeledDataset",
    "Normalization",
    "NumericError",
    "UsageError",
    "bin_miss_count",
    "emit_report",
    "exhaustive_identify",
    "fcm_train",
    "gen_synthetic",
    "hard_assign",
    "identify",
    "init_partition",
    "kmeans_assign",
    "kmeans_train",
    "load_csv",
    "normalize_fit",
    "pairwise_sq_distances",
    "penetration_rate",
    "query_distances",
    "query_memberships",
    "retrieve_clusters",
    "save_csv",
    "squared_distance",
    "sweep",
    "update_memberships",
    "__version__",
]
