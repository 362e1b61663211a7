from .windows import Window, bin_stream, iter_windows
from .extract import (
    FEATURE_NAMES,
    N_FEATURES,
    FeatureVector,
    SessionState,
    extract_features,
    extract_stream,
    edit_distance,
)
from .labels import (
    CLASS_NAMES,
    CLASS_IDS,
    INTRUSION_CLASSES,
    OUTAGE_CLASSES,
    GroundTruthError,
    label_windows,
    read_ground_truth,
    write_ground_truth,
)
from .dataset import DatasetFormatError, FeatureDataset, read_dataset, write_dataset

__all__ = [
    "Window",
    "bin_stream",
    "iter_windows",
    "FEATURE_NAMES",
    "N_FEATURES",
    "FeatureVector",
    "SessionState",
    "extract_features",
    "extract_stream",
    "edit_distance",
    "CLASS_NAMES",
    "CLASS_IDS",
    "INTRUSION_CLASSES",
    "OUTAGE_CLASSES",
    "GroundTruthError",
    "label_windows",
    "read_ground_truth",
    "write_ground_truth",
    "DatasetFormatError",
    "FeatureDataset",
    "read_dataset",
    "write_dataset",
]
