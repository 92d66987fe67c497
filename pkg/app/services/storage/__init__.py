"""成果物ファイルの読み書き."""

from .checkpoint import CheckpointCodec
from .codes import CodesCodec
from .dataset_files import FeaturesCodec, LabelsCodec, export_bundle, ingest
from .reports import write_metrics, write_ranking, write_sweep, write_train_report

__all__ = [
    "CheckpointCodec",
    "CodesCodec",
    "FeaturesCodec",
    "LabelsCodec",
    "export_bundle",
    "ingest",
    "write_metrics",
    "write_ranking",
    "write_sweep",
    "write_train_report",
]
