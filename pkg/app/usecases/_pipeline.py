"""コマンド間で共有する成果物の読み込みと学習・評価の手順."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from errors import ArtifactFormatError
from services.data.dataset import split_dataset
from services.hashing.encoder import encode_dataset
from services.hashing.hash_model import init_params
from services.hashing.trainer import train
from services.retrieval.evaluation import evaluate
from services.storage.checkpoint import CheckpointCodec
from services.storage.codes import CodesCodec
from services.storage.dataset_files import ingest
from usecases.errors import ArtifactNotFoundError
from utils.logging import get_logger

if TYPE_CHECKING:
    from dtos.config import LossConfig, RunConfig
    from dtos.reports import MetricsReport, TrainReport
    from services.data.dataset import DatasetBundle, Splits
    from services.hashing.hash_model import HashModelParams
    from services.retrieval.code_index import CodeDatabase

logger = get_logger(__name__)


def require(path: Path, what: str) -> Path:
    path = Path(path)
    if not path.is_file():
        msg = f"{what} not found: {path} (run the upstream command first)"
        raise ArtifactNotFoundError(msg)
    return path


def load_dataset(config: RunConfig) -> DatasetBundle:
    return ingest(
        require(config.features_file, "Feature file"),
        require(config.labels_file, "Label file"),
    )


def load_model(config: RunConfig) -> HashModelParams:
    return CheckpointCodec().read(require(config.checkpoint_file, "Checkpoint"))


def load_codes(config: RunConfig) -> CodeDatabase:
    return CodesCodec().read(require(config.codes_file, "Code file"))


def make_splits(config: RunConfig, bundle: DatasetBundle) -> Splits:
    return split_dataset(len(bundle), config.split_config())


def fit(config: RunConfig, bundle: DatasetBundle, splits: Splits, loss_cfg: LossConfig) -> tuple[HashModelParams, TrainReport]:
    """初期化して学習する. 初期化と学習のサンプリングは別々の乱数列を使う."""
    init_rng = np.random.default_rng([config.seed, 1])
    initial = init_params(bundle.feature_dim, loss_cfg.bits, config.hidden_widths, init_rng)
    return train(bundle, initial, config.train_config(), loss_cfg, train_ids=splits.train)


def evaluate_codes(config: RunConfig, codes: CodeDatabase, bundle: DatasetBundle, splits: Splits) -> MetricsReport:
    """クエリ分割をデータベース分割に対して評価する."""
    if len(codes) != len(bundle):
        msg = f"Code file has {len(codes)} records, dataset has {len(bundle)}"
        raise ArtifactFormatError(msg)
    return evaluate(
        codes.subset(splits.query),
        bundle.labels[splits.query],
        codes.subset(splits.database),
        bundle.labels[splits.database],
        config.top_n,
        exclude_self_match=config.exclude_self_match,
        threads=config.threads,
        correlation_pairs=config.correlation_pairs,
        seed=config.seed,
    )


def encode_bundle(config: RunConfig, params: HashModelParams, bundle: DatasetBundle) -> CodeDatabase:
    return encode_dataset(params, bundle.features, config.encode_chunk)
