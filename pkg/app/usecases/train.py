from __future__ import annotations

from typing import TYPE_CHECKING

from services.storage.checkpoint import CheckpointCodec
from services.storage.reports import write_train_report
from usecases._pipeline import fit, load_dataset, make_splits
from utils.logging import get_logger

if TYPE_CHECKING:
    from dtos.config import RunConfig
    from dtos.reports import TrainReport
    from services.hashing.hash_model import HashModelParams

logger = get_logger(__name__)


def run_train(config: RunConfig) -> tuple[HashModelParams, TrainReport]:
    """学習分割でハッシュヘッドを学習し、チェックポイントと学習ログCSVを書く.

    max_iterations=0 の場合は初期化したモデルをそのまま保存する.
    """
    bundle = load_dataset(config)
    splits = make_splits(config, bundle)
    params, report = fit(config, bundle, splits, config.loss_config())
    CheckpointCodec().write(config.checkpoint_file, params)
    write_train_report(report, config.train_report_file)
    if report.steps:
        logger.info("Training finished: cost %.6f -> %.6f", report.steps[0].total_cost, report.steps[-1].total_cost)
    return params, report
