"""ミニバッチ学習ループ.

sample → forward → cost_gradient → backward → adam_step を繰り返す.
パラメータを書き換えるのはこのモジュールだけ.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from app_conf import SimilarityGranularity
from dtos.reports import TrainReport, TrainStep
from errors import DatasetError, DimensionError, NonFiniteError, TrainingDivergedError
from services.hashing.hash_model import HashModelParams, backward, forward
from services.hashing.label_similarity import pairwise_similarity
from services.hashing.objective import PairBatch, cost_breakdown, cost_gradient
from services.hashing.optimizer import AdamState, adam_step, lr_at
from utils.logging import get_logger

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from dtos.config import LossConfig, TrainConfig
    from services.data.dataset import DatasetBundle

logger = get_logger(__name__)


def sample_batch(
    labels: NDArray[np.integer],
    batch_size: int,
    rng: np.random.Generator,
    granularity: SimilarityGranularity = SimilarityGranularity.FINE,
) -> tuple[NDArray[np.intp], PairBatch]:
    """batch_size 件を非復元で一様に選び、バッチ内の全ての無順序ペア (i < j) を作る.

    Returns:
        tuple[NDArray[np.intp], PairBatch]: 選んだ項目の行番号と、バッチ内インデックスのペア集合.

    Raises:
        DatasetError: 項目数が batch_size より少ない場合.
    """
    num_items = labels.shape[0]
    if batch_size < 2:
        msg = f"batch_size must be at least 2, got {batch_size}"
        raise DatasetError(msg)
    if num_items < batch_size:
        msg = f"Dataset has {num_items} items, fewer than batch size {batch_size}"
        raise DatasetError(msg)

    items = rng.choice(num_items, size=batch_size, replace=False).astype(np.intp)
    sims = pairwise_similarity(labels[items], granularity=granularity)
    left, right = np.triu_indices(batch_size, k=1)
    batch = PairBatch(
        left=left.astype(np.intp),
        right=right.astype(np.intp),
        similarity=sims.values[left, right],
        hard=sims.hard[left, right],
    )
    return items, batch


def train(
    dataset: DatasetBundle,
    model: HashModelParams,
    train_cfg: TrainConfig,
    loss_cfg: LossConfig,
    *,
    train_ids: NDArray[np.intp] | None = None,
) -> tuple[HashModelParams, TrainReport]:
    """ハッシュヘッドを学習する.

    Args:
        dataset (DatasetBundle): データセット.
        model (HashModelParams): 初期パラメータ. 変更しない.
        train_cfg (TrainConfig): 学習設定.
        loss_cfg (LossConfig): 損失設定.
        train_ids (NDArray[np.intp] | None): 学習に使う項目. None なら全項目.

    Returns:
        tuple[HashModelParams, TrainReport]: 学習後のパラメータとイテレーションごとのログ.

    Raises:
        DimensionError: 特徴次元やコード長がモデルと合わない場合.
        TrainingDivergedError: 損失や活性が有限でなくなった場合 (イテレーション番号付き).
    """
    if dataset.feature_dim != model.input_dim:
        msg = f"Dataset feature width {dataset.feature_dim} does not match model input {model.input_dim}"
        raise DimensionError(msg)
    if model.bits != loss_cfg.bits:
        msg = f"Model emits {model.bits} bits, loss config expects {loss_cfg.bits}"
        raise DimensionError(msg)

    ids = np.arange(len(dataset), dtype=np.intp) if train_ids is None else np.asarray(train_ids, dtype=np.intp)
    features = dataset.features[ids].astype(np.float64)
    labels = dataset.labels[ids]

    rng = np.random.default_rng(train_cfg.seed)
    params = model.copy()
    state = AdamState.zeros_like(params)
    report = TrainReport()
    logger.info(
        "Training on %d items: %d iterations, batch %d, q=%d, alpha=%.6g, gamma=%.6g, lambda=%.6g, mode=%s/%s",
        ids.size,
        train_cfg.max_iterations,
        train_cfg.batch_size,
        loss_cfg.bits,
        loss_cfg.resolved_alpha,
        loss_cfg.resolved_gamma,
        loss_cfg.lambda_,
        loss_cfg.mode.value,
        loss_cfg.similarity.value,
    )

    for iteration in range(train_cfg.max_iterations):
        items, pairs = sample_batch(labels, train_cfg.batch_size, rng, loss_cfg.similarity)
        try:
            codes, trace = forward(params, features[items])
        except NonFiniteError as exc:
            raise TrainingDivergedError(iteration, str(exc)) from exc

        batch = pairs.with_codes(codes)
        cost = cost_breakdown(batch, loss_cfg)
        if not np.isfinite(cost.total):
            raise TrainingDivergedError(iteration, f"total cost is {cost.total}")

        lr = lr_at(iteration, train_cfg)
        grads = backward(trace, params, cost_gradient(batch, loss_cfg))
        params, state = adam_step(params, grads, state, lr, train_cfg)

        report.steps.append(
            TrainStep(
                iteration=iteration,
                lr=lr,
                total_cost=cost.total,
                sim_loss=cost.similarity,
                quant_loss=cost.quantization,
            ),
        )
        if (iteration + 1) % train_cfg.log_every == 0:
            logger.info(
                "iter %d: lr=%.3g cost=%.6f (sim=%.6f, quant=%.6f)",
                iteration + 1,
                lr,
                cost.total,
                cost.similarity,
                cost.quantization,
            )

    return params, report
