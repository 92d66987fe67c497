"""合成多ラベルデータの生成.

各クラスにガウス分布のプロトタイプベクトルを割り当て、項目の特徴量は
持っているラベルのプロトタイプの和に等方ノイズを足したものとする.
共有ラベルが多い項目ほど特徴空間で近くなる.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from services.data.dataset import DatasetBundle, make_bundle
from utils.logging import get_logger

if TYPE_CHECKING:
    from dtos.config import SyntheticConfig

logger = get_logger(__name__)


def generate_synthetic(cfg: SyntheticConfig) -> DatasetBundle:
    """合成データセットを生成する.

    各クラスは独立に確率 label_density で付与され、空ラベルの行は引き直す.
    """
    rng = np.random.default_rng(cfg.seed)
    prototypes = rng.normal(size=(cfg.num_classes, cfg.feature_dim))

    labels = rng.random((cfg.num_items, cfg.num_classes)) < cfg.label_density
    empty = np.flatnonzero(~labels.any(axis=1))
    resampled = 0
    while empty.size:
        labels[empty] = rng.random((empty.size, cfg.num_classes)) < cfg.label_density
        resampled += empty.size
        empty = empty[~labels[empty].any(axis=1)]

    # 行ごとに同じ順序で足し込むので、同じラベル集合は同じ特徴量になる
    features = np.zeros((cfg.num_items, cfg.feature_dim))
    for c in range(cfg.num_classes):
        features += labels[:, c, np.newaxis] * prototypes[c]
    if cfg.noise > 0:
        features += cfg.noise * rng.normal(size=features.shape)

    logger.info(
        "Generated %d items (%d classes, d=%d); %d empty label draws resampled",
        cfg.num_items,
        cfg.num_classes,
        cfg.feature_dim,
        resampled,
    )
    return make_bundle(features, labels)
