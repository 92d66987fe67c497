"""特徴量・ラベル・分割をまとめたデータセット."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from errors import DatasetError, DimensionError
from services.hashing.label_similarity import as_label_matrix
from utils.logging import get_logger

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from dtos.config import SplitConfig

logger = get_logger(__name__)


@dataclass(frozen=True)
class Splits:
    """クエリ/学習/データベースの項目ID (いずれも昇順)."""

    query: NDArray[np.intp]
    train: NDArray[np.intp]
    database: NDArray[np.intp]


@dataclass(frozen=True)
class DatasetBundle:
    """N件の特徴量 (N, d) と多値ホットラベル (N, C).

    Attributes:
        features (NDArray[np.float32]): 特徴量行列.
        labels (NDArray[np.uint8]): ラベル行列. 全行が1つ以上のラベルを持つ.
    """

    features: NDArray[np.float32]
    labels: NDArray[np.uint8]

    def __post_init__(self) -> None:
        validate_bundle(self.features, self.labels)

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @property
    def num_classes(self) -> int:
        return self.labels.shape[1]

    def equals(self, other: DatasetBundle) -> bool:
        return np.array_equal(self.features, other.features) and np.array_equal(self.labels, other.labels)


def validate_bundle(features: ArrayLike, labels: ArrayLike) -> None:
    """データセットの不変条件を検証する.

    Raises:
        DimensionError: 形状が不正、または件数が一致しない場合.
        LabelError: ラベルが多値ホットでない、または空ラベル行がある場合 (行番号付き).
    """
    feats = np.asarray(features)
    labs = np.asarray(labels)
    if feats.ndim != 2 or feats.shape[0] == 0 or feats.shape[1] == 0:
        msg = f"Features must be a non-empty (N, d) matrix, got shape {feats.shape}"
        raise DimensionError(msg)
    if labs.ndim != 2 or labs.shape[0] != feats.shape[0]:
        msg = f"Labels of shape {labs.shape} do not match {feats.shape[0]} feature rows"
        raise DimensionError(msg)
    bad = np.flatnonzero(~np.isfinite(feats).all(axis=1))
    if bad.size:
        msg = f"Feature vector at record {int(bad[0])} has non-finite entries"
        raise DimensionError(msg)
    as_label_matrix(labs)


def make_bundle(features: ArrayLike, labels: ArrayLike) -> DatasetBundle:
    return DatasetBundle(
        features=np.ascontiguousarray(features, dtype=np.float32),
        labels=np.ascontiguousarray(labels, dtype=np.uint8),
    )


def split_dataset(num_items: int, cfg: SplitConfig) -> Splits:
    """シード付きシャッフルでクエリ/学習/データベースに分割する.

    データベースは既定でクエリ以外の全項目 (学習項目を含む).
    include_queries_in_database ならクエリ項目もデータベースに含める.
    """
    n_query = cfg.query_size if cfg.query_size is not None else max(1, round(num_items * cfg.query_fraction))
    n_train = cfg.train_size if cfg.train_size is not None else max(2, round(num_items * cfg.train_fraction))
    if n_query + n_train > num_items:
        msg = f"Cannot split {num_items} items into {n_query} queries and {n_train} training items"
        raise DatasetError(msg)

    perm = np.random.default_rng(cfg.seed).permutation(num_items)
    query = np.sort(perm[:n_query])
    train = np.sort(perm[n_query : n_query + n_train])
    if cfg.include_queries_in_database:
        rest = perm if not cfg.exclude_train_from_database else np.concatenate([perm[:n_query], perm[n_query + n_train :]])
    else:
        rest = perm[n_query + n_train :] if cfg.exclude_train_from_database else perm[n_query:]
    database = np.sort(rest)
    if database.size == 0:
        msg = "Split leaves the retrieval database empty"
        raise DatasetError(msg)

    logger.info("Split %d items: %d queries, %d train, %d database", num_items, query.size, train.size, database.size)
    return Splits(query=query.astype(np.intp), train=train.astype(np.intp), database=database.astype(np.intp))

