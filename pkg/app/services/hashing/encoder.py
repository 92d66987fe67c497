"""学習済みハッシュヘッドでデータセット全体を二値コードにする."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from app_conf import DEFAULT_ENCODE_CHUNK
from errors import DimensionError, InvalidArgumentError
from services.hashing.hash_model import forward
from services.retrieval.code_index import CodeDatabase, binarize_batch, code_bytes
from utils.logging import get_logger

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from services.hashing.hash_model import HashModelParams

logger = get_logger(__name__)


def encode_dataset(
    params: HashModelParams,
    features: ArrayLike,
    chunk: int = DEFAULT_ENCODE_CHUNK,
    *,
    ids: ArrayLike | None = None,
) -> CodeDatabase:
    """特徴量 (N, d) を chunk 行ずつ順伝播し、b = sgn(u) でパックする.

    Args:
        params (HashModelParams): ハッシュヘッド.
        features (ArrayLike): 特徴量行列.
        chunk (int): 1回の順伝播で処理する行数.
        ids (ArrayLike | None): 各行の項目ID. None なら行番号.
    """
    feats = np.asarray(features, dtype=np.float64)
    if feats.ndim != 2:
        msg = f"Features must be an (N, d) matrix, got shape {feats.shape}"
        raise DimensionError(msg)
    if chunk < 1:
        msg = f"chunk must be positive, got {chunk}"
        raise InvalidArgumentError(msg)

    packed = [binarize_batch(forward(params, feats[start : start + chunk])[0]) for start in range(0, feats.shape[0], chunk)]
    if packed:
        codes = np.concatenate(packed)
    else:
        codes = np.zeros((0, code_bytes(params.bits)), dtype=np.uint8)
    logger.debug("Encoded %d items into %d-bit codes", feats.shape[0], params.bits)
    return CodeDatabase(codes, params.bits, ids=ids)
