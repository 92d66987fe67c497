"""類似度保存の診断指標."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from scipy.stats import spearmanr

from errors import DimensionError, InvalidArgumentError
from services.hashing.label_similarity import as_label_matrix
from utils.logging import get_logger

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from services.retrieval.code_index import CodeDatabase

logger = get_logger(__name__)


def rank_correlation(
    query_codes: CodeDatabase,
    query_labels: ArrayLike,
    db_codes: CodeDatabase,
    db_labels: ArrayLike,
    num_pairs: int,
    rng: np.random.Generator,
) -> float | None:
    """ランダムに選んだクエリ-データベース対で、ラベル類似度とコード内積のスピアマン相関を求める.

    Returns:
        float | None: 相関係数. どちらかが定数で定義できない場合は None.
    """
    q_labels = as_label_matrix(query_labels)
    d_labels = as_label_matrix(db_labels)
    if q_labels.shape[0] != len(query_codes) or d_labels.shape[0] != len(db_codes):
        msg = "Label rows must match the number of codes"
        raise DimensionError(msg)
    if num_pairs < 2:
        msg = f"Need at least 2 pairs for a rank correlation, got {num_pairs}"
        raise InvalidArgumentError(msg)

    qi = rng.integers(len(query_codes), size=num_pairs)
    di = rng.integers(len(db_codes), size=num_pairs)

    left = q_labels[qi]
    right = d_labels[di]
    inner = (left * right).sum(axis=1)
    similarity = inner / np.sqrt((left * left).sum(axis=1) * (right * right).sum(axis=1))

    q_signs = query_codes.signs().astype(np.int64)
    d_signs = db_codes.signs().astype(np.int64)
    code_inner = (q_signs[qi] * d_signs[di]).sum(axis=1)

    if np.ptp(similarity) == 0 or np.ptp(code_inner) == 0:
        logger.warning("Rank correlation undefined: one side of the %d sampled pairs is constant", num_pairs)
        return None
    rho = float(spearmanr(similarity, code_inner).statistic)
    logger.debug("Spearman correlation over %d pairs: %.4f", num_pairs, rho)
    return rho
