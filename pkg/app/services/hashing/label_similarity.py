"""多ラベル間の量子化類似度.

ラベルベクトル同士のコサイン類似度を求め、各ペアを hard (s=0 または s=1) と
soft (0<s<1) に分類する. hard/soft の判定は整数演算のみで行い、浮動小数点の
許容誤差は使わない.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from app_conf import SimilarityGranularity
from errors import LabelError

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike, NDArray


class SimilarityMode(str, Enum):
    HARD = "hard"
    SOFT = "soft"


@dataclass(frozen=True, slots=True)
class PairSimilarity:
    """ペアの類似度と hard/soft 区分."""

    value: float
    mode: SimilarityMode

    @property
    def is_hard(self) -> bool:
        return self.mode is SimilarityMode.HARD


def as_label_vector(labels: ArrayLike) -> NDArray[np.int64]:
    """多値ホットのラベルベクトルを検証して整数配列に変換する.

    Raises:
        LabelError: 0/1 以外の値を含む、または1つもラベルが立っていない場合.
    """
    vec = np.asarray(labels)
    if vec.ndim != 1 or vec.size == 0:
        msg = f"Label vector must be one-dimensional and non-empty, got shape {vec.shape}"
        raise LabelError(msg)
    if not np.isin(vec, (0, 1)).all():
        msg = "Label vector must be multi-hot (entries 0 or 1)"
        raise LabelError(msg)
    out = vec.astype(np.int64)
    if not out.any():
        msg = "Label vector has no set flag; cosine similarity is undefined"
        raise LabelError(msg)
    return out


def as_label_matrix(labels: ArrayLike | Sequence[ArrayLike]) -> NDArray[np.int64]:
    """ラベル行列 (N, C) を検証する. 空ラベル行はその行番号付きでエラーにする."""
    mat = np.asarray(labels)
    if mat.ndim != 2 or mat.shape[0] == 0 or mat.shape[1] == 0:
        msg = f"Label matrix must be (N, C) with N, C >= 1, got shape {mat.shape}"
        raise LabelError(msg)
    if not np.isin(mat, (0, 1)).all():
        msg = "Label matrix must be multi-hot (entries 0 or 1)"
        raise LabelError(msg)
    out = mat.astype(np.int64)
    empty = np.flatnonzero(out.sum(axis=1) == 0)
    if empty.size:
        msg = f"Label vector at record {int(empty[0])} has no set flag"
        raise LabelError(msg)
    return out


def _check_pair(l_i: ArrayLike, l_j: ArrayLike) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    a = as_label_vector(l_i)
    b = as_label_vector(l_j)
    if a.shape != b.shape:
        msg = f"Label dimension mismatch: {a.size} != {b.size}"
        raise LabelError(msg)
    return a, b


def cosine_label_similarity(l_i: ArrayLike, l_j: ArrayLike) -> float:
    """ラベルベクトルのコサイン類似度 <l_i, l_j> / (|l_i| |l_j|) を返す."""
    a, b = _check_pair(l_i, l_j)
    inner = int(a @ b)
    return float(inner / np.sqrt(float(a @ a) * float(b @ b)))


def classify_pair(l_i: ArrayLike, l_j: ArrayLike) -> PairSimilarity:
    """類似度を求め、整数演算で hard/soft を判定する."""
    a, b = _check_pair(l_i, l_j)
    inner = int(a @ b)
    norm_i = int(a @ a)
    norm_j = int(b @ b)
    if inner == 0:
        return PairSimilarity(0.0, SimilarityMode.HARD)
    if inner * inner == norm_i * norm_j:
        return PairSimilarity(1.0, SimilarityMode.HARD)
    return PairSimilarity(float(inner / np.sqrt(float(norm_i) * float(norm_j))), SimilarityMode.SOFT)


@dataclass(frozen=True)
class SimilarityMatrix:
    """対称な類似度行列. values[i, j] が類似度、hard[i, j] が hard 判定."""

    values: NDArray[np.float64]
    hard: NDArray[np.bool_]

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, index: tuple[int, int]) -> PairSimilarity:
        i, j = index
        mode = SimilarityMode.HARD if self.hard[i, j] else SimilarityMode.SOFT
        return PairSimilarity(float(self.values[i, j]), mode)


def pairwise_similarity(
    left: ArrayLike,
    right: ArrayLike | None = None,
    granularity: SimilarityGranularity = SimilarityGranularity.FINE,
) -> SimilarityMatrix:
    """ラベル行列同士の類似度をまとめて計算する.

    Args:
        left: (N, C) のラベル行列.
        right: (M, C) のラベル行列. None の場合は left 同士.
        granularity: COARSE の場合、1ラベルでも共有していれば s=1 (全ペア hard).

    Returns:
        SimilarityMatrix: (N, M) の類似度と hard 判定.
    """
    a = as_label_matrix(left)
    b = a if right is None else as_label_matrix(right)
    if a.shape[1] != b.shape[1]:
        msg = f"Label dimension mismatch: {a.shape[1]} != {b.shape[1]}"
        raise LabelError(msg)

    inner = a @ b.T
    norm_a = (a * a).sum(axis=1)
    norm_b = (b * b).sum(axis=1)

    if granularity is SimilarityGranularity.COARSE:
        values = (inner > 0).astype(np.float64)
        return SimilarityMatrix(values=values, hard=np.ones(inner.shape, dtype=np.bool_))

    norm_prod = np.outer(norm_a, norm_b)
    disjoint = inner == 0
    identical = inner * inner == norm_prod
    values = inner / np.sqrt(norm_prod.astype(np.float64))
    values[disjoint] = 0.0
    values[identical] = 1.0
    return SimilarityMatrix(values=values, hard=disjoint | identical)


def similarity_matrix(labels: ArrayLike | Sequence[ArrayLike]) -> SimilarityMatrix:
    """ラベル集合の対称な類似度行列. 対角成分は (1.0, HARD)."""
    return pairwise_similarity(labels)


def shared_label_counts(query: ArrayLike, database: ArrayLike) -> NDArray[np.int64]:
    """クエリと各データベース項目が共有するラベル数 C(q, i)."""
    q = np.asarray(query, dtype=np.int64)
    db = np.asarray(database, dtype=np.int64)
    if q.shape[-1] != db.shape[-1]:
        msg = f"Label dimension mismatch: {q.shape[-1]} != {db.shape[-1]}"
        raise LabelError(msg)
    return db @ q.T if q.ndim == 2 else db @ q
