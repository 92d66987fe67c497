"""ペア類似度損失・量子化損失とその勾配.

hard ペアは交差エントロピー、soft ペアは平均二乗誤差で学習し、
量子化損失で各要素を ±1 に近づける. バッチ損失はペア平均.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import numpy as np

from app_conf import LossMode
from errors import DimensionError, EmptyBatchError, InvalidArgumentError
from services.hashing.label_similarity import PairSimilarity, SimilarityMode

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from dtos.config import LossConfig

type FloatArray = NDArray[np.float64]


def _pair_vectors(u_i: ArrayLike, u_j: ArrayLike) -> tuple[FloatArray, FloatArray]:
    a = np.asarray(u_i, dtype=np.float64)
    b = np.asarray(u_j, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        msg = f"Relaxed code length mismatch: {a.shape} != {b.shape}"
        raise DimensionError(msg)
    return a, b


def sigmoid(x: ArrayLike) -> FloatArray:
    """符号で分岐する数値的に安定なロジスティック関数."""
    arr = np.asarray(x, dtype=np.float64)
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    e = np.exp(arr[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _softplus(x: FloatArray) -> FloatArray:
    # x > 0 では x + log(1 + e^-x) としてオーバーフローを避ける
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def inner_product_logit(u_i: ArrayLike, u_j: ArrayLike, alpha: float) -> float:
    """Ω_ij = α <u_i, u_j>."""
    a, b = _pair_vectors(u_i, u_j)
    return float(alpha * (a @ b))


def cross_entropy_loss(omega: float, s: float) -> float:
    """log(1 + e^Ω) - sΩ. s は [0, 1] の任意の目標値."""
    return float(_softplus(np.asarray(omega, dtype=np.float64))) - s * omega


def hard_pair_loss(omega: float, s: int) -> float:
    """hard ペア (s ∈ {0, 1}) の負の対数尤度."""
    if s not in (0, 1):
        msg = f"Hard pair similarity must be 0 or 1, got {s}"
        raise InvalidArgumentError(msg)
    return cross_entropy_loss(omega, s)


def soft_pair_loss(u_i: ArrayLike, u_j: ArrayLike, s: float, q: int) -> float:
    """((<u_i, u_j> + q) / 2 - s q)^2. 内積は α でスケールしない."""
    a, b = _pair_vectors(u_i, u_j)
    return float(((a @ b + q) / 2.0 - s * q) ** 2)


def pair_loss(u_i: ArrayLike, u_j: ArrayLike, sim: PairSimilarity, cfg: LossConfig) -> float:
    """損失モードに応じたペア損失. joint では hard→交差エントロピー、soft→γ·MSE."""
    use_ce = cfg.mode is LossMode.CE or (cfg.mode is LossMode.JOINT and sim.is_hard)
    if use_ce:
        return cross_entropy_loss(inner_product_logit(u_i, u_j, cfg.resolved_alpha), sim.value)
    return cfg.resolved_gamma * soft_pair_loss(u_i, u_j, sim.value, cfg.bits)


def quantization_loss(u_i: ArrayLike, u_j: ArrayLike) -> float:
    """Σ_k ||u_ik| - 1| + Σ_k ||u_jk| - 1|."""
    a, b = _pair_vectors(u_i, u_j)
    return float(np.abs(np.abs(a) - 1.0).sum() + np.abs(np.abs(b) - 1.0).sum())


def quantization_subgradient(u: ArrayLike) -> FloatArray:
    """||u| - 1| の劣勾配. -1 < u < 0 で +1、0 <= u < 1 で -1."""
    arr = np.asarray(u, dtype=np.float64)
    return np.where(arr < 0, 1.0, -1.0)


@dataclass(frozen=True)
class PairBatch:
    """ミニバッチ内のペア集合.

    Attributes:
        left, right: codes の行インデックス (left[p] != right[p]).
        similarity: 各ペアの類似度 s.
        hard: 各ペアが hard か.
        codes: 緩和コード (B, q). サンプリング直後は None.
    """

    left: NDArray[np.intp]
    right: NDArray[np.intp]
    similarity: FloatArray
    hard: NDArray[np.bool_]
    codes: FloatArray | None = None

    def __post_init__(self) -> None:
        n = self.left.shape[0]
        if not (self.right.shape[0] == self.similarity.shape[0] == self.hard.shape[0] == n):
            msg = "Pair arrays must have equal length"
            raise DimensionError(msg)
        if n and (self.left == self.right).any():
            msg = "Self-pairs are not allowed in a pair batch"
            raise DimensionError(msg)

    def __len__(self) -> int:
        return self.left.shape[0]

    def with_codes(self, codes: ArrayLike) -> PairBatch:
        arr = np.asarray(codes, dtype=np.float64)
        if arr.ndim != 2:
            msg = f"Codes must be a (B, q) matrix, got shape {arr.shape}"
            raise DimensionError(msg)
        if len(self) and max(int(self.left.max()), int(self.right.max())) >= arr.shape[0]:
            msg = f"Pair index out of range for {arr.shape[0]} codes"
            raise DimensionError(msg)
        return replace(self, codes=arr)

    def pair(self, p: int) -> tuple[int, int, PairSimilarity]:
        mode = SimilarityMode.HARD if self.hard[p] else SimilarityMode.SOFT
        return int(self.left[p]), int(self.right[p]), PairSimilarity(float(self.similarity[p]), mode)


@dataclass(frozen=True)
class CostBreakdown:
    """バッチ損失の内訳 (いずれもペア平均).

    Attributes:
        total: similarity + λ·quantization.
        similarity: ペア類似度損失の平均.
        quantization: λ を掛ける前の量子化損失の平均.
    """

    total: float
    similarity: float
    quantization: float


def _checked_codes(batch: PairBatch, cfg: LossConfig) -> FloatArray:
    if len(batch) == 0:
        msg = "Cannot evaluate the cost of an empty pair batch"
        raise EmptyBatchError(msg)
    if batch.codes is None:
        msg = "Pair batch has no relaxed codes attached"
        raise DimensionError(msg)
    if batch.codes.shape[1] != cfg.bits:
        msg = f"Codes have {batch.codes.shape[1]} bits, loss config expects {cfg.bits}"
        raise DimensionError(msg)
    return batch.codes


def _ce_mask(batch: PairBatch, cfg: LossConfig) -> NDArray[np.bool_]:
    match cfg.mode:
        case LossMode.JOINT:
            return batch.hard
        case LossMode.CE:
            return np.ones(len(batch), dtype=np.bool_)
        case LossMode.MSE:
            return np.zeros(len(batch), dtype=np.bool_)


def cost_breakdown(batch: PairBatch, cfg: LossConfig) -> CostBreakdown:
    codes = _checked_codes(batch, cfg)
    u_i = codes[batch.left]
    u_j = codes[batch.right]
    inner = np.einsum("pk,pk->p", u_i, u_j)
    s = batch.similarity
    ce = _ce_mask(batch, cfg)

    omega = cfg.resolved_alpha * inner
    ce_loss = _softplus(omega) - s * omega
    mse_loss = cfg.resolved_gamma * np.square((inner + cfg.bits) / 2.0 - s * cfg.bits)
    sim = np.where(ce, ce_loss, mse_loss)
    quant = np.abs(np.abs(u_i) - 1.0).sum(axis=1) + np.abs(np.abs(u_j) - 1.0).sum(axis=1)

    sim_mean = float(sim.mean())
    quant_mean = float(quant.mean())
    return CostBreakdown(total=sim_mean + cfg.lambda_ * quant_mean, similarity=sim_mean, quantization=quant_mean)


def total_cost(batch: PairBatch, cfg: LossConfig) -> float:
    """ペア平均の [pair_loss + λ·quantization_loss]."""
    return cost_breakdown(batch, cfg).total


def cost_gradient(batch: PairBatch, cfg: LossConfig) -> FloatArray:
    """total_cost の各緩和コードに対する勾配 ∂C/∂u_i (B, q).

    ペアごとの寄与はペアの並び順に足し込むので、結果は決定的.
    """
    codes = _checked_codes(batch, cfg)
    u_i = codes[batch.left]
    u_j = codes[batch.right]
    inner = np.einsum("pk,pk->p", u_i, u_j)
    s = batch.similarity
    ce = _ce_mask(batch, cfg)

    alpha = cfg.resolved_alpha
    ce_coef = alpha * (sigmoid(alpha * inner) - s)
    mse_coef = cfg.resolved_gamma * ((inner + cfg.bits) / 2.0 - s * cfg.bits)
    coef = np.where(ce, ce_coef, mse_coef)[:, np.newaxis]

    grad = np.zeros_like(codes)
    np.add.at(grad, batch.left, coef * u_j + cfg.lambda_ * quantization_subgradient(u_i))
    np.add.at(grad, batch.right, coef * u_i + cfg.lambda_ * quantization_subgradient(u_j))
    return grad / len(batch)
