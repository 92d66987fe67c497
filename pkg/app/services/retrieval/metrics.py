"""多ラベル検索の評価指標 (ACG@n, NDCG@n, AP, MAP, WAP, precision@n).

関連度プロファイルは検索結果の順に並べた共有ラベル数 C(q, i). 項目は
C(q, i) > 0 のとき関連 (Tr(q, i) = 1). DCG の対数は底2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from errors import DimensionError, InvalidArgumentError, NoRelevantItemsError

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike, NDArray


@dataclass(frozen=True)
class RelevanceProfile:
    """検索順に並べた共有ラベル数 C(q, i)."""

    shared: NDArray[np.int64]

    def __post_init__(self) -> None:
        if self.shared.ndim != 1 or (self.shared < 0).any():
            msg = "Relevance profile must be a vector of non-negative shared-label counts"
            raise DimensionError(msg)

    @classmethod
    def of(cls, shared: ArrayLike) -> RelevanceProfile:
        return cls(np.asarray(shared, dtype=np.int64))

    def __len__(self) -> int:
        return self.shared.shape[0]

    @property
    def relevant(self) -> NDArray[np.bool_]:
        """Tr(q, i)."""
        return self.shared > 0


@dataclass(frozen=True)
class AggregateScore:
    """関連項目を持つクエリだけで平均した値と、除外したクエリ数."""

    value: float
    num_queries: int
    num_relevant_free: int


def _head(profile: RelevanceProfile, n: int) -> NDArray[np.int64]:
    if n < 1:
        msg = f"Cutoff n must be at least 1, got {n}"
        raise InvalidArgumentError(msg)
    if n > len(profile):
        msg = f"Cutoff n={n} exceeds the {len(profile)} ranked items"
        raise DimensionError(msg)
    return profile.shared[:n]


def _discounts(n: int) -> NDArray[np.float64]:
    return 1.0 / np.log2(np.arange(2, n + 2, dtype=np.float64))


def acg_at(profile: RelevanceProfile, n: int) -> float:
    """上位 n 件の共有ラベル数の平均."""
    return float(_head(profile, n).mean())


def dcg_at(profile: RelevanceProfile, n: int) -> float:
    """Σ_{i≤n} (2^C(q,i) - 1) / log2(1 + i)."""
    head = _head(profile, n)
    return float(((np.exp2(head) - 1.0) * _discounts(n)).sum())


def ndcg_at(profile: RelevanceProfile, n: int) -> float:
    """DCG@n を上位 n 件を降順に並べ替えた理想 DCG で割る. 理想 DCG が0なら0."""
    head = _head(profile, n)
    ideal = dcg_at(RelevanceProfile(np.sort(head)[::-1]), n)
    if ideal == 0:
        return 0.0
    return dcg_at(profile, n) / ideal


def precision_at(profile: RelevanceProfile, n: int) -> float:
    """上位 n 件のうち関連項目の割合."""
    return float((_head(profile, n) > 0).mean())


def has_relevant(profile: RelevanceProfile, n: int) -> bool:
    return bool(_head(profile, n).any())


def average_precision(profile: RelevanceProfile, n: int) -> float:
    """(1 / N_Tr@n) Σ_{i≤n} Tr(q,i) · N_Tr@i / i. 関連項目がなければ0."""
    relevant = _head(profile, n) > 0
    num_relevant = int(relevant.sum())
    if num_relevant == 0:
        return 0.0
    precision = np.cumsum(relevant) / np.arange(1, n + 1)
    return float(precision[relevant].sum() / num_relevant)


def _weighted_precision(profile: RelevanceProfile, n: int) -> float:
    head = _head(profile, n)
    relevant = head > 0
    num_relevant = int(relevant.sum())
    if num_relevant == 0:
        return 0.0
    acg = np.cumsum(head) / np.arange(1, n + 1)
    return float(acg[relevant].sum() / num_relevant)


def _mean_over_relevant(profiles: Sequence[RelevanceProfile], n: int, metric: str) -> AggregateScore:
    if not profiles:
        msg = f"{metric} needs at least one query"
        raise InvalidArgumentError(msg)
    per_query = average_precision if metric == "MAP" else _weighted_precision
    values = [per_query(p, n) for p in profiles if has_relevant(p, n)]
    free = len(profiles) - len(values)
    if not values:
        msg = f"{metric} is undefined: none of the {len(profiles)} queries has a relevant item in the top {n}"
        raise NoRelevantItemsError(msg)
    return AggregateScore(value=float(np.mean(values)), num_queries=len(profiles), num_relevant_free=free)


def mean_average_precision(profiles: Sequence[RelevanceProfile], n: int) -> AggregateScore:
    """上位 n 件に関連項目を持つクエリの AP 平均.

    除外の判定は上位 n 件の窓で行う (データベース全体ではない). 窓内に関連項目の
    ないクエリは平均から外し、その数を num_relevant_free で返す. n をデータベース
    全件にすればデータベース単位の除外と一致する.
    """
    return _mean_over_relevant(profiles, n, "MAP")


def weighted_average_precision(profiles: Sequence[RelevanceProfile], n: int) -> AggregateScore:
    """関連順位ごとの ACG@i を平均したもの (WAP)."""
    return _mean_over_relevant(profiles, n, "WAP")
