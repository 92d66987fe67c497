"""クエリ集合に対する検索評価.

各クエリをハミング距離でランキングし、共有ラベル数から関連度プロファイルを作って
各カットオフ n の指標と、データベース全体での MAP を求める.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING

import numpy as np

from dtos.reports import AggregateMetrics, MetricsReport, QueryMetrics
from errors import DimensionError, InvalidArgumentError
from services.hashing.label_similarity import as_label_matrix, shared_label_counts
from services.retrieval.code_index import rank_database
from services.retrieval.diagnostics import rank_correlation
from services.retrieval.metrics import (
    RelevanceProfile,
    acg_at,
    average_precision,
    dcg_at,
    has_relevant,
    mean_average_precision,
    ndcg_at,
    precision_at,
    weighted_average_precision,
)
from utils.logging import get_logger

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike

    from services.retrieval.code_index import CodeDatabase

logger = get_logger(__name__)


def relevance_profiles(
    query_codes: CodeDatabase,
    query_labels: ArrayLike,
    db_codes: CodeDatabase,
    db_labels: ArrayLike,
    *,
    exclude_self_match: bool = True,
    threads: int = 1,
) -> list[RelevanceProfile]:
    """各クエリのランキングに沿った共有ラベル数を求める.

    exclude_self_match のとき、クエリと同じIDのデータベース項目はランキングから除く.
    結果はクエリの並び順で返る (threads によらない).
    """
    q_labels = as_label_matrix(query_labels)
    d_labels = as_label_matrix(db_labels)
    if q_labels.shape[0] != len(query_codes) or d_labels.shape[0] != len(db_codes):
        msg = "Label rows must match the number of codes"
        raise DimensionError(msg)
    if q_labels.shape[1] != d_labels.shape[1]:
        msg = f"Query labels have {q_labels.shape[1]} classes, database labels {d_labels.shape[1]}"
        raise DimensionError(msg)
    if len(db_codes) == 0:
        msg = "Retrieval database is empty"
        raise DimensionError(msg)

    def _profile(k: int) -> RelevanceProfile:
        ranked = rank_database(query_codes.code(k), db_codes)
        if exclude_self_match:
            ranked = ranked.without(int(query_codes.ids[k]))
        return RelevanceProfile(shared_label_counts(q_labels[k], d_labels[ranked.rows]))

    if threads <= 1:
        return [_profile(k) for k in range(len(query_codes))]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_profile, range(len(query_codes))))


def evaluate(
    query_codes: CodeDatabase,
    query_labels: ArrayLike,
    db_codes: CodeDatabase,
    db_labels: ArrayLike,
    n_values: Sequence[int],
    *,
    exclude_self_match: bool = True,
    threads: int = 1,
    correlation_pairs: int = 0,
    seed: int = 0,
) -> MetricsReport:
    """全指標を各カットオフで計算して MetricsReport にまとめる.

    Args:
        query_codes (CodeDatabase): クエリのコード (ids は項目ID).
        query_labels (ArrayLike): クエリのラベル (N_q, C).
        db_codes (CodeDatabase): データベースのコード (ids は項目ID).
        db_labels (ArrayLike): データベースのラベル (N_db, C).
        n_values (Sequence[int]): カットオフ n のリスト.
        exclude_self_match (bool): 同じIDの項目を自分自身の検索結果から除くか.
        threads (int): クエリ単位の並列数. 1 なら逐次.
        correlation_pairs (int): スピアマン相関に使う対の数. 0 なら計算しない.
        seed (int): 相関の対サンプリングに使うシード.
    """
    if not n_values:
        msg = "At least one cutoff n is required"
        raise InvalidArgumentError(msg)
    profiles = relevance_profiles(
        query_codes,
        query_labels,
        db_codes,
        db_labels,
        exclude_self_match=exclude_self_match,
        threads=threads,
    )
    depth = min(len(p) for p in profiles)

    per_query: list[QueryMetrics] = []
    aggregates: list[AggregateMetrics] = []
    for n in n_values:
        rows = [
            QueryMetrics(
                query_id=int(query_codes.ids[k]),
                n=n,
                acg=acg_at(p, n),
                dcg=dcg_at(p, n),
                ndcg=ndcg_at(p, n),
                ap=average_precision(p, n),
                wap=_query_wap(p, n),
                precision=precision_at(p, n),
                relevant_free=not has_relevant(p, n),
            )
            for k, p in enumerate(profiles)
        ]
        map_score = mean_average_precision(profiles, n)
        wap_score = weighted_average_precision(profiles, n)
        if map_score.num_relevant_free:
            logger.warning("%d of %d queries have no relevant item in the top %d", map_score.num_relevant_free, len(profiles), n)
        aggregates.append(
            AggregateMetrics(
                n=n,
                acg=float(np.mean([r.acg for r in rows])),
                ndcg=float(np.mean([r.ndcg for r in rows])),
                map=map_score.value,
                wap=wap_score.value,
                precision=float(np.mean([r.precision for r in rows])),
                num_queries=len(rows),
                num_relevant_free=map_score.num_relevant_free,
            ),
        )
        per_query.extend(rows)

    full = mean_average_precision(profiles, depth).value
    spearman = None
    if correlation_pairs > 0:
        spearman = rank_correlation(
            query_codes,
            query_labels,
            db_codes,
            db_labels,
            correlation_pairs,
            np.random.default_rng(seed),
        )

    for agg in aggregates:
        logger.info("n=%d: MAP=%.4f WAP=%.4f ACG=%.4f NDCG=%.4f P=%.4f", agg.n, agg.map, agg.wap, agg.acg, agg.ndcg, agg.precision)
    logger.info("MAP over the full database: %.4f", full)

    return MetricsReport(
        num_queries=len(profiles),
        database_size=len(db_codes),
        n_values=list(n_values),
        map_full_database=full,
        spearman=spearman,
        aggregates=aggregates,
        per_query=per_query,
    )


def _query_wap(profile: RelevanceProfile, n: int) -> float:
    return weighted_average_precision([profile], n).value if has_relevant(profile, n) else 0.0
