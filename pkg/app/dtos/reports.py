"""学習・評価・スイープの結果DTO.

フィールド順がそのまま JSON/CSV の列順になるので、並びを変えないこと.
"""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, Field


class TrainStep(BaseModel):
    """1イテレーション分の学習ログ.

    Attributes:
        iteration (int): 0 始まりのイテレーション番号.
        lr (float): そのイテレーションの学習率.
        total_cost (float): sim_loss + λ·quant_loss.
        sim_loss (float): ペア類似度損失の平均.
        quant_loss (float): 量子化損失の平均 (λ を掛ける前).
    """

    iteration: int
    lr: float
    total_cost: float
    sim_loss: float
    quant_loss: float


class TrainReport(BaseModel):
    steps: list[TrainStep] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def costs(self) -> list[float]:
        return [s.total_cost for s in self.steps]

    def smoothed_costs(self, window: int = 50) -> list[float]:
        """末尾 window 件の移動平均 (先頭は利用できる件数で平均)."""
        costs = np.asarray(self.costs)
        if costs.size == 0:
            return []
        cumsum = np.concatenate([[0.0], np.cumsum(costs)])
        idx = np.arange(1, costs.size + 1)
        start = np.maximum(idx - window, 0)
        return ((cumsum[idx] - cumsum[start]) / (idx - start)).tolist()


class QueryMetrics(BaseModel):
    """1クエリ・1カットオフ n の評価値."""

    query_id: int
    n: int
    acg: float
    dcg: float
    ndcg: float
    ap: float
    wap: float
    precision: float
    relevant_free: bool


class AggregateMetrics(BaseModel):
    """カットオフ n での全クエリ集計.

    map/wap は関連項目を持つクエリだけの平均で、除外数は num_relevant_free.
    """

    n: int
    acg: float
    ndcg: float
    map: float
    wap: float
    precision: float
    num_queries: int
    num_relevant_free: int


class MetricsReport(BaseModel):
    num_queries: int
    database_size: int
    n_values: list[int]
    map_full_database: float
    spearman: float | None = None
    aggregates: list[AggregateMetrics]
    per_query: list[QueryMetrics]

    def aggregate_at(self, n: int) -> AggregateMetrics:
        for agg in self.aggregates:
            if agg.n == n:
                return agg
        msg = f"No aggregate for n={n}"
        raise KeyError(msg)


class SweepRow(BaseModel):
    """スイープ1点分の結果. 評価値は最初のカットオフ n のもの."""

    bits: int
    alpha: float
    gamma: float
    lambda_: float = Field(serialization_alias="lambda")
    final_cost: float
    n: int
    map: float
    wap: float
    acg: float
    ndcg: float
    precision: float
    map_full_database: float
