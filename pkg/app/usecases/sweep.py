from __future__ import annotations

import itertools
import math
from typing import TYPE_CHECKING

from dtos.reports import SweepRow
from services.storage.reports import write_sweep
from usecases._pipeline import encode_bundle, evaluate_codes, fit, load_dataset, make_splits
from utils.logging import get_logger

if TYPE_CHECKING:
    from dtos.config import RunConfig

logger = get_logger(__name__)


def run_sweep(config: RunConfig) -> list[SweepRow]:
    """{q} × {α} × {γ} × {λ} の格子で学習・符号化・評価を繰り返し、1つの表にまとめる.

    空のリストは現在の設定値1点として扱う. α/γ を固定していなければ q ごとに既定値を解決し直す.
    評価値は top_n の先頭のカットオフのもの.
    """
    bundle = load_dataset(config)
    splits = make_splits(config, bundle)
    grid = list(
        itertools.product(
            config.sweep_bits or (config.bits,),
            config.sweep_alpha or (None,),
            config.sweep_gamma or (None,),
            config.sweep_lambda or (None,),
        ),
    )
    logger.info("Sweeping %d configurations", len(grid))

    n = config.top_n[0]
    rows: list[SweepRow] = []
    for k, (bits, alpha, gamma, lambda_) in enumerate(grid, start=1):
        loss_cfg = config.loss_config(bits=bits, alpha=alpha, gamma=gamma, lambda_=lambda_)
        logger.info(
            "[%d/%d] q=%d alpha=%.6g gamma=%.6g lambda=%.6g",
            k,
            len(grid),
            loss_cfg.bits,
            loss_cfg.resolved_alpha,
            loss_cfg.resolved_gamma,
            loss_cfg.lambda_,
        )
        params, train_report = fit(config, bundle, splits, loss_cfg)
        metrics = evaluate_codes(config, encode_bundle(config, params, bundle), bundle, splits)
        agg = metrics.aggregate_at(n)
        rows.append(
            SweepRow(
                bits=loss_cfg.bits,
                alpha=loss_cfg.resolved_alpha,
                gamma=loss_cfg.resolved_gamma,
                lambda_=loss_cfg.lambda_,
                final_cost=train_report.steps[-1].total_cost if train_report.steps else math.nan,
                n=n,
                map=agg.map,
                wap=agg.wap,
                acg=agg.acg,
                ndcg=agg.ndcg,
                precision=agg.precision,
                map_full_database=metrics.map_full_database,
            ),
        )

    write_sweep(rows, config.sweep_file)
    return rows
