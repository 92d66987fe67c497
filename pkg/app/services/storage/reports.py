"""学習ログ・評価結果・ランキング・スイープ表の書き出し.

CSV の列順は DTO のフィールド順. 時刻など実行ごとに変わる値は書かない.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import TYPE_CHECKING

from dtos.reports import QueryMetrics, SweepRow, TrainStep
from utils.logging import get_logger

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from pydantic import BaseModel

    from dtos.reports import MetricsReport, TrainReport
    from services.retrieval.code_index import RankedList

logger = get_logger(__name__)

RANKING_COLUMNS = ("query_id", "rank", "item_id", "distance")


def _columns(model: type[BaseModel]) -> list[str]:
    return [field.serialization_alias or name for name, field in model.model_fields.items()]


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info("Wrote %s", path)
    return path


def _write_models(path: Path, model: type[BaseModel], rows: Sequence[BaseModel]) -> Path:
    return _write_csv(path, _columns(model), (list(r.model_dump(by_alias=True).values()) for r in rows))


def write_train_report(report: TrainReport, path: Path) -> Path:
    return _write_models(path, TrainStep, report.steps)


def write_metrics(report: MetricsReport, json_path: Path, csv_path: Path) -> None:
    """全体を JSON に、クエリ×カットオフごとの値を CSV に書く."""
    json_path = Path(json_path)
    json_path.parent.mkdir(parents=True, exist_ok=True)
    json_path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("Wrote %s", json_path)
    _write_models(csv_path, QueryMetrics, report.per_query)


def write_ranking(rankings: Sequence[tuple[int, RankedList]], path: Path) -> Path:
    """クエリごとのランキングを 1 始まりの順位付きで書く."""
    rows = (
        (query_id, rank, int(item_id), int(dist))
        for query_id, ranked in rankings
        for rank, (item_id, dist) in enumerate(zip(ranked.ids, ranked.distances, strict=True), start=1)
    )
    return _write_csv(path, RANKING_COLUMNS, rows)


def write_sweep(rows: Sequence[SweepRow], path: Path) -> Path:
    return _write_models(path, SweepRow, rows)
