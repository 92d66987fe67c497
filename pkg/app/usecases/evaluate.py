from __future__ import annotations

from typing import TYPE_CHECKING

from services.storage.reports import write_metrics
from usecases._pipeline import evaluate_codes, load_codes, load_dataset, make_splits
from utils.logging import get_logger

if TYPE_CHECKING:
    from dtos.config import RunConfig
    from dtos.reports import MetricsReport

logger = get_logger(__name__)


def run_evaluate(config: RunConfig) -> MetricsReport:
    """コードファイルを読み、クエリ分割の検索性能を JSON/CSV に書く."""
    bundle = load_dataset(config)
    codes = load_codes(config)
    report = evaluate_codes(config, codes, bundle, make_splits(config, bundle))
    write_metrics(report, config.metrics_json_file, config.metrics_csv_file)
    return report
