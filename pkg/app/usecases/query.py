from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from errors import DatasetError
from services.retrieval.code_index import rank_database
from services.storage.reports import write_ranking
from usecases._pipeline import load_codes, load_dataset, make_splits
from utils.logging import get_logger

if TYPE_CHECKING:
    from dtos.config import RunConfig
    from services.retrieval.code_index import RankedList

logger = get_logger(__name__)


def run_query(config: RunConfig) -> list[tuple[int, RankedList]]:
    """指定クエリIDのランキング上位 max(top_n) 件をCSVに書く.

    query_ids が空ならクエリ分割の全項目を使う.
    """
    bundle = load_dataset(config)
    codes = load_codes(config)
    splits = make_splits(config, bundle)
    database = codes.subset(splits.database)

    query_ids = np.asarray(config.query_ids, dtype=np.intp) if config.query_ids else splits.query
    out_of_range = query_ids[(query_ids < 0) | (query_ids >= len(codes))]
    if out_of_range.size:
        msg = f"Query id {int(out_of_range[0])} is outside the {len(codes)} encoded items"
        raise DatasetError(msg)

    depth = max(config.top_n)
    rankings: list[tuple[int, RankedList]] = []
    for query_id in query_ids:
        ranked = rank_database(codes.code(int(query_id)), database)
        if config.exclude_self_match:
            ranked = ranked.without(int(query_id))
        rankings.append((int(query_id), ranked.top(depth)))
        logger.debug("Query %d: nearest distance %s", query_id, ranked.distances[:1])

    write_ranking(rankings, config.ranking_file)
    logger.info("Ranked %d queries against %d database items", len(rankings), len(database))
    return rankings
