from __future__ import annotations

from typing import TYPE_CHECKING

from services.storage.codes import CodesCodec
from usecases._pipeline import encode_bundle, load_dataset, load_model
from utils.logging import get_logger

if TYPE_CHECKING:
    from dtos.config import RunConfig
    from services.retrieval.code_index import CodeDatabase

logger = get_logger(__name__)


def run_encode(config: RunConfig) -> CodeDatabase:
    """データセット全件を符号化してコードファイルに書く. 行番号が項目IDになる."""
    bundle = load_dataset(config)
    params = load_model(config)
    codes = encode_bundle(config, params, bundle)
    CodesCodec().write(config.codes_file, codes)
    return codes
