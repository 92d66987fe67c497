from __future__ import annotations

from typing import TYPE_CHECKING

from services.data.synthetic import generate_synthetic
from services.storage.dataset_files import export_bundle
from utils.logging import get_logger

if TYPE_CHECKING:
    from dtos.config import RunConfig
    from services.data.dataset import DatasetBundle

logger = get_logger(__name__)


def run_generate(config: RunConfig) -> DatasetBundle:
    """合成データセットを生成し、特徴量/ラベルファイルに書き出す."""
    bundle = generate_synthetic(config.synthetic_config())
    export_bundle(bundle, config.features_file, config.labels_file)
    return bundle
