from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

from dtos.config import LossConfig, RunConfig, SyntheticConfig
from services.data.synthetic import generate_synthetic

if TYPE_CHECKING:
    from pathlib import Path

    from services.data.dataset import DatasetBundle


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def small_bundle() -> DatasetBundle:
    return generate_synthetic(SyntheticConfig(num_items=120, num_classes=5, feature_dim=8, label_density=0.3, seed=3))


@pytest.fixture
def loss_cfg() -> LossConfig:
    return LossConfig(bits=8)


@pytest.fixture
def run_config(tmp_path: Path) -> RunConfig:
    """合成データから評価まで数秒で回る小さな設定."""
    return RunConfig(
        work_dir=tmp_path / "run",
        num_items=150,
        num_classes=5,
        feature_dim=8,
        bits=8,
        hidden_widths=(16,),
        batch_size=16,
        max_iterations=20,
        log_every=10,
        query_size=15,
        train_size=60,
        top_n=(5, 10),
        correlation_pairs=200,
    )

