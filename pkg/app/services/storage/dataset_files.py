"""特徴量ファイル (SHFT) とラベルファイル (SHLB).

SHFT: magic, version u32, N u32, d u32, N·d 個の float32 (行優先).
SHLB: magic, version u32, N u32, C u32, N·C バイトの 0/1.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import NDArray

from app_conf import FEATURES_MAGIC, LABELS_MAGIC
from errors import ArtifactFormatError
from services.data.dataset import DatasetBundle, make_bundle
from utils.logging import get_logger

from .base import BaseArtifactCodec, u32

if TYPE_CHECKING:
    from pathlib import Path

logger = get_logger(__name__)


class FeaturesCodec(BaseArtifactCodec[NDArray[np.float32]]):
    magic = FEATURES_MAGIC
    kind = "feature"

    def encode(self, obj: NDArray[np.float32]) -> bytes:
        feats = np.ascontiguousarray(obj, dtype="<f4")
        if feats.ndim != 2:
            msg = f"Feature matrix must be (N, d), got shape {feats.shape}"
            raise ArtifactFormatError(msg)
        n, d = feats.shape
        return self.header() + u32(n) + u32(d) + feats.tobytes()

    def decode(self, data: bytes, source: str = "<bytes>") -> NDArray[np.float32]:
        reader = self.open_reader(data, source)
        n = reader.u32("record count")
        d = reader.u32("feature width")
        if n == 0 or d == 0:
            msg = f"{source}: feature file declares an empty matrix ({n} x {d})"
            raise ArtifactFormatError(msg)
        feats = reader.array("<f4", n * d, "feature values").reshape(n, d).astype(np.float32)
        reader.finish()
        bad = np.flatnonzero(~np.isfinite(feats).all(axis=1))
        if bad.size:
            msg = f"{source}: record {int(bad[0])} has non-finite feature values"
            raise ArtifactFormatError(msg)
        return feats


class LabelsCodec(BaseArtifactCodec[NDArray[np.uint8]]):
    magic = LABELS_MAGIC
    kind = "label"

    def encode(self, obj: NDArray[np.uint8]) -> bytes:
        labels = np.ascontiguousarray(obj, dtype=np.uint8)
        if labels.ndim != 2:
            msg = f"Label matrix must be (N, C), got shape {labels.shape}"
            raise ArtifactFormatError(msg)
        n, c = labels.shape
        return self.header() + u32(n) + u32(c) + labels.tobytes()

    def decode(self, data: bytes, source: str = "<bytes>") -> NDArray[np.uint8]:
        reader = self.open_reader(data, source)
        n = reader.u32("record count")
        c = reader.u32("class count")
        if n == 0 or c == 0:
            msg = f"{source}: label file declares an empty matrix ({n} x {c})"
            raise ArtifactFormatError(msg)
        labels = reader.array(np.uint8, n * c, "label flags").reshape(n, c)
        reader.finish()
        non_binary = np.flatnonzero((labels > 1).any(axis=1))
        if non_binary.size:
            msg = f"{source}: record {int(non_binary[0])} has a label flag other than 0/1"
            raise ArtifactFormatError(msg)
        empty = np.flatnonzero(~labels.any(axis=1))
        if empty.size:
            msg = f"{source}: record {int(empty[0])} has no label"
            raise ArtifactFormatError(msg)
        return labels


def export_bundle(bundle: DatasetBundle, features_path: Path, labels_path: Path) -> None:
    """データセットを SHFT/SHLB の2ファイルに書き出す."""
    FeaturesCodec().write(features_path, bundle.features)
    LabelsCodec().write(labels_path, bundle.labels)


def ingest(features_path: Path, labels_path: Path) -> DatasetBundle:
    """SHFT/SHLB を読み込み、件数の一致と不変条件を検証したデータセットを返す.

    Raises:
        ArtifactFormatError: どちらかのファイルが不正、または件数が一致しない場合.
    """
    features = FeaturesCodec().read(features_path)
    labels = LabelsCodec().read(labels_path)
    if features.shape[0] != labels.shape[0]:
        msg = f"{features_path} has {features.shape[0]} records but {labels_path} has {labels.shape[0]}"
        raise ArtifactFormatError(msg)
    bundle = make_bundle(features, labels)
    logger.info("Ingested %d items (d=%d, C=%d)", len(bundle), bundle.feature_dim, bundle.num_classes)
    return bundle
