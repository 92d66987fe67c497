"""ハッシュヘッドのチェックポイント (SHMD).

magic, version u32, 層数 u32, 各層について rows u32, cols u32,
W (rows·cols 個の float64, 行優先), b (rows 個の float64).
"""

from __future__ import annotations

import numpy as np

from app_conf import CHECKPOINT_MAGIC
from errors import ArtifactFormatError, DimensionError
from services.hashing.hash_model import HashModelParams, Layer

from .base import BaseArtifactCodec, u32


class CheckpointCodec(BaseArtifactCodec[HashModelParams]):
    magic = CHECKPOINT_MAGIC
    kind = "checkpoint"

    def encode(self, obj: HashModelParams) -> bytes:
        out = [self.header(), u32(len(obj.layers))]
        for layer in obj.layers:
            rows, cols = layer.weight.shape
            out.extend(
                (
                    u32(rows),
                    u32(cols),
                    np.ascontiguousarray(layer.weight, dtype="<f8").tobytes(),
                    np.ascontiguousarray(layer.bias, dtype="<f8").tobytes(),
                ),
            )
        return b"".join(out)

    def decode(self, data: bytes, source: str = "<bytes>") -> HashModelParams:
        reader = self.open_reader(data, source)
        count = reader.u32("layer count")
        if count == 0:
            msg = f"{source}: checkpoint has no layers"
            raise ArtifactFormatError(msg)
        layers = []
        for k in range(count):
            rows = reader.u32(f"layer {k} rows")
            cols = reader.u32(f"layer {k} cols")
            weight = reader.array("<f8", rows * cols, f"layer {k} weights").reshape(rows, cols).astype(np.float64)
            bias = reader.array("<f8", rows, f"layer {k} bias").astype(np.float64)
            if not (np.isfinite(weight).all() and np.isfinite(bias).all()):
                msg = f"{source}: layer {k} has non-finite parameters"
                raise ArtifactFormatError(msg)
            layers.append(Layer(weight, bias))
        reader.finish()
        try:
            return HashModelParams(layers)
        except DimensionError as exc:
            msg = f"{source}: {exc}"
            raise ArtifactFormatError(msg) from exc

