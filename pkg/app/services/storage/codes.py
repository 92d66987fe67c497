"""二値コードファイル (SHCD).

magic, version u32, N u32, q u32, 続いて N 件のパック済みコード (各 ⌈q/8⌉ バイト).
行番号が項目IDになる.
"""

from __future__ import annotations

import numpy as np

from app_conf import CODES_MAGIC
from errors import ArtifactFormatError
from services.retrieval.code_index import CodeDatabase, code_bytes

from .base import BaseArtifactCodec, u32


class CodesCodec(BaseArtifactCodec[CodeDatabase]):
    magic = CODES_MAGIC
    kind = "code"

    def encode(self, obj: CodeDatabase) -> bytes:
        return self.header() + u32(len(obj)) + u32(obj.bits) + obj.packed.tobytes()

    def decode(self, data: bytes, source: str = "<bytes>") -> CodeDatabase:
        reader = self.open_reader(data, source)
        n = reader.u32("record count")
        bits = reader.u32("code length")
        if bits == 0:
            msg = f"{source}: code length must be positive"
            raise ArtifactFormatError(msg)
        width = code_bytes(bits)
        packed = reader.array(np.uint8, n * width, "packed codes").reshape(n, width)
        reader.finish()
        pad_bits = width * 8 - bits
        if pad_bits:
            dirty = np.flatnonzero(packed[:, -1] >> np.uint8(8 - pad_bits))
            if dirty.size:
                msg = f"{source}: record {int(dirty[0])} has non-zero pad bits"
                raise ArtifactFormatError(msg)
        return CodeDatabase(packed, bits)
