"""バイナリ成果物ファイルの共通処理.

全形式とも先頭に magic (4バイト) と version (u32) を持ち、以降もリトルエンディアン.
"""

from __future__ import annotations

import struct
from abc import ABC, abstractmethod
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from app_conf import FORMAT_VERSION
from errors import ArtifactFormatError
from utils.logging import get_logger

if TYPE_CHECKING:
    from numpy.typing import DTypeLike, NDArray

logger = get_logger(__name__)

_U32 = struct.Struct("<I")


class ByteReader:
    """先頭から順に読み進めるカーソル. 不足があれば ArtifactFormatError."""

    def __init__(self, data: bytes, source: str) -> None:
        self.data = data
        self.source = source
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            msg = f"{self.source}: truncated while reading {what} (need {size} bytes at offset {self.offset}, file has {len(self.data)})"
            raise ArtifactFormatError(msg)
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def u32(self, what: str) -> int:
        return _U32.unpack(self.take(_U32.size, what))[0]

    def array(self, dtype: DTypeLike, count: int, what: str) -> NDArray:
        dt = np.dtype(dtype)
        return np.frombuffer(self.take(dt.itemsize * count, what), dtype=dt, count=count).copy()

    def finish(self) -> None:
        if self.offset != len(self.data):
            msg = f"{self.source}: {len(self.data) - self.offset} unexpected trailing bytes"
            raise ArtifactFormatError(msg)


def u32(value: int) -> bytes:
    return _U32.pack(value)


class BaseArtifactCodec[T](ABC):
    """成果物1種類分のエンコード/デコード.

    Attributes:
        magic (bytes): ファイル先頭の4バイト.
        kind (str): ログとエラーメッセージ用の名前.
    """

    magic: bytes
    kind: str
    version: int = FORMAT_VERSION

    def header(self) -> bytes:
        return self.magic + u32(self.version)

    def open_reader(self, data: bytes, source: str) -> ByteReader:
        """magic と version を検証し、本体位置のリーダーを返す."""
        reader = ByteReader(data, source)
        magic = reader.take(len(self.magic), "magic")
        if magic != self.magic:
            msg = f"{source}: not a {self.kind} file (magic {magic!r}, expected {self.magic!r})"
            raise ArtifactFormatError(msg)
        version = reader.u32("version")
        if version != self.version:
            msg = f"{source}: unsupported {self.kind} format version {version}"
            raise ArtifactFormatError(msg)
        return reader

    @abstractmethod
    def encode(self, obj: T) -> bytes:
        """オブジェクトをファイル内容のバイト列にする."""

    @abstractmethod
    def decode(self, data: bytes, source: str = "<bytes>") -> T:
        """バイト列からオブジェクトを復元する.

        Raises:
            ArtifactFormatError: magic/version の不一致、切り詰め、不整合.
        """

    def write(self, path: Path, obj: T) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.encode(obj))
        logger.info("Wrote %s to %s", self.kind, path)
        return path

    def read(self, path: Path) -> T:
        path = Path(path)
        obj = self.decode(path.read_bytes(), str(path))
        logger.debug("Read %s from %s", self.kind, path)
        return obj
