"""二値コードの符号化とハミング距離ランキング.

b_k = +1 をビット1、b_k = -1 をビット0 として、各バイトの下位ビットから詰める.
q を超えるパディングビットは常に0. 距離計算では 8 バイト境界までゼロ詰めし、
リトルエンディアンの uint64 語ごとに XOR + popcount を取る.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from errors import DimensionError

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike, NDArray


def code_bytes(bits: int) -> int:
    """q ビットのコード1件に必要なバイト数 ⌈q/8⌉."""
    return (bits + 7) // 8


def _word_view(packed: NDArray[np.uint8]) -> NDArray[np.uint64]:
    """(N, nbytes) のバイト列を (N, nwords) の uint64 語として見る."""
    n, nbytes = packed.shape
    pad = -nbytes % 8
    if pad:
        packed = np.concatenate([packed, np.zeros((n, pad), dtype=np.uint8)], axis=1)
    return np.ascontiguousarray(packed).view("<u8")


@dataclass(frozen=True)
class BinaryCode:
    """1件の q ビット二値コード (パック済み)."""

    bits: int
    packed: NDArray[np.uint8]

    def __post_init__(self) -> None:
        if self.packed.shape != (code_bytes(self.bits),):
            msg = f"{self.bits}-bit code needs {code_bytes(self.bits)} bytes, got {self.packed.shape}"
            raise DimensionError(msg)
        self.packed.setflags(write=False)

    def signs(self) -> NDArray[np.int8]:
        """{-1, +1}^q に展開する."""
        return unpack_signs(self.packed[np.newaxis, :], self.bits)[0]

    def complement(self) -> BinaryCode:
        return pack_signs(-self.signs().astype(np.int64))


def pack_signs(signs: ArrayLike) -> BinaryCode:
    """{-1, +1} のベクトルを BinaryCode にパックする."""
    arr = np.asarray(signs)
    if arr.ndim != 1 or arr.size == 0 or not np.isin(arr, (-1, 1)).all():
        msg = "Sign vector must be a non-empty sequence of -1/+1"
        raise DimensionError(msg)
    return BinaryCode(bits=arr.size, packed=np.packbits(arr > 0, bitorder="little"))


def unpack_signs(packed: NDArray[np.uint8], bits: int) -> NDArray[np.int8]:
    """(N, nbytes) のパック済みコードを (N, q) の {-1, +1} に展開する."""
    bools = np.unpackbits(packed, axis=1, count=bits, bitorder="little")
    return (bools.astype(np.int8) * 2 - 1).astype(np.int8)


def binarize(u: ArrayLike) -> BinaryCode:
    """b_k = sgn(u_k). sgn(0) = +1."""
    arr = np.asarray(u, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        msg = f"Relaxed code must be a non-empty vector, got shape {arr.shape}"
        raise DimensionError(msg)
    return BinaryCode(bits=arr.size, packed=np.packbits(arr >= 0, bitorder="little"))


def binarize_batch(u: ArrayLike) -> NDArray[np.uint8]:
    """(N, q) の緩和コードをまとめて (N, ⌈q/8⌉) にパックする."""
    arr = np.asarray(u, dtype=np.float64)
    if arr.ndim != 2:
        msg = f"Relaxed codes must be an (N, q) matrix, got shape {arr.shape}"
        raise DimensionError(msg)
    return np.packbits(arr >= 0, axis=1, bitorder="little")


def _check_same_length(a: BinaryCode, b: BinaryCode) -> None:
    if a.bits != b.bits:
        msg = f"Code length mismatch: {a.bits} != {b.bits}"
        raise DimensionError(msg)


def hamming(a: BinaryCode, b: BinaryCode) -> int:
    """異なるビット位置の数 (XOR の popcount)."""
    _check_same_length(a, b)
    xor = _word_view(a.packed[np.newaxis, :]) ^ _word_view(b.packed[np.newaxis, :])
    return int(np.bitwise_count(xor).sum())


def inner_product(a: BinaryCode, b: BinaryCode) -> int:
    """<b_i, b_j> = q - 2·hamming."""
    return a.bits - 2 * hamming(a, b)


class CodeDatabase:
    """同じ長さの二値コードを (N, nbytes) に並べた読み取り専用のデータベース.

    行番号がそのまま項目IDになる (ids を与えた場合はそちら).
    """

    def __init__(self, packed: ArrayLike, bits: int, ids: ArrayLike | None = None) -> None:
        arr = np.ascontiguousarray(packed, dtype=np.uint8)
        if arr.ndim != 2 or arr.shape[1] != code_bytes(bits):
            msg = f"Packed codes must have shape (N, {code_bytes(bits)}) for {bits} bits, got {arr.shape}"
            raise DimensionError(msg)
        pad_bits = arr.shape[1] * 8 - bits
        if pad_bits and (arr[:, -1] >> np.uint8(8 - pad_bits)).any():
            msg = "Packed codes have non-zero pad bits"
            raise DimensionError(msg)
        self.bits = bits
        self.packed = arr
        self.packed.setflags(write=False)
        self._words = _word_view(arr)
        self._words.setflags(write=False)
        id_arr = np.arange(arr.shape[0], dtype=np.int64) if ids is None else np.array(ids, dtype=np.int64)
        if id_arr.shape != (arr.shape[0],):
            msg = f"Expected {arr.shape[0]} ids, got {id_arr.shape}"
            raise DimensionError(msg)
        self.ids = id_arr
        self.ids.setflags(write=False)

    def __len__(self) -> int:
        return self.packed.shape[0]

    @classmethod
    def from_codes(cls, codes: Sequence[BinaryCode]) -> CodeDatabase:
        if not codes:
            msg = "Cannot build a code database from no codes"
            raise DimensionError(msg)
        bits = codes[0].bits
        if any(c.bits != bits for c in codes):
            msg = "All codes in a database must share one code length"
            raise DimensionError(msg)
        return cls(np.stack([c.packed for c in codes]), bits)

    def code(self, row: int) -> BinaryCode:
        return BinaryCode(bits=self.bits, packed=self.packed[row].copy())

    def subset(self, rows: ArrayLike) -> CodeDatabase:
        idx = np.asarray(rows, dtype=np.intp)
        return CodeDatabase(self.packed[idx], self.bits, ids=self.ids[idx])

    def distances(self, query: BinaryCode) -> NDArray[np.int64]:
        """全項目とのハミング距離 (線形走査)."""
        if query.bits != self.bits:
            msg = f"Query has {query.bits} bits, database has {self.bits}"
            raise DimensionError(msg)
        q_words = _word_view(query.packed[np.newaxis, :])
        return np.bitwise_count(self._words ^ q_words).sum(axis=1, dtype=np.int64)

    def signs(self) -> NDArray[np.int8]:
        return unpack_signs(self.packed, self.bits)


@dataclass(frozen=True)
class RankedList:
    """距離昇順 (同距離は ID 昇順) に並べた項目IDと距離.

    rows はデータベース内の行番号で、ラベルなど行単位の情報を引くのに使う.
    """

    ids: NDArray[np.int64]
    distances: NDArray[np.int64]
    rows: NDArray[np.intp]

    def __len__(self) -> int:
        return self.ids.shape[0]

    def top(self, n: int) -> RankedList:
        return RankedList(ids=self.ids[:n], distances=self.distances[:n], rows=self.rows[:n])

    def without(self, item_id: int) -> RankedList:
        keep = self.ids != item_id
        return RankedList(ids=self.ids[keep], distances=self.distances[keep], rows=self.rows[keep])


def rank_database(query: BinaryCode, database: CodeDatabase) -> RankedList:
    dist = database.distances(query)
    order = np.lexsort((database.ids, dist)).astype(np.intp)
    return RankedList(ids=database.ids[order], distances=dist[order], rows=order)


def rank(query: BinaryCode, database: Sequence[BinaryCode] | CodeDatabase) -> RankedList:
    """データベース全体をハミング距離で並べる.

    Raises:
        DimensionError: コード長が混在している場合.
    """
    db = database if isinstance(database, CodeDatabase) else CodeDatabase.from_codes(database)
    return rank_database(query, db)
