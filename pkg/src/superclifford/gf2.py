"""Bit-packed linear algebra over GF(2).

Rows are packed little-endian into ``uint64`` words: logical column ``c`` of a
row lives in bit ``c % 64`` of word ``c // 64``. Padding bits past ``cols`` are
always zero.
"""

from __future__ import annotations

from typing import Callable, Iterable

import numba
import numpy as np

WORD = 64


def n_words(n_bits: int) -> int:
    return (n_bits + WORD - 1) // WORD


def pack_rows(dense: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into an ``(rows, n_words(cols))`` uint64 array."""
    dense = np.asarray(dense, dtype=np.uint8)
    if dense.ndim != 2:
        raise ValueError("expected a 2-D array")
    rows, cols = dense.shape
    width = n_words(cols) * WORD
    padded = np.zeros((rows, width), dtype=np.uint8)
    padded[:, :cols] = dense & 1
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False).reshape(rows, -1)


def unpack_rows(words: np.ndarray, cols: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype=np.uint64)
    rows = words.shape[0]
    as_bytes = words.astype("<u8", copy=False).view(np.uint8).reshape(rows, -1)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :cols]


class BitMatrix:
    """Dense GF(2) matrix with packed rows."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: np.ndarray | None = None):
        self.rows = int(rows)
        self.cols = int(cols)
        if data is None:
            data = np.zeros((self.rows, n_words(self.cols)), dtype=np.uint64)
        data = np.asarray(data, dtype=np.uint64)
        if data.shape != (self.rows, n_words(self.cols)):
            raise ValueError(f"data shape {data.shape} does not fit {rows}x{cols}")
        self.data = data

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        dense = np.atleast_2d(np.asarray(dense, dtype=np.uint8))
        return cls(dense.shape[0], dense.shape[1], pack_rows(dense))

    @classmethod
    def from_int_rows(cls, rows: Iterable[int], cols: int) -> "BitMatrix":
        rows = list(rows)
        nw = n_words(cols)
        data = np.zeros((len(rows), nw), dtype=np.uint64)
        for i, r in enumerate(rows):
            for w in range(nw):
                data[i, w] = (r >> (WORD * w)) & 0xFFFFFFFFFFFFFFFF
        return cls(len(rows), cols, data)

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.data, self.cols)

    def row_as_int(self, i: int) -> int:
        return int.from_bytes(self.data[i].astype("<u8").tobytes(), "little")

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.data.copy())

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def submatrix(self, row_slice: slice = slice(None), col_start: int = 0, col_stop: int | None = None) -> "BitMatrix":
        dense = self.to_dense()[row_slice, col_start:col_stop]
        return BitMatrix.from_dense(dense) if dense.size else BitMatrix(dense.shape[0], dense.shape[1])

    def get(self, i: int, j: int) -> int:
        return int((self.data[i, j // WORD] >> np.uint64(j % WORD)) & np.uint64(1))

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and np.array_equal(self.data, other.data)

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


@numba.njit(cache=True)
def _rank_inplace(m, ncols):
    rows, nw = m.shape
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        w = c >> 6
        b = np.uint64(1) << np.uint64(c & 63)
        p = -1
        for i in range(r, rows):
            if m[i, w] & b:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for k in range(w, nw):
                tmp = m[r, k]
                m[r, k] = m[p, k]
                m[p, k] = tmp
        for i in range(r + 1, rows):
            if m[i, w] & b:
                for k in range(w, nw):
                    m[i, k] ^= m[r, k]
        r += 1
    return r


def rank_words(words: np.ndarray, ncols: int) -> int:
    """Rank of packed rows; works on a private copy."""
    if words.shape[0] == 0 or ncols == 0:
        return 0
    return int(_rank_inplace(np.array(words, dtype=np.uint64, copy=True), ncols))


def rank(m: BitMatrix) -> int:
    return rank_words(m.data, m.cols)


RowOpCallback = Callable[[str, int, int], None]


def row_echelon_with_callback(
    m: BitMatrix,
    pivot_cols: range | None = None,
    on_row_op: RowOpCallback | None = None,
    reduced: bool = False,
) -> tuple[BitMatrix, int]:
    """Row-reduce ``m`` pivoting only on ``pivot_cols``.

    Every row operation is reported as ``on_row_op("swap", i, j)`` or
    ``on_row_op("add", i, j)`` (row i ^= row j) in execution order. Returns the
    reduced copy and the number of pivots found, i.e. the rank of the pivot block.
    After the call rows ``k..`` are zero inside the pivot block. With
    ``reduced=True`` pivots are also cleared from the rows above them.
    """
    if pivot_cols is None:
        pivot_cols = range(m.cols)
    if len(pivot_cols) and (min(pivot_cols) < 0 or max(pivot_cols) >= m.cols):
        raise IndexError(f"pivot columns {pivot_cols} outside 0..{m.cols - 1}")
    out = m.copy()
    data = out.data
    r = 0
    for c in pivot_cols:
        if r == out.rows:
            break
        w = c // WORD
        b = np.uint64(1) << np.uint64(c % WORD)
        hits = np.flatnonzero(data[r:, w] & b)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            data[[r, p]] = data[[p, r]]
            if on_row_op is not None:
                on_row_op("swap", r, p)
        targets = np.flatnonzero(data[:, w] & b) if reduced else r + 1 + np.flatnonzero(data[r + 1:, w] & b)
        for i in targets:
            if i == r:
                continue
            data[i] ^= data[r]
            if on_row_op is not None:
                on_row_op("add", int(i), r)
        r += 1
    return out, r


def replay_row_ops(m: BitMatrix, ops: Iterable[tuple[str, int, int]]) -> BitMatrix:
    out = m.copy()
    for kind, i, j in ops:
        if kind == "swap":
            out.data[[i, j]] = out.data[[j, i]]
        elif kind == "add":
            out.data[i] ^= out.data[j]
        else:
            raise ValueError(f"unknown row op {kind!r}")
    return out


def in_row_space(m: BitMatrix, vec: np.ndarray) -> bool:
    """True if the dense 0/1 vector ``vec`` is a GF(2) combination of rows of ``m``."""
    stacked = np.vstack([m.data, pack_rows(np.atleast_2d(vec))])
    return rank_words(stacked, m.cols) == rank(m)


__all__ = [
    "BitMatrix",
    "in_row_space",
    "n_words",
    "pack_rows",
    "rank",
    "rank_words",
    "replay_row_ops",
    "row_echelon_with_callback",
    "unpack_rows",
]
