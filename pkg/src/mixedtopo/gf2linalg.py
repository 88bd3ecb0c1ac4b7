"""Bit-packed linear algebra over GF(2).

Matrices are stored row-major with 64 columns packed per machine word, so row
elimination is a word-parallel XOR.  Rank on ~10^3 x 10^3 matrices takes
milliseconds, which the lattice sweeps rely on.

Elimination is deterministic: pivots are scanned left to right and the first
row with a nonzero entry wins.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

_WORD = 64


def _pack(bits: np.ndarray) -> np.ndarray:
    """Pack a 2D uint8 0/1 array into little-endian uint64 words."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8) & 1)
    rows, cols = bits.shape
    nwords = (cols + _WORD - 1) // _WORD
    if cols == 0:
        return np.zeros((rows, 0), dtype=np.uint64)
    padded = np.zeros((rows, nwords * _WORD), dtype=np.uint8)
    padded[:, :cols] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view(np.uint64).reshape(rows, nwords)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    rows = words.shape[0]
    if cols == 0:
        return np.zeros((rows, 0), dtype=np.uint8)
    as_bytes = words.reshape(rows, -1).view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :cols].astype(np.uint8)


@dataclass(frozen=True)
class BitMatrix:
    """A rows x cols matrix over GF(2), rows packed into uint64 words.

    Values are immutable after construction; all operations allocate their
    outputs, so instances can be shared freely across threads.
    """

    rows: int
    cols: int
    words: np.ndarray = field(repr=False)

    def __post_init__(self):
        expected = (self.rows, (self.cols + _WORD - 1) // _WORD)
        if self.words.shape != expected:
            raise ValueError(f"packed data shape {self.words.shape} does not match {expected}")
        self.words.flags.writeable = False

    @classmethod
    def from_dense(cls, bits) -> "BitMatrix":
        arr = np.atleast_2d(np.asarray(bits, dtype=np.uint8) & 1)
        return cls(arr.shape[0], arr.shape[1], _pack(arr))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, (cols + _WORD - 1) // _WORD), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    def to_dense(self) -> np.ndarray:
        return _unpack(self.words, self.cols)

    def get(self, i: int, j: int) -> int:
        return int((self.words[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    def column(self, j: int) -> np.ndarray:
        if self.rows == 0:
            return np.zeros(0, dtype=np.uint8)
        return ((self.words[:, j >> 6] >> np.uint64(j & 63)) & np.uint64(1)).astype(np.uint8)

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.words, other.words)
        )


def _eliminate(words: np.ndarray, rows: int, cols: int):
    """In-place RREF on packed words; returns the pivot column list."""
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        w, b = c >> 6, np.uint64(c & 63)
        col = (words[r:, w] >> b) & np.uint64(1)
        hits = np.nonzero(col)[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
        col_all = ((words[:, w] >> b) & np.uint64(1)).astype(bool)
        col_all[r] = False
        if col_all.any():
            words[col_all] ^= words[r]
        pivots.append(c)
        r += 1
    return pivots


def rank(m: BitMatrix) -> int:
    """GF(2) rank; the input is not modified."""
    work = m.words.copy()
    return len(_eliminate(work, m.rows, m.cols))


def rref(m: BitMatrix):
    """Reduced row echelon form.  Returns (BitMatrix, pivot columns)."""
    work = m.words.copy()
    pivots = _eliminate(work, m.rows, m.cols)
    return BitMatrix(m.rows, m.cols, work), pivots


def nullspace(m: BitMatrix) -> list:
    """Basis of {v : m v = 0 over GF(2)} as uint8 vectors of length cols.

    Basis size is cols - rank(m); the basis vector for free column f has a 1
    at f and back-filled pivot entries.
    """
    reduced, pivots = rref(m)
    dense = reduced.to_dense()
    pivot_set = set(pivots)
    basis = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        v = np.zeros(m.cols, dtype=np.uint8)
        v[f] = 1
        for r, c in enumerate(pivots):
            v[c] = dense[r, f]
        basis.append(v)
    return basis


def in_span(rows_m: BitMatrix, v) -> Optional[np.ndarray]:
    """Solve c @ rows_m = v over GF(2).

    Returns a uint8 coefficient vector of length rows_m.rows, or None when v
    is outside the row span.  Raises ValueError on a length mismatch.
    """
    v = np.asarray(v, dtype=np.uint8) & 1
    if v.shape != (rows_m.cols,):
        raise ValueError(f"vector length {v.shape} does not match cols {rows_m.cols}")
    m = rows_m.rows
    work = rows_m.words.copy()
    # Track row combinations through the elimination with an augmented identity.
    coeff = BitMatrix.identity(m).words.copy() if m else np.zeros((0, 0), dtype=np.uint64)
    pivots = []
    r = 0
    for c in range(rows_m.cols):
        if r >= m:
            break
        w, b = c >> 6, np.uint64(c & 63)
        col = (work[r:, w] >> b) & np.uint64(1)
        hits = np.nonzero(col)[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
            coeff[[r, p]] = coeff[[p, r]]
        col_all = ((work[:, w] >> b) & np.uint64(1)).astype(bool)
        col_all[r] = False
        if col_all.any():
            work[col_all] ^= work[r]
            coeff[col_all] ^= coeff[r]
        pivots.append(c)
        r += 1
    residual = _pack(v.reshape(1, -1))[0] if rows_m.cols else np.zeros(0, dtype=np.uint64)
    out_words = np.zeros(coeff.shape[1], dtype=np.uint64) if m else np.zeros(0, dtype=np.uint64)
    for row_idx, c in enumerate(pivots):
        w, b = c >> 6, np.uint64(c & 63)
        if (residual[w] >> b) & np.uint64(1):
            residual ^= work[row_idx]
            out_words ^= coeff[row_idx]
    if residual.any():
        return None
    if m == 0:
        return np.zeros(0, dtype=np.uint8)
    return _unpack(out_words.reshape(1, -1), m)[0]


__all__ = ["BitMatrix", "rank", "rref", "nullspace", "in_span"]
