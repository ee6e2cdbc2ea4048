"""Exact dense linear algebra over GF(2).

Binary matrices are held as numpy uint8 arrays with entries in {0, 1};
all arithmetic is XOR-based row reduction or matmul-mod-2.  This module
owns parity-check / generator matrix handling: rank, systematic forms,
encoding, codebook enumeration and exact minimum Hamming distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, RankDeficient, TooLarge

# Hard cap on 2^k message enumeration (min distance, MLD codebooks).
DEFAULT_ENUM_CAP = 24


class BitMatrix:
    """Dense binary matrix over GF(2).

    Thin wrapper over a C-contiguous uint8 array.  Instances are treated
    as immutable by every routine in the package; mutate only through
    ``copy()`` + ``flip()`` (the MDP transition does this).
    """

    __slots__ = ("a",)

    def __init__(self, a):
        arr = np.ascontiguousarray(a, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"degenerate shape {arr.shape}")
        if arr.max() > 1:
            raise ValueError("entries must be 0 or 1")
        self.a = arr

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def ones(self) -> int:
        """Number of nonzero entries."""
        return int(self.a.sum())

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.a.copy())

    def flip(self, row: int, col: int) -> None:
        self.a[row, col] ^= 1

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(np.eye(n, dtype=np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    def __getitem__(self, idx):
        return self.a[idx]

    def __eq__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.a.shape == other.a.shape and bool((self.a == other.a).all())

    def __hash__(self):
        return hash((self.a.shape, self.a.tobytes()))

    def __repr__(self):
        return f"BitMatrix({self.rows}x{self.cols}, ones={self.ones()})"


@dataclass(frozen=True)
class SystematicPair:
    """Systematic parity-check/generator pair related by a column permutation.

    ``h_std`` has the form (A | I_m) and ``g_std`` the form (I_k | A^T), so
    g_std @ h_std.T = 0 over GF(2) exactly.  ``col_perm[j]`` is the column of
    the original matrix that appears at position j of ``h_std``.
    """

    h_std: BitMatrix
    g_std: BitMatrix
    col_perm: np.ndarray

    @property
    def n(self) -> int:
        return self.h_std.cols

    @property
    def k(self) -> int:
        return self.g_std.rows

    @property
    def m(self) -> int:
        return self.h_std.rows


def _row_reduce(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """In-place Gauss-Jordan reduction over GF(2).

    Pivots are chosen left to right (lexicographically first eligible
    column).  Returns the reduced matrix and its pivot columns.
    """
    m, n = a.shape
    pivot_cols: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        rows = np.nonzero(a[r:, c])[0]
        if rows.size == 0:
            continue
        p = r + rows[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        # Clear the column everywhere else (Jordan step).
        hits = np.nonzero(a[:, c])[0]
        hits = hits[hits != r]
        a[hits] ^= a[r]
        pivot_cols.append(c)
        r += 1
    return a, pivot_cols


def rank(mat: BitMatrix) -> int:
    """GF(2) row rank by Gaussian elimination."""
    _, pivots = _row_reduce(mat.a.copy())
    return len(pivots)


def to_systematic(h: BitMatrix) -> SystematicPair:
    """Bring a full-row-rank parity-check matrix to systematic form.

    Column pivoting is used when the leading columns are singular, and the
    permutation is returned so bit positions can be mapped back.  The
    permuted code is equivalent to the original (positions relabeled).

    Raises:
        RankDeficient: if rank(h) < rows(h).
    """
    m, n = h.shape
    reduced, pivots = _row_reduce(h.a.copy())
    if len(pivots) < m:
        raise RankDeficient(f"rank {len(pivots)} < {m} rows")
    k = n - m
    nonpivots = [c for c in range(n) if c not in set(pivots)]
    perm = np.array(nonpivots + pivots, dtype=np.int64)
    h_std = BitMatrix(reduced[:, perm])
    a_part = h_std.a[:, :k]
    g = np.concatenate([np.eye(k, dtype=np.uint8), a_part.T], axis=1)
    return SystematicPair(h_std=h_std, g_std=BitMatrix(g), col_perm=perm)


def encode(g: BitMatrix, b: np.ndarray) -> np.ndarray:
    """Encode a message: c = b G over GF(2).

    ``b`` may be a single length-k vector or a (batch, k) array.
    """
    b = np.asarray(b, dtype=np.uint8)
    if b.shape[-1] != g.rows:
        raise DimensionMismatch(f"message length {b.shape[-1]} != k={g.rows}")
    prod = b.astype(np.int64) @ g.a.astype(np.int64)
    return (prod & 1).astype(np.uint8)


def syndrome(h: BitMatrix, c: np.ndarray) -> np.ndarray:
    """H c^T over GF(2); all-zero iff c is a codeword of the code of H."""
    c = np.asarray(c, dtype=np.uint8)
    if c.shape[-1] != h.cols:
        raise DimensionMismatch(f"vector length {c.shape[-1]} != n={h.cols}")
    prod = c.astype(np.int64) @ h.a.T.astype(np.int64)
    return (prod & 1).astype(np.uint8)


def _message_block(start: int, count: int, k: int) -> np.ndarray:
    """Messages start..start+count-1 as (count, k) bit rows, LSB first."""
    idx = np.arange(start, start + count, dtype=np.uint64)
    return ((idx[:, None] >> np.arange(k, dtype=np.uint64)) & 1).astype(np.uint8)


def min_hamming_distance(g: BitMatrix, cap: int = DEFAULT_ENUM_CAP) -> int:
    """Exact minimum Hamming distance by exhaustive message enumeration.

    Walks all 2^k - 1 nonzero messages in chunks; no probabilistic
    search.  k is capped because the enumeration is exponential.

    Raises:
        TooLarge: if rows(g) exceeds ``cap``.
    """
    k = g.rows
    if k > cap:
        raise TooLarge(f"k={k} exceeds enumeration cap {cap}")
    g64 = g.a.astype(np.int64)
    best = g.cols + 1
    chunk = 1 << 16
    for start in range(1, 1 << k, chunk):
        count = min(chunk, (1 << k) - start)
        msgs = _message_block(start, count, k)
        cw = (msgs.astype(np.int64) @ g64) & 1
        w = int(cw.sum(axis=1).min())
        if w < best:
            best = w
            if best == 1:
                break
    return best


def enumerate_codewords(g: BitMatrix, cap: int = 20) -> np.ndarray:
    """All 2^k codewords as a (2^k, n) uint8 array, message index order.

    Row i encodes the message whose bit j is (i >> j) & 1.  Used by the
    exhaustive ML decoder and by brute-force oracles.
    """
    k = g.rows
    if k > cap:
        raise TooLarge(f"k={k} exceeds enumeration cap {cap}")
    msgs = _message_block(0, 1 << k, k)
    return ((msgs.astype(np.int64) @ g.a.astype(np.int64)) & 1).astype(np.uint8)
