"""Dynamic time warping: accumulated cost, backtracking and path inversion.

The accumulated cost matrix carries an extra leading row and column so that
``D[0, 0] = 0`` and the rest of the border is infinite; ``D[i, j]`` for
``i, j >= 1`` aligns ``x[:i]`` with ``y[:j]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np


@dataclass(frozen=True)
class CostMatrix:
    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0] - 1

    @property
    def m(self) -> int:
        return self.values.shape[1] - 1

    @property
    def total(self) -> float:
        return float(self.values[-1, -1])


@dataclass(frozen=True)
class WarpingPath:
    pairs: np.ndarray  # shape (L, 2): (query index, reference index)
    cost: float

    def __len__(self):
        return self.pairs.shape[0]


@nb.njit(cache=True)
def _accumulate(x, y):
    n = x.size
    m = y.size
    D = np.full((n + 1, m + 1), np.inf)
    D[0, 0] = 0.0
    for i in range(1, n + 1):
        xi = x[i - 1]
        for j in range(1, m + 1):
            best = D[i - 1, j - 1]
            if D[i - 1, j] < best:
                best = D[i - 1, j]
            if D[i, j - 1] < best:
                best = D[i, j - 1]
            D[i, j] = abs(xi - y[j - 1]) + best
    return D


@nb.njit(cache=True)
def _cost_only(x, y):
    n = x.size
    m = y.size
    prev = np.full(m + 1, np.inf)
    cur = np.empty(m + 1)
    prev[0] = 0.0
    for i in range(1, n + 1):
        xi = x[i - 1]
        cur[0] = np.inf
        for j in range(1, m + 1):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = abs(xi - y[j - 1]) + best
        prev, cur = cur, prev
    return prev[m]


@nb.njit(cache=True)
def _backtrack(D):
    i = D.shape[0] - 1
    j = D.shape[1] - 1
    out = np.empty((i + j, 2), dtype=np.int64)
    k = 0
    out[k, 0] = i - 1
    out[k, 1] = j - 1
    k += 1
    while i > 1 or j > 1:
        diag = D[i - 1, j - 1]
        up = D[i - 1, j]
        left = D[i, j - 1]
        # ties: diagonal, then vertical (advance query), then horizontal
        if diag <= up and diag <= left:
            i -= 1
            j -= 1
        elif up <= left:
            i -= 1
        else:
            j -= 1
        out[k, 0] = i - 1
        out[k, 1] = j - 1
        k += 1
    return out[:k][::-1].copy()


def _check(seq) -> np.ndarray:
    a = np.ascontiguousarray(seq, dtype=np.float64).ravel()
    if a.size == 0:
        raise ValueError("DTW input must be non-empty")
    return a


def accumulate(x, y) -> CostMatrix:
    """Fill the framed accumulated-cost matrix with ``|x_i - y_j|`` local cost."""
    return CostMatrix(_accumulate(_check(x), _check(y)))


def optimal_path(matrix: CostMatrix) -> WarpingPath:
    pairs = _backtrack(matrix.values)
    return WarpingPath(pairs, matrix.total)


def dtw_cost(x, y) -> float:
    """``D[n, m]`` without storing the matrix."""
    return float(_cost_only(_check(x), _check(y)))


def dtw(x, y) -> WarpingPath:
    return optimal_path(accumulate(x, y))


def path_cost(x, y, pairs) -> float:
    """Sum of local distances along ``pairs``, accumulated from the start."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    total = 0.0
    for i, j in pairs:
        total = abs(x[i] - y[j]) + total
    return total


def invert_path(path: WarpingPath, target_length: int) -> np.ndarray:
    """Reference position for each query index.

    Interior query indices get the mean of every reference index the path
    aligns to them. The first and last query indices are pinned to the path
    end points ``0`` and ``m - 1``.
    """
    pairs = np.asarray(path.pairs)
    q = pairs[:, 0]
    r = pairs[:, 1].astype(float)
    if q[0] != 0 or q[-1] != target_length - 1:
        raise ValueError("path does not span the query axis")
    sums = np.bincount(q, weights=r, minlength=target_length)
    counts = np.bincount(q, minlength=target_length)
    inv = sums / counts
    inv[0] = r[0]
    inv[-1] = r[-1]
    return inv
