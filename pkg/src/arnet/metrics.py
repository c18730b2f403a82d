"""Partition agreement scores and the Hamming distance between networks."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DimensionMismatch, InvalidDimension


def hamming(a, b) -> int:
    """Number of entries where two equally shaped matrices differ."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return int(np.count_nonzero(a != b))


def contingency(a, b) -> np.ndarray:
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape != b.shape:
        raise DimensionMismatch("label vectors differ in length")
    if a.size == 0:
        raise InvalidDimension("label vectors must be nonempty")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return table


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log(p)))


def nmi(a, b) -> float:
    """Mutual information normalised by the geometric mean of the two entropies.

    When either partition has a single cluster the score is 1 if the
    partitions coincide and 0 otherwise.
    """
    table = contingency(a, b)
    ha, hb = _entropy(table.sum(axis=1)), _entropy(table.sum(axis=0))
    if ha == 0 or hb == 0:
        return 1.0 if table.shape == (1, 1) else 0.0
    n = table.sum()
    nz = table > 0
    pij = table[nz] / n
    outer = np.outer(table.sum(axis=1), table.sum(axis=0))[nz] / n**2
    mi = float(np.sum(pij * np.log(pij / outer)))
    return float(min(max(mi / np.sqrt(ha * hb), 0.0), 1.0))


def _comb2(x):
    x = np.asarray(x, dtype=float)
    return x * (x - 1) / 2


def ari(a, b) -> float:
    """Hubert-Arabie adjusted Rand index."""
    table = contingency(a, b)
    n = table.sum()
    if n < 2:
        raise InvalidDimension("the adjusted Rand index needs at least two items")
    index = _comb2(table).sum()
    sa = _comb2(table.sum(axis=1)).sum()
    sb = _comb2(table.sum(axis=0)).sum()
    expected = sa * sb / _comb2(n)
    top = (sa + sb) / 2
    if top == expected:
        # both partitions trivial in the same way: all singletons or one block
        return 1.0
    return float((index - expected) / (top - expected))


def align_labels(estimated, truth, q: int) -> np.ndarray:
    """Permutation ``perm`` (0-based) maximising agreement of ``perm[estimated - 1]`` with ``truth - 1``."""
    est = np.asarray(estimated) - 1
    tru = np.asarray(truth) - 1
    overlap = np.zeros((q, q), dtype=np.int64)
    np.add.at(overlap, (est, tru), 1)
    rows, cols = linear_sum_assignment(-overlap)
    perm = np.empty(q, dtype=np.int64)
    perm[rows] = cols
    return perm
