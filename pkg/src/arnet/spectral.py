"""Normalised Laplacians of transition probabilities, leading eigenvectors and k-means."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Membership, NetworkKind, ParamField
from .errors import DataError, DimensionMismatch, IncompleteField, InvalidQ, ZeroDegree


def _normalise(w: np.ndarray, what: str):
    d = w.sum(axis=1)
    if np.any(d <= 0):
        bad = (np.flatnonzero(d <= 0) + 1).tolist()
        raise ZeroDegree(f"nodes {bad} have nonpositive {what} degree")
    s = 1.0 / np.sqrt(d)
    return s[:, None] * w * s[None, :], d


def oracle_laplacian(membership: Membership, omega1, omega2) -> np.ndarray:
    """Population Laplacian sum from block matrices; the diagonal of ``Z Omega Z^T`` is kept."""
    membership.require_nonempty()
    z = membership.Z
    omega1 = np.asarray(omega1, dtype=float)
    omega2 = np.asarray(omega2, dtype=float)
    if omega1.shape != (membership.q,) * 2 or omega2.shape != omega1.shape:
        raise DimensionMismatch("block matrices must be q x q")
    l1, _ = _normalise(z @ omega1 @ z.T, "birth")
    l2, _ = _normalise(z @ omega2 @ z.T, "survival")
    return l1 + l2


@dataclass(frozen=True, eq=False)
class LaplacianPair:
    L1: np.ndarray = field(repr=False)
    L2: np.ndarray = field(repr=False)
    d1: np.ndarray = field(repr=False)
    d2: np.ndarray = field(repr=False)

    @property
    def L(self) -> np.ndarray:
        return self.L1 + self.L2


def build_laplacians(estimates: ParamField) -> LaplacianPair:
    """Laplacians of the estimated birth (alpha) and survival (1 - beta) matrices, zero diagonal."""
    if estimates.domain.kind != NetworkKind.UNDIRECTED_NOSELF:
        raise DataError("spectral clustering needs an undirected network without self-loops")
    if not estimates.complete:
        raise IncompleteField("estimates have undefined entries; use smoothing")
    if estimates.domain.p < 2:
        raise DataError("need at least two nodes")
    alpha, beta = estimates.matrices()
    w1 = np.nan_to_num(alpha, nan=0.0)
    w2 = np.nan_to_num(1.0 - beta, nan=0.0)
    np.fill_diagonal(w1, 0.0)
    np.fill_diagonal(w2, 0.0)
    l1, d1 = _normalise(w1, "birth")
    l2, d2 = _normalise(w2, "survival")
    return LaplacianPair(l1, l2, d1, d2)


def mean_laplacian(xbar: np.ndarray) -> np.ndarray:
    w = np.array(xbar, dtype=float)
    np.fill_diagonal(w, 0.0)
    return _normalise(w, "mean-adjacency")[0]


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Eigenpairs ordered by descending squared eigenvalue.

    ``vectors`` holds the ``q`` leading eigenvectors as columns, each signed so
    that its largest-magnitude entry is positive.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray = field(repr=False)
    spectrum: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return self.vectors.shape[1]

    @property
    def eigengap(self) -> float:
        """``lambda_q^2 - lambda_{q+1}^2`` (``lambda_q^2`` when ``q = p``)."""
        sq = self.spectrum**2
        return float(sq[self.q - 1] - (sq[self.q] if self.q < sq.size else 0.0))


def leading_basis(L: np.ndarray, q: int) -> SpectralBasis:
    L = np.asarray(L, dtype=float)
    p = L.shape[0]
    if L.ndim != 2 or L.shape[1] != p:
        raise DimensionMismatch("Laplacian must be square")
    if not 1 <= q <= p:
        raise InvalidQ(f"need 1 <= q <= p, got q={q}, p={p}")
    vals, vecs = np.linalg.eigh((L + L.T) / 2)
    order = np.argsort(-(vals**2), kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    lead = vecs[:, :q].copy()
    pivot = np.argmax(np.abs(lead), axis=0)
    signs = np.sign(lead[pivot, np.arange(q)])
    signs[signs == 0] = 1.0
    lead *= signs
    return SpectralBasis(vals[:q].copy(), lead, vals)


@dataclass(frozen=True, eq=False)
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray = field(repr=False)
    inertia: float
    iterations: int


def _sq_dists(x, c):
    return ((x[:, None, :] - c[None, :, :]) ** 2).sum(axis=2)


def _plus_plus(x, k, rng):
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = int(rng.integers(n))
        centers[c] = x[idx]
        d2 = np.minimum(d2, ((x - centers[c]) ** 2).sum(axis=1))
    return centers


def _repair_empty(x, labels, k):
    """Move the point farthest from its centre into each empty cluster."""
    while True:
        sizes = np.bincount(labels, minlength=k)
        empty = np.flatnonzero(sizes == 0)
        if empty.size == 0:
            return labels
        centers = np.stack([x[labels == c].mean(axis=0) if sizes[c] else np.zeros(x.shape[1]) for c in range(k)])
        dist = ((x - centers[labels]) ** 2).sum(axis=1)
        # a point that is alone in its cluster cannot be moved
        dist[sizes[labels] <= 1] = -1.0
        labels = labels.copy()
        labels[int(np.argmax(dist))] = empty[0]


def _lloyd(x, centers, max_iter):
    k = centers.shape[0]
    labels = np.argmin(_sq_dists(x, centers), axis=1)
    labels = _repair_empty(x, labels, k)
    it = 0
    for it in range(1, max_iter + 1):
        centers = np.stack([x[labels == c].mean(axis=0) for c in range(k)])
        new = _repair_empty(x, np.argmin(_sq_dists(x, centers), axis=1), k)
        if np.array_equal(new, labels):
            break
        labels = new
    centers = np.stack([x[labels == c].mean(axis=0) for c in range(k)])
    inertia = float(((x - centers[labels]) ** 2).sum())
    return labels, centers, inertia, it


def _canonical(labels):
    """Relabel clusters 1..k in order of first appearance."""
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    mapping = np.empty(order.size, dtype=np.int64)
    mapping[np.unique(labels)[order]] = np.arange(1, order.size + 1)
    return mapping[labels]


def kmeans(x, k: int, restarts: int = 50, rng=None, max_iter: int = 100) -> KMeansResult:
    """Lloyd's algorithm with k-means++ seeding; best of ``restarts`` runs by inertia.

    Labels are 1-based and numbered by first appearance among the rows.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if not 1 <= k <= x.shape[0]:
        raise InvalidQ(f"need 1 <= k <= number of points, got k={k}")
    if restarts < 1:
        raise InvalidQ("need at least one restart")
    rng = np.random.default_rng(rng)
    best = None
    for _ in range(restarts):
        labels, centers, inertia, it = _lloyd(x, _plus_plus(x, k, rng), max_iter)
        if best is None or inertia < best[2] - 1e-12 * max(1.0, abs(best[2])):
            best = (labels, centers, inertia, it)
    labels, centers, inertia, it = best
    canon = _canonical(labels)
    order = np.empty(k, dtype=np.int64)
    order[canon - 1] = labels
    return KMeansResult(canon, centers[order], inertia, it)


def kmeans_rows(basis: SpectralBasis, q: int, restarts: int = 50, rng=None) -> Membership:
    return Membership(kmeans(basis.vectors, q, restarts, rng).labels, q)
