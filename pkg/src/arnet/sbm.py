"""AR(1) stochastic block model: clustering, pooled estimates, likelihood and BIC."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import AdjacencySeries, BlockParams, EdgeDomain, Membership, NetworkKind
from .errors import DataError, DimensionMismatch, IncompleteField, InfeasibleParameters, InvalidQ
from .mle import N00, N01, N10, N11, count_matrix, estimates_from_counts
from .spectral import (
    SpectralBasis,
    build_laplacians,
    kmeans,
    leading_basis,
    mean_laplacian,
)

AUTO_KAPPA = 0.5


def _require_dsb(kind) -> None:
    if kind != NetworkKind.UNDIRECTED_NOSELF:
        raise DataError("the block model needs an undirected network without self-loops")


@dataclass(frozen=True, eq=False)
class ClusterResult:
    membership: Membership
    basis: SpectralBasis = field(repr=False)
    inertia: float
    kappa: float = 0.0
    smoothed: bool = False


def cluster_from_counts(domain: EdgeDomain, counts: np.ndarray, q: int, kappa: Optional[float] = None,
                        restarts: int = 50, rng=None) -> ClusterResult:
    """Spectral clustering on per-edge estimates built from ``(|J|, 4)`` transition counts.

    With ``kappa=None`` the raw MLE is used unless some edge is undefined, in
    which case add-``AUTO_KAPPA`` smoothing is applied and ``smoothed`` is set.
    """
    _require_dsb(domain.kind)
    if not 1 <= q <= domain.p:
        raise InvalidQ(f"need 1 <= q <= p, got q={q}, p={domain.p}")
    smoothed = False
    if kappa is None:
        est = estimates_from_counts(domain, counts, 0.0)
        kappa = 0.0
        if not est.complete:
            kappa, smoothed = AUTO_KAPPA, True
            est = estimates_from_counts(domain, counts, kappa)
    else:
        est = estimates_from_counts(domain, counts, kappa)
        if not est.complete:
            raise IncompleteField("some edge estimates are undefined; pass kappa > 0")
    basis = leading_basis(build_laplacians(est).L, q)
    km = kmeans(basis.vectors, q, restarts, rng)
    return ClusterResult(Membership(km.labels, q), basis, km.inertia, float(kappa), smoothed)


def cluster_ar(series: AdjacencySeries, q: int, kappa: Optional[float] = None, restarts: int = 50,
               rng=None) -> ClusterResult:
    """Communities from the leading eigenvectors of the transition-probability Laplacian sum."""
    return cluster_from_counts(series.domain, count_matrix(series), q, kappa, restarts, rng)


def cluster_mean(series: AdjacencySeries, q: int, restarts: int = 50, rng=None) -> ClusterResult:
    """Baseline: spectral clustering of the time-averaged adjacency matrix ``X_1..X_n``."""
    _require_dsb(series.kind)
    if series.n < 1:
        raise DataError("need at least one transition")
    if not 1 <= q <= series.p:
        raise InvalidQ(f"need 1 <= q <= p, got q={q}, p={series.p}")
    xbar = series.snapshots[1:].mean(axis=0)
    basis = leading_basis(mean_laplacian(xbar), q)
    km = kmeans(basis.vectors, q, restarts, rng)
    return ClusterResult(Membership(km.labels, q), basis, km.inertia)


@dataclass(frozen=True, eq=False)
class BlockFit:
    """Pooled estimates for every community pair.

    ``pair_sizes[k, l]`` is the number of edges in the pair class and
    ``counts[k, l]`` its pooled ``[n01, n00, n10, n11]``.  Pairs with no edges
    are listed in ``skipped`` and pairs with an empty denominator in
    ``undefined``; both carry NaN estimates.  Pair indices are 1-based.
    """

    membership: Membership
    blocks: BlockParams
    pair_sizes: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)
    loglik: float
    se_theta: np.ndarray = field(repr=False)
    se_eta: np.ndarray = field(repr=False)
    n: int
    kappa: float = 0.0
    skipped: tuple = ()
    undefined: tuple = ()

    def to_dict(self) -> dict:
        def mat(m):
            return [[None if np.isnan(v) else float(v) for v in row] for row in m]

        return {
            "q": self.membership.q,
            "labels": self.membership.labels.tolist(),
            "theta": mat(self.blocks.theta),
            "eta": mat(self.blocks.eta),
            "se_theta": mat(self.se_theta),
            "se_eta": mat(self.se_eta),
            "pair_sizes": self.pair_sizes.tolist(),
            "loglik": self.loglik,
            "n": self.n,
            "kappa": self.kappa,
            "skipped": [list(x) for x in self.skipped],
            "undefined": [list(x) for x in self.undefined],
        }


def pooled_counts(domain: EdgeDomain, counts: np.ndarray, membership: Membership):
    """``(q, q, 4)`` symmetric pooled counts and ``(q, q)`` class sizes."""
    if membership.p != domain.p:
        raise DimensionMismatch("membership and series disagree in p")
    q = membership.q
    k = membership.labels[domain.rows] - 1
    l = membership.labels[domain.cols] - 1
    lo, hi = np.minimum(k, l), np.maximum(k, l)
    pooled = np.zeros((q, q, 4), dtype=np.int64)
    np.add.at(pooled, (lo, hi), counts)
    sizes = np.zeros((q, q), dtype=np.int64)
    np.add.at(sizes, (lo, hi), 1)
    iu = np.triu_indices(q, 1)
    pooled[iu[1], iu[0]] = pooled[iu]
    sizes[iu[1], iu[0]] = sizes[iu]
    return pooled, sizes


def _xlogy(x, y):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * np.log(np.where(x > 0, y, 1.0)), 0.0)


def _loglik_terms(pooled: np.ndarray, theta: np.ndarray, eta: np.ndarray) -> float:
    iu = np.triu_indices(theta.shape[0])
    c = pooled[iu]
    th, et = theta[iu], eta[iu]
    total = (
        _xlogy(c[:, N01], th)
        + _xlogy(c[:, N00], 1 - th)
        + _xlogy(c[:, N10], et)
        + _xlogy(c[:, N11], 1 - et)
    )
    return float(total.sum())


def fit_from_counts(domain: EdgeDomain, counts: np.ndarray, membership: Membership, n: int,
                    kappa: float = 0.0) -> BlockFit:
    _require_dsb(domain.kind)
    if kappa < 0:
        raise DataError("smoothing constant must be nonnegative")
    pooled, sizes = pooled_counts(domain, counts, membership)
    den_t = (pooled[..., N01] + pooled[..., N00]).astype(float)
    den_e = (pooled[..., N10] + pooled[..., N11]).astype(float)
    empty = sizes == 0
    with np.errstate(invalid="ignore", divide="ignore"):
        theta = np.where(~empty & (den_t + 2 * kappa > 0), (pooled[..., N01] + kappa) / (den_t + 2 * kappa), np.nan)
        eta = np.where(~empty & (den_e + 2 * kappa > 0), (pooled[..., N10] + kappa) / (den_e + 2 * kappa), np.nan)
    q = membership.q
    skipped = tuple((k + 1, l + 1) for k in range(q) for l in range(k, q) if empty[k, l])
    undefined = tuple(
        (k + 1, l + 1)
        for k in range(q)
        for l in range(k, q)
        if not empty[k, l] and (np.isnan(theta[k, l]) or np.isnan(eta[k, l]))
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        var_t = theta * (1 - theta) * (theta + eta) / eta
        var_e = eta * (1 - eta) * (theta + eta) / theta
        scale = n * sizes.astype(float)
        se_t = np.where((eta > 0) & (theta > 0) & (scale > 0), np.sqrt(var_t / scale), np.nan)
        se_e = np.where((eta > 0) & (theta > 0) & (scale > 0), np.sqrt(var_e / scale), np.nan)
    loglik = _loglik_terms(pooled, theta, eta)
    return BlockFit(
        membership=membership,
        blocks=BlockParams(theta, eta, constrained=False),
        pair_sizes=sizes,
        counts=pooled,
        loglik=loglik,
        se_theta=se_t,
        se_eta=se_e,
        n=int(n),
        kappa=float(kappa),
        skipped=skipped,
        undefined=undefined,
    )


def group_mle(series: AdjacencySeries, membership: Membership, kappa: float = 0.0) -> BlockFit:
    """Pooled transition-ratio estimates per community pair, with log-likelihood and standard errors."""
    return fit_from_counts(series.domain, count_matrix(series), membership, series.n, kappa)


def sbm_loglik(series: AdjacencySeries, membership: Membership, blocks: BlockParams) -> float:
    """Block-model log-likelihood of transitions ``1..n`` conditional on ``X_0``."""
    _require_dsb(series.kind)
    if blocks.q != membership.q:
        raise DimensionMismatch("blocks and membership disagree in q")
    pooled, _ = pooled_counts(series.domain, count_matrix(series), membership)
    th, et = blocks.theta, blocks.eta
    need = [
        (pooled[..., N01] > 0, th),
        (pooled[..., N00] > 0, 1 - th),
        (pooled[..., N10] > 0, et),
        (pooled[..., N11] > 0, 1 - et),
    ]
    for used, prob in need:
        bad = used & ~(prob > 0)
        if np.any(bad):
            k, l = np.argwhere(bad)[0] + 1
            raise InfeasibleParameters(f"zero or undefined probability for an observed transition in pair ({k},{l})")
    return _loglik_terms(pooled, th, et)


def bic_value(loglik: float, q: int, n: int, p: int) -> float:
    """``-2 loglik + log(n (p/q)^2) q (q+1)``."""
    return -2.0 * loglik + math.log(n * (p / q) ** 2) * q * (q + 1)


@dataclass(frozen=True)
class BICResult:
    rows: tuple
    best_q: int

    def to_dict(self) -> dict:
        return {"rows": [dict(r) for r in self.rows], "best_q": self.best_q}


def bic(series: AdjacencySeries, q_values=None, kappa: Optional[float] = None, restarts: int = 50,
        seed: int = 0) -> BICResult:
    """Fit the block model for each ``q`` and tabulate BIC; clustering for ``q`` uses stream ``(seed, q)``."""
    _require_dsb(series.kind)
    if q_values is None:
        q_values = range(1, min(12, series.p) + 1)
    q_values = [int(q) for q in q_values]
    if not q_values:
        raise InvalidQ("empty q range")
    for q in q_values:
        if not 1 <= q <= series.p:
            raise InvalidQ(f"q={q} outside 1..p")
    counts = count_matrix(series)
    rows = []
    for q in q_values:
        rng = np.random.default_rng([int(seed), q])
        cl = cluster_from_counts(series.domain, counts, q, kappa, restarts, rng)
        fit = fit_from_counts(series.domain, counts, cl.membership, series.n)
        penalty = math.log(series.n * (series.p / q) ** 2) * q * (q + 1)
        rows.append(
            {
                "q": q,
                "loglik": fit.loglik,
                "penalty": penalty,
                "bic": -2.0 * fit.loglik + penalty,
                "eigengap": cl.basis.eigengap,
                "smoothed": cl.smoothed,
            }
        )
    best = min(rows, key=lambda r: (r["bic"], r["q"]))["q"]
    return BICResult(tuple(rows), best)
