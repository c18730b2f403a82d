"""Single change-point estimation for the AR(1) block model by profile likelihood.

A segment ``[a, b]`` covers transitions ``t = a..b`` and conditions on
``X_{a-1}``, so the transition into ``X_{tau+1}`` belongs to the right-hand
segment of a split at ``tau``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import AdjacencySeries
from .diagnostics import permutation_test
from .errors import DimensionMismatch, IncompleteField, InvalidParameters, WindowTooShort
from .mle import cumulative_counts
from .sbm import BlockFit, ClusterResult, _require_dsb, cluster_from_counts, fit_from_counts


@dataclass(frozen=True, eq=False)
class SegmentFit:
    loglik: float
    fit: BlockFit = field(repr=False)
    clustering: ClusterResult = field(repr=False)


def _segment(series, cum, a, b, q, kappa, restarts, rng) -> SegmentFit:
    if not 1 <= a <= b <= series.n:
        raise WindowTooShort(f"segment [{a}, {b}] is empty or outside 1..{series.n}")
    counts = cum[b] - cum[a - 1]
    cl = cluster_from_counts(series.domain, counts, q, kappa, restarts, rng)
    fit = fit_from_counts(series.domain, counts, cl.membership, b - a + 1)
    return SegmentFit(fit.loglik, fit, cl)


def segment_loglik(series: AdjacencySeries, a: int, b: int, q: int, kappa: Optional[float] = None,
                   restarts: int = 50, rng=None) -> SegmentFit:
    """Cluster and fit transitions ``a..b``; ``loglik`` is the maximised block log-likelihood.

    ``kappa`` only smooths the per-edge estimates used for clustering; the
    block fit is always the unsmoothed pooled MLE.
    """
    _require_dsb(series.kind)
    return _segment(series, cumulative_counts(series), a, b, q, kappa, restarts, rng)


def delta_f(fit_left: BlockFit, fit_right: BlockFit, p: Optional[int] = None) -> float:
    """Normalised Frobenius distance between the expanded parameter matrices of two fits."""
    p = fit_left.membership.p if p is None else p
    if fit_left.membership.p != p or fit_right.membership.p != p:
        raise DimensionMismatch("fits do not share the node count")

    def expand(fit):
        lab = fit.membership.labels - 1
        idx = np.ix_(lab, lab)
        w1 = fit.blocks.theta[idx]
        w2 = 1.0 - fit.blocks.eta[idx]
        if np.isnan(w1).any() or np.isnan(w2).any():
            raise IncompleteField("fit has undefined block parameters")
        return w1, w2

    l1, l2 = expand(fit_left)
    r1, r2 = expand(fit_right)
    return float(math.sqrt((np.sum((l1 - r1) ** 2) + np.sum((l2 - r2) ** 2)) / p**2))


@dataclass(frozen=True)
class ProfilePoint:
    tau: int
    loglik_left: float
    loglik_right: float

    @property
    def total(self) -> float:
        return self.loglik_left + self.loglik_right


@dataclass(frozen=True, eq=False)
class ChangePointReport:
    tau_hat: int
    profile: tuple = field(repr=False)
    fit_left: BlockFit = field(repr=False)
    fit_right: BlockFit = field(repr=False)
    delta_f: float
    lambda_min: float
    n0: int
    stride: int
    seed: int
    permutation_p_value: Optional[float] = None
    no_change_suspected: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            "tau_hat": self.tau_hat,
            "n0": self.n0,
            "stride": self.stride,
            "seed": self.seed,
            "delta_f": self.delta_f,
            "lambda_min": self.lambda_min,
            "profile": [
                {"tau": pt.tau, "loglik_left": pt.loglik_left, "loglik_right": pt.loglik_right, "total": pt.total}
                for pt in self.profile
            ],
            "fit_left": self.fit_left.to_dict(),
            "fit_right": self.fit_right.to_dict(),
            "permutation_p_value": self.permutation_p_value,
            "no_change_suspected": self.no_change_suspected,
        }


def default_n0(n: int) -> int:
    return max(1, math.ceil(0.1 * n))


def detect(series: AdjacencySeries, q: int, n0: Optional[int] = None, stride: int = 1,
           kappa: Optional[float] = None, restarts: int = 50, seed: int = 0, perms: int = 0,
           alpha_level: float = 0.05) -> ChangePointReport:
    """Maximise the split log-likelihood over ``tau`` in ``[n0, n - n0]``.

    With ``stride > 1`` a coarse grid is searched first and then every ``tau``
    within ``stride`` of the coarse maximiser.  Clustering at ``tau`` uses the
    streams ``(seed, tau, 0)`` and ``(seed, tau, 1)``, so the profile value at
    a given ``tau`` does not depend on the stride.  Ties go to the smallest
    ``tau``.  With ``perms > 0`` the single-regime permutation test is run as
    well and ``no_change_suspected`` is set when it does not reject at
    ``alpha_level``.
    """
    _require_dsb(series.kind)
    n = series.n
    n0 = default_n0(n) if n0 is None else int(n0)
    if n0 < 1:
        raise InvalidParameters("n0 must be at least 1")
    if stride < 1:
        raise InvalidParameters("stride must be at least 1")
    if n < 2 * n0:
        raise WindowTooShort(f"need n >= 2 * n0, got n={n}, n0={n0}")
    cum = cumulative_counts(series)
    cache = {}

    def evaluate(tau):
        if tau not in cache:
            left = _segment(series, cum, 1, tau, q, kappa, restarts, np.random.default_rng([int(seed), tau, 0]))
            right = _segment(series, cum, tau + 1, n, q, kappa, restarts, np.random.default_rng([int(seed), tau, 1]))
            cache[tau] = (left, right)
        left, right = cache[tau]
        return left.loglik + right.loglik

    lo, hi = n0, n - n0
    coarse = list(range(lo, hi + 1, stride))
    best = max(coarse, key=lambda t: (evaluate(t), -t))
    if stride > 1:
        for tau in range(max(lo, best - stride), min(hi, best + stride) + 1):
            evaluate(tau)
    taus = sorted(cache)
    totals = {t: cache[t][0].loglik + cache[t][1].loglik for t in taus}
    tau_hat = max(taus, key=lambda t: (totals[t], -t))
    left, right = cache[tau_hat]
    profile = tuple(ProfilePoint(t, cache[t][0].loglik, cache[t][1].loglik) for t in taus)
    try:
        df = delta_f(left.fit, right.fit, series.p)
    except IncompleteField:
        df = float("nan")
    lam = min(abs(left.clustering.basis.eigenvalues[-1]), abs(right.clustering.basis.eigenvalues[-1]))
    p_value = flag = None
    if perms:
        p_value = permutation_test(series, perms, seed).p_value
        flag = p_value >= alpha_level
    return ChangePointReport(tau_hat, profile, left.fit, right.fit, df, float(lam), n0, stride, int(seed),
                             p_value, flag)
