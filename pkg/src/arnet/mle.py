"""Per-edge maximum likelihood estimation of the transition probabilities."""

from __future__ import annotations

from dataclasses import dataclass
from statistics import NormalDist
from typing import NamedTuple, Optional

import numpy as np

from .core import AdjacencySeries, EdgeDomain, ParamField
from .errors import CIUndefined, InsufficientData, InvalidEdge, InvalidParameters, VarianceUndefined

# column order of count arrays
N01, N00, N10, N11 = range(4)


class TransitionCounts(NamedTuple):
    n01: int
    n00: int
    n10: int
    n11: int

    @property
    def n(self) -> int:
        return self.n01 + self.n00 + self.n10 + self.n11


def _pair_counts(prev: np.ndarray, cur: np.ndarray) -> np.ndarray:
    """Stack of the four transition indicators along a new last axis."""
    prev = prev.astype(np.int64)
    cur = cur.astype(np.int64)
    return np.stack(
        [cur * (1 - prev), (1 - cur) * (1 - prev), (1 - cur) * prev, cur * prev], axis=-1
    )


def count_matrix(series: AdjacencySeries) -> np.ndarray:
    """``(|J|, 4)`` transition counts ``[n01, n00, n10, n11]`` over ``t = 1..n``."""
    if series.n < 1:
        raise InsufficientData("need at least one transition")
    x = series.edge_paths()
    return _pair_counts(x[:-1], x[1:]).sum(axis=0)


def cumulative_counts(series: AdjacencySeries) -> np.ndarray:
    """``(n+1, |J|, 4)`` array; row ``t`` holds the counts over transitions ``1..t``.

    Counts over transitions ``a..b`` are ``C[b] - C[a-1]``.
    """
    x = series.edge_paths()
    c = np.zeros((series.n + 1, x.shape[1], 4), dtype=np.int64)
    if series.n:
        np.cumsum(_pair_counts(x[:-1], x[1:]), axis=0, out=c[1:])
    return c


def transition_counts(series: AdjacencySeries, i: int, j: int) -> TransitionCounts:
    domain = series.domain
    if (i, j) not in domain:
        raise InvalidEdge(f"edge ({i},{j}) is not in the {domain.kind.value} domain for p={domain.p}")
    if series.n < 1:
        raise InsufficientData("need at least one transition")
    path = series.snapshots[:, i - 1, j - 1]
    c = _pair_counts(path[:-1], path[1:]).sum(axis=0)
    return TransitionCounts(*(int(v) for v in c))


@dataclass(frozen=True)
class EdgeEstimate:
    alpha: Optional[float]
    beta: Optional[float]
    counts: TransitionCounts
    se_alpha: Optional[float] = None
    se_beta: Optional[float] = None


def _ratio(num, den, kappa):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den + 2 * kappa > 0, (num + kappa) / (den + 2 * kappa), np.nan)


def ratios(counts: np.ndarray, kappa: float = 0.0):
    """Vectorised MLE ``(alpha_hat, beta_hat)`` from a ``(..., 4)`` count array; NaN where undefined."""
    if kappa < 0:
        raise InvalidParameters("smoothing constant must be nonnegative")
    counts = np.asarray(counts)
    alpha = _ratio(counts[..., N01], counts[..., N01] + counts[..., N00], kappa)
    beta = _ratio(counts[..., N10], counts[..., N10] + counts[..., N11], kappa)
    return alpha, beta


def asymptotic_variance(alpha, beta):
    """Asymptotic variances of ``sqrt(n) * (estimate - truth)`` for alpha and beta."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(alpha <= 0) or np.any(beta <= 0):
        raise VarianceUndefined("asymptotic variance needs alpha > 0 and beta > 0")
    s = alpha + beta
    va = alpha * (1 - alpha) * s / beta
    vb = beta * (1 - beta) * s / alpha
    if va.ndim == 0:
        return float(va), float(vb)
    return va, vb


def _standard_errors(alpha, beta, n):
    if alpha is None or beta is None or alpha <= 0 or beta <= 0 or n < 1:
        return None, None
    va, vb = asymptotic_variance(alpha, beta)
    return float(np.sqrt(va / n)), float(np.sqrt(vb / n))


def estimate_edge(counts: TransitionCounts, kappa: float = 0.0) -> EdgeEstimate:
    counts = TransitionCounts(*counts)
    a, b = ratios(np.array(counts), kappa)
    alpha = None if np.isnan(a) else float(a)
    beta = None if np.isnan(b) else float(b)
    se_a, se_b = _standard_errors(alpha, beta, counts.n)
    return EdgeEstimate(alpha, beta, counts, se_a, se_b)


def estimates_from_counts(domain: EdgeDomain, counts: np.ndarray, kappa: float = 0.0) -> ParamField:
    alpha, beta = ratios(counts, kappa)
    return ParamField(domain, alpha, beta, constrained=False)


def estimate_all(series: AdjacencySeries, kappa: float = 0.0) -> ParamField:
    return estimates_from_counts(series.domain, count_matrix(series), kappa)


def z_quantile(level: float) -> float:
    """Two-sided standard normal critical value for coverage ``level``."""
    if not 0 <= level < 1:
        raise InvalidParameters("confidence level must lie in [0, 1)")
    return NormalDist().inv_cdf((1 + level) / 2)


@dataclass(frozen=True)
class ConfidenceInterval:
    alpha: tuple
    beta: tuple
    alpha_clipped: bool
    beta_clipped: bool


def _interval(est, var, n, z):
    half = z * np.sqrt(var / n)
    lo, hi = est - half, est + half
    clipped = bool(lo < 0 or hi > 1)
    return (float(max(lo, 0.0)), float(min(hi, 1.0))), clipped


def confidence_interval(est: EdgeEstimate, level: float = 0.95, n: Optional[int] = None) -> ConfidenceInterval:
    """Normal-approximation interval for both parameters, clipped to ``[0, 1]``."""
    n = est.counts.n if n is None else n
    if n < 1:
        raise InsufficientData("need n >= 1")
    for name, v in (("alpha", est.alpha), ("beta", est.beta)):
        if v is None or v <= 0 or v >= 1:
            raise CIUndefined(f"{name} estimate {v} is undefined or on the boundary")
    z = z_quantile(level)
    va, vb = asymptotic_variance(est.alpha, est.beta)
    a, ca = _interval(est.alpha, va, n, z)
    b, cb = _interval(est.beta, vb, n, z)
    return ConfidenceInterval(a, b, ca, cb)


def confidence_intervals(field: ParamField, n: int, level: float = 0.95):
    """Vectorised intervals over a field.

    Returns ``(alpha_lo, alpha_hi, beta_lo, beta_hi)``; entries are NaN where
    either estimate is undefined or on the boundary.
    """
    z = z_quantile(level)
    a, b = field.alpha, field.beta
    ok = (a > 0) & (a < 1) & (b > 0) & (b < 1)
    out = [np.full(a.shape, np.nan) for _ in range(4)]
    if np.any(ok):
        va, vb = asymptotic_variance(a[ok], b[ok])
        ha, hb = z * np.sqrt(va / n), z * np.sqrt(vb / n)
        out[0][ok] = np.clip(a[ok] - ha, 0, 1)
        out[1][ok] = np.clip(a[ok] + ha, 0, 1)
        out[2][ok] = np.clip(b[ok] - hb, 0, 1)
        out[3][ok] = np.clip(b[ok] + hb, 0, 1)
    return tuple(out)
