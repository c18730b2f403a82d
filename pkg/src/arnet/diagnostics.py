"""Residual-based adequacy check for the stationary AR(1) fit.

Residuals are the fitted conditional means of the innovations given each
observed transition.  They take one of four values per edge, one for each
transition type, and the test statistic is a pooled chi-square for the
two-way table of consecutive residual categories.  Its null distribution is
approximated by permuting the residual slices over time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import AdjacencySeries, ParamField
from .errors import AllEdgesDegenerate, DimensionMismatch, InsufficientData, InvalidParameters
from .mle import estimate_all

# category index k corresponds to the transition type (prev -> cur):
#   0: 1 -> 0 (value -1), 1: 0 -> 0, 2: 1 -> 1, 3: 0 -> 1 (value +1)
CATEGORY_TRANSITIONS = ((1, 0), (0, 0), (1, 1), (0, 1))


def transition_category(prev, cur):
    prev = np.asarray(prev, dtype=np.int8)
    cur = np.asarray(cur, dtype=np.int8)
    return (2 * cur + 1 - prev).astype(np.int8)


def category_values(alpha, beta) -> np.ndarray:
    """``(..., 4)`` residual values per category for the given estimates."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    return np.stack(
        [-np.ones_like(alpha), -beta / (1 - alpha), alpha / (1 - beta), np.ones_like(alpha)], axis=-1
    )


@dataclass(frozen=True, eq=False)
class ResidualSeries:
    """Residuals for the edges that admit all four category values.

    ``categories[t-1, m]`` is the category of transition ``t`` on the ``m``-th
    kept edge ``edges[m]``; ``values`` holds the matching residuals.
    """

    edges: tuple
    categories: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    category_values: np.ndarray = field(repr=False)
    excluded: tuple = ()

    @property
    def n(self) -> int:
        return self.categories.shape[0]


def residuals(series: AdjacencySeries, estimates: ParamField) -> ResidualSeries:
    """Residuals of ``series`` under ``estimates``.

    Edges whose estimates are undefined or equal to 1 have no finite residual
    for some category; they are dropped and listed in ``excluded``.
    """
    if estimates.domain != series.domain:
        raise DimensionMismatch("estimates and series have different edge domains")
    if series.n < 1:
        raise InsufficientData("need at least one transition")
    a, b = estimates.alpha, estimates.beta
    keep = ~np.isnan(a) & ~np.isnan(b) & (a < 1) & (b < 1)
    edges = series.domain.edges
    x = series.edge_paths()[:, keep]
    cats = transition_category(x[:-1], x[1:])
    vals = category_values(a[keep], b[keep])
    values = np.take_along_axis(vals.T, cats.astype(np.intp), axis=0) if cats.size else np.zeros(cats.shape)
    kept = tuple(e for e, k in zip(edges, keep) if k)
    dropped = tuple(e for e, k in zip(edges, keep) if not k)
    return ResidualSeries(kept, cats, values, vals, dropped)


def _statistic(cats: np.ndarray) -> np.ndarray:
    """Pooled contingency statistic for a batch ``(B, n, E)`` of category arrays."""
    b, n, e = cats.shape
    codes = 4 * cats[:, 1:, :].astype(np.int64) + cats[:, :-1, :]
    flat = (np.arange(b)[:, None, None] * e + np.arange(e)[None, None, :]) * 16 + codes
    table = np.bincount(flat.ravel(), minlength=b * e * 16).reshape(b, e, 4, 4).astype(float)
    rows = table.sum(axis=3)
    cols = table.sum(axis=2)
    expected = rows[..., :, None] * cols[..., None, :] / (n - 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        cell = np.where(expected > 0, (table - expected) ** 2 / expected, 0.0)
    return cell.sum(axis=(1, 2, 3)) / (n * e)


def contingency_T(res: ResidualSeries) -> float:
    """Two-way contingency statistic of consecutive residual categories.

    Cells with zero expected count contribute nothing.
    """
    if res.n < 2:
        raise InsufficientData("the contingency statistic needs n >= 2")
    if not res.edges:
        raise AllEdgesDegenerate("no edge has well-defined residual categories")
    return float(_statistic(res.categories[None])[0])


def permuted_statistics(res: ResidualSeries, perms: np.ndarray, batch: int = 64) -> np.ndarray:
    """Statistic recomputed after reordering the residual slices by each row of ``perms``."""
    perms = np.atleast_2d(perms)
    out = np.empty(perms.shape[0])
    for s in range(0, perms.shape[0], batch):
        out[s : s + batch] = _statistic(res.categories[perms[s : s + batch]])
    return out


def replicate_rng(seed: int, j: int) -> np.random.Generator:
    """Independent generator for replicate ``j`` of a run seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(j),)))


@dataclass(frozen=True, eq=False)
class PermutationReport:
    observed: float
    permuted: np.ndarray = field(repr=False)
    p_value: float
    M: int
    seed: int
    excluded: tuple = ()

    def to_dict(self) -> dict:
        return {
            "observed_T": self.observed,
            "permuted_T": [float(v) for v in self.permuted],
            "p_value": self.p_value,
            "M": self.M,
            "seed": self.seed,
            "excluded_edges": [list(e) for e in self.excluded],
        }


def permutation_test(series: AdjacencySeries, M: int = 200, seed: int = 0, estimates: ParamField = None) -> PermutationReport:
    """Permutation p-value for the stationary AR(1) fit.

    The p-value is the fraction of the ``M`` permuted statistics strictly
    greater than the observed one.  One time permutation is applied to all
    edges at once; replicate ``j`` draws it from :func:`replicate_rng`.
    """
    if M < 1:
        raise InvalidParameters("need at least one permutation")
    if series.n < 2:
        raise InsufficientData("the permutation test needs n >= 2")
    if estimates is None:
        estimates = estimate_all(series, 0.0)
    res = residuals(series, estimates)
    observed = contingency_T(res)
    perms = np.stack([replicate_rng(seed, j).permutation(res.n) for j in range(M)])
    permuted = permuted_statistics(res, perms)
    p_value = float(np.count_nonzero(observed < permuted)) / M
    return PermutationReport(observed, permuted, p_value, M, int(seed), res.excluded)
