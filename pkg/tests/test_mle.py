import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arnet.core import AdjacencySeries, ParamField, edge_domain
from arnet.errors import CIUndefined, InvalidEdge, VarianceUndefined
from arnet.mle import (
    TransitionCounts,
    asymptotic_variance,
    confidence_interval,
    confidence_intervals,
    count_matrix,
    cumulative_counts,
    estimate_all,
    estimate_edge,
    transition_counts,
    z_quantile,
)
from arnet.process import simulate

from oracles import all_series, pairs, path_counts, path_mle


def single_edge(path, kind="undirected-noself"):
    return AdjacencySeries.from_edge_paths(kind, 2, np.array(path)[:, None])


@pytest.mark.parametrize(
    "path,counts",
    [
        ([0, 1, 1, 0, 1], (2, 0, 1, 1)),
        ([0] * 6, (0, 5, 0, 0)),
        ([1, 0, 1, 0, 1], (2, 0, 2, 0)),
    ],
)
def test_transition_counts_examples(path, counts):
    assert tuple(transition_counts(single_edge(path), 1, 2)) == counts


def test_transition_counts_rejects_edges_outside_domain():
    with pytest.raises(InvalidEdge):
        transition_counts(single_edge([0, 1]), 2, 1)
    with pytest.raises(InvalidEdge):
        transition_counts(single_edge([0, 1]), 1, 1)


def test_estimate_edge_examples():
    e = estimate_edge(TransitionCounts(2, 0, 1, 1))
    assert (e.alpha, e.beta) == (1.0, 0.5)
    e = estimate_edge(TransitionCounts(0, 0, 0, 4))
    assert e.alpha is None and e.beta == 0.0
    e = estimate_edge(TransitionCounts(1, 1, 1, 1))
    assert (e.alpha, e.beta) == (0.5, 0.5)


def test_smoothing_fills_empty_denominators():
    e = estimate_edge(TransitionCounts(0, 0, 0, 4), kappa=0.5)
    assert e.alpha == 0.5 and e.beta == pytest.approx(0.5 / 5)


@pytest.mark.parametrize(
    "kind,n", [("undirected-noself", 4), ("undirected-self", 3), ("directed-noself", 3), ("directed-self", 2)]
)
def test_mle_matches_enumeration_small(kind, n):
    p = 2
    edges = pairs(kind, p)
    for x in all_series(kind, p, n):
        s = AdjacencySeries(kind, x)
        est = estimate_all(s)
        for e, (i, j) in enumerate(edges):
            path = [int(v) for v in x[:, i - 1, j - 1]]
            a, b = path_mle(path)
            assert est.edge(i, j) == (a, b)
            assert tuple(count_matrix(s)[e]) == path_counts(path)


def test_frozen_chain_estimates():
    d = edge_domain("undirected-noself", 5)
    x0 = np.triu(np.random.default_rng(0).integers(0, 2, (5, 5)), 1)
    s = simulate(ParamField.homogeneous(d, 0, 0), 8, init=x0 + x0.T, seed=1)
    est = estimate_all(s)
    defined = np.concatenate([est.alpha[~np.isnan(est.alpha)], est.beta[~np.isnan(est.beta)]])
    assert np.all(defined == 0)
    assert np.all(np.isnan(est.alpha) ^ np.isnan(est.beta))


def test_single_edge_field():
    assert len(estimate_all(single_edge([0, 1, 0])).alpha) == 1


def test_large_n_accuracy():
    d = edge_domain("undirected-noself", 10)
    est = estimate_all(simulate(ParamField.homogeneous(d, 0.3, 0.3), 2000, seed=5))
    assert np.max(np.abs(est.alpha - 0.3)) < 0.06
    assert np.max(np.abs(est.beta - 0.3)) < 0.06


def test_cumulative_counts_give_window_counts(rng):
    d = edge_domain("directed-noself", 4)
    s = simulate(ParamField(d, rng.uniform(0.1, 0.4, len(d)), rng.uniform(0.1, 0.4, len(d))), 15, seed=2)
    cum = cumulative_counts(s)
    for a, b in [(1, 15), (3, 7), (8, 8)]:
        assert np.array_equal(cum[b] - cum[a - 1], count_matrix(s.window(a - 1, b)))


def test_asymptotic_variance_examples():
    assert asymptotic_variance(0.5, 0.5) == pytest.approx((0.5, 0.5), abs=1e-15)
    assert asymptotic_variance(0.3, 0.2)[0] == pytest.approx(0.525, abs=1e-15)
    assert asymptotic_variance(0.2, 0.3)[1] == pytest.approx(0.525, abs=1e-15)
    with pytest.raises(VarianceUndefined):
        asymptotic_variance(0.0, 0.3)


def test_asymptotic_variance_matches_binomial_conditioning():
    # alpha_hat is a proportion over the ~n (1 - pi) visits to state 0
    for a, b in [(0.1, 0.4), (0.35, 0.15), (0.5, 0.5)]:
        pi = a / (a + b)
        va, vb = asymptotic_variance(a, b)
        assert va == pytest.approx(a * (1 - a) / (1 - pi), abs=1e-12)
        assert vb == pytest.approx(b * (1 - b) / pi, abs=1e-12)


def test_z_quantile():
    assert z_quantile(0.95) == pytest.approx(1.959964, abs=5e-7)
    assert z_quantile(0.0) == 0.0


def test_confidence_interval_examples():
    est = estimate_edge(TransitionCounts(50, 50, 50, 50))
    ci = confidence_interval(est, 0.95, n=100)
    assert ci.alpha == pytest.approx((0.361, 0.639), abs=5e-4)
    ci0 = confidence_interval(est, 0.0, n=100)
    assert ci0.alpha == (0.5, 0.5)
    with pytest.raises(CIUndefined):
        confidence_interval(estimate_edge(TransitionCounts(2, 0, 1, 1)))


def test_confidence_interval_clipping_flag():
    est = estimate_edge(TransitionCounts(1, 19, 10, 10))
    ci = confidence_interval(est, 0.99, n=20)
    assert ci.alpha[0] == 0.0 and ci.alpha_clipped
    assert 0.0 <= ci.beta[0] <= ci.beta[1] <= 1.0
    assert not confidence_interval(estimate_edge(TransitionCounts(50, 50, 50, 50))).alpha_clipped


@given(st.integers(1, 30), st.integers(1, 30), st.integers(1, 30), st.integers(1, 30), st.floats(0.5, 0.999))
@settings(max_examples=60, deadline=None)
def test_vectorised_intervals_match_scalar(n01, n00, n10, n11, level):
    c = TransitionCounts(n01, n00, n10, n11)
    est = estimate_edge(c)
    d = edge_domain("undirected-noself", 2)
    field = ParamField(d, est.alpha, est.beta, constrained=False)
    lo_a, hi_a, lo_b, hi_b = confidence_intervals(field, c.n, level)
    if 0 < est.alpha < 1 and 0 < est.beta < 1:
        ci = confidence_interval(est, level)
        assert (lo_a[0], hi_a[0], lo_b[0], hi_b[0]) == pytest.approx((*ci.alpha, *ci.beta), abs=1e-14)
        assert lo_a[0] <= est.alpha <= hi_a[0]
    else:
        assert np.isnan(lo_a[0])
