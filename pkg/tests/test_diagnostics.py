import numpy as np
import pytest

from arnet.core import AdjacencySeries, ParamField, edge_domain
from arnet.diagnostics import (
    category_values,
    contingency_T,
    permutation_test,
    permuted_statistics,
    residuals,
    transition_category,
)
from arnet.errors import AllEdgesDegenerate, InsufficientData
from arnet.mle import estimate_all
from arnet.process import simulate

from oracles import all_series, contingency_statistic, pairs, path_mle, residual_value


def series_from_paths(paths):
    """One path gives an undirected pair, two paths a directed pair."""
    paths = np.array(paths).T
    kind = "undirected-noself" if paths.shape[1] == 1 else "directed-noself"
    return AdjacencySeries.from_edge_paths(kind, 2, paths)


def test_category_values_examples():
    assert category_values(0.2, 0.4) == pytest.approx([-1, -0.5, 1 / 3, 1])
    assert category_values(0.5, 0.5).tolist() == [-1, -1, 1, 1]


def test_categories_are_keyed_by_transition_type():
    prev = np.array([1, 0, 1, 0])
    cur = np.array([0, 0, 1, 1])
    assert transition_category(prev, cur).tolist() == [0, 1, 2, 3]


def test_residuals_match_direct_formula(rng):
    d = edge_domain("undirected-noself", 4)
    s = simulate(ParamField(d, rng.uniform(0.1, 0.4, 6), rng.uniform(0.1, 0.4, 6)), 12, seed=3)
    est = estimate_all(s)
    res = residuals(s, est)
    x = s.edge_paths()
    for m, (i, j) in enumerate(res.edges):
        a, b = est.edge(i, j)
        e = d.index(i, j)
        for t in range(1, s.n + 1):
            assert res.values[t - 1, m] == pytest.approx(residual_value(x[t - 1, e], x[t, e], a, b), abs=1e-15)


def test_up_transition_residual_is_one():
    s = series_from_paths([[0, 1, 0, 1, 1]])
    res = residuals(s, ParamField(s.domain, 0.3, 0.3))
    assert res.values[0, 0] == 1.0


def test_degenerate_edges_are_excluded():
    s = series_from_paths([[0, 1, 1, 0, 0, 1], [0, 0, 0, 0, 0, 0]])
    res = residuals(s, estimate_all(s))
    assert res.edges == ((1, 2),)
    assert res.excluded == ((2, 1),)
    s = series_from_paths([[0, 0, 0], [1, 1, 1]])
    with pytest.raises(AllEdgesDegenerate):
        contingency_T(residuals(s, estimate_all(s)))


def test_statistic_zero_for_single_pair():
    s = series_from_paths([[0, 1, 1]])
    assert contingency_T(residuals(s, ParamField(s.domain, 0.3, 0.3))) == 0.0


def test_statistic_zero_under_exact_independence():
    # consecutive categories (k, l) cycle through a product table: 3 -> 2 -> 0 -> 1 -> 3 ...
    # gives one count per cell on a 4-cycle with uniform margins
    path = [0, 1, 1, 0, 0] * 4 + [0]
    s = series_from_paths([path])
    res = residuals(s, ParamField(s.domain, 0.3, 0.3))
    cats = res.categories[:, 0]
    table = np.zeros((4, 4))
    for t in range(1, len(cats)):
        table[cats[t], cats[t - 1]] += 1
    expected = np.outer(table.sum(1), table.sum(0)) / table.sum()
    oracle = contingency_statistic([path], [(0.3, 0.3)])
    assert contingency_T(res) == pytest.approx(oracle, abs=1e-12)
    assert np.all(table[expected == 0] == 0)


def test_statistic_alternation_matches_oracle():
    path = [0, 1, 0, 1, 0, 1]
    s = series_from_paths([path, [0, 0, 1, 1, 0, 1]])
    est = ParamField(s.domain, 0.4, 0.4)
    oracle = contingency_statistic([path, [0, 0, 1, 1, 0, 1]], [(0.4, 0.4)] * 2)
    assert contingency_T(residuals(s, est)) == pytest.approx(oracle, abs=1e-12)


@pytest.mark.parametrize("kind,p,n", [("directed-noself", 2, 4), ("undirected-noself", 3, 3)])
def test_statistic_matches_enumeration(kind, p, n):
    edges = pairs(kind, p)
    checked = 0
    for x in all_series(kind, p, n):
        s = AdjacencySeries(kind, x)
        paths = [[int(v) for v in x[:, i - 1, j - 1]] for i, j in edges]
        oracle = contingency_statistic(paths, [path_mle(pth) for pth in paths])
        if oracle is None:
            with pytest.raises(AllEdgesDegenerate):
                contingency_T(residuals(s, estimate_all(s)))
            continue
        assert contingency_T(residuals(s, estimate_all(s))) == pytest.approx(oracle, abs=1e-10)
        checked += 1
    assert checked > 0


def test_permutation_identity_reproduces_observed(rng):
    d = edge_domain("undirected-noself", 6)
    s = simulate(ParamField.homogeneous(d, 0.3, 0.3), 20, seed=1)
    res = residuals(s, estimate_all(s))
    perms = np.stack([np.arange(res.n), rng.permutation(res.n)])
    out = permuted_statistics(res, perms)
    assert out[0] == pytest.approx(contingency_T(res), abs=1e-14)
    # one permutation applied to all edges: recompute edge by edge
    shuffled = res.categories[perms[1]]
    manual = 0.0
    for m in range(shuffled.shape[1]):
        col = shuffled[:, m]
        tab = np.zeros((4, 4))
        for t in range(1, len(col)):
            tab[col[t], col[t - 1]] += 1
        e = np.outer(tab.sum(1), tab.sum(0)) / (res.n - 1)
        manual += np.sum(np.where(e > 0, (tab - e) ** 2 / np.where(e > 0, e, 1), 0))
    assert out[1] == pytest.approx(manual / (res.n * shuffled.shape[1]), abs=1e-12)


def test_p_value_boundaries():
    d = edge_domain("undirected-noself", 5)
    s = simulate(ParamField.homogeneous(d, 0.3, 0.3), 30, seed=2)
    rep = permutation_test(s, M=50, seed=4)
    assert rep.p_value == np.count_nonzero(rep.observed < rep.permuted) / 50
    assert 0.0 <= rep.p_value <= 1.0


def test_permutation_test_is_reproducible():
    d = edge_domain("undirected-noself", 6)
    s = simulate(ParamField.homogeneous(d, 0.3, 0.3), 25, seed=7)
    a, b = permutation_test(s, 40, seed=3), permutation_test(s, 40, seed=3)
    assert a.to_dict() == b.to_dict()
    assert np.array_equal(a.permuted[:20], permutation_test(s, 20, seed=3).permuted)


def test_permutation_test_needs_two_transitions():
    s = series_from_paths([[0, 1]])
    with pytest.raises(InsufficientData):
        permutation_test(s, 10)
