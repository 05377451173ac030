"""PCA, sign-estimation, and trend tests against numpy/closed-form oracles."""

import math

import numpy as np
import pytest

from themis.analysis import (AnalysisError, SIGN_GLYPHS, estimate_signs,
                             extrapolate, fit_trend, jacobi_eigh, pca,
                             select_key_variables, sign_matrix_table,
                             standardize)
from themis.model import AdjacencyMatrix, ParameterSeries


def make_series(name, years, values):
    return ParameterSeries(name, tuple(zip(years, (float(v) for v in values))))


def random_panel(rng, n_vars=5, n_years=30, first_year=1990):
    years = tuple(range(first_year, first_year + n_years))
    data = rng.standard_normal((n_years, n_vars)) * rng.uniform(0.5, 4.0, n_vars)
    data += rng.uniform(-10.0, 10.0, n_vars)
    return [make_series(f"v{j}", years, data[:, j]) for j in range(n_vars)]


# --- standardization -------------------------------------------------------

def test_standardize_zscores_and_year_intersection():
    a = make_series("a", (2000, 2001, 2002, 2003), (1, 2, 3, 4))
    b = make_series("b", (2001, 2002, 2003, 2004), (10, 10, 40, 10))
    panel = standardize([a, b])
    assert panel.years == (2001, 2002, 2003)
    assert panel.values[:, 0].mean() == pytest.approx(0.0, abs=1e-12)
    assert panel.values[:, 0].std(ddof=1) == pytest.approx(1.0, abs=1e-12)


def test_standardize_flags_constant_columns():
    a = make_series("a", (2000, 2001, 2002), (5, 5, 5))
    b = make_series("b", (2000, 2001, 2002), (1, 2, 3))
    panel = standardize([a, b])
    assert panel.constant == (True, False)
    assert np.all(panel.values[:, 0] == 0.0)


def test_standardize_rejects_disjoint_years():
    a = make_series("a", (2000, 2001), (1, 2))
    b = make_series("b", (2005, 2006), (1, 2))
    with pytest.raises(AnalysisError):
        standardize([a, b])


# --- eigendecomposition ----------------------------------------------------

def test_jacobi_matches_numpy_eigh():
    rng = np.random.default_rng(314)
    for _ in range(50):
        n = int(rng.integers(2, 9))
        m = rng.standard_normal((n, n))
        a = m @ m.T  # symmetric PSD
        values, vectors = jacobi_eigh(a)
        expected = np.sort(np.linalg.eigvalsh(a))[::-1]
        assert np.allclose(values, expected, atol=1e-8)
        # orthonormal columns, correct reconstruction
        assert np.allclose(vectors.T @ vectors, np.eye(n), atol=1e-8)
        recon = vectors @ np.diag(values) @ vectors.T
        assert np.linalg.norm(recon - a) < 1e-7
        assert float(np.sum(values)) == pytest.approx(np.trace(a), abs=1e-8)


def test_jacobi_rejects_nonsymmetric():
    with pytest.raises(AnalysisError):
        jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))


# --- PCA -------------------------------------------------------------------

def test_pca_ratios_sum_to_one_and_components_orthonormal():
    rng = np.random.default_rng(21)
    panel = standardize(random_panel(rng, n_vars=6))
    result = pca(panel)
    assert sum(result.explained_variance_ratio) == pytest.approx(1.0, abs=1e-9)
    assert list(result.eigenvalues) == sorted(result.eigenvalues, reverse=True)
    gram = result.components @ result.components.T
    assert np.allclose(gram, np.eye(len(panel.variables)), atol=1e-8)


def test_pca_matches_numpy_on_correlation_matrix():
    rng = np.random.default_rng(22)
    panel = standardize(random_panel(rng, n_vars=5))
    result = pca(panel)
    cov = np.cov(panel.values, rowvar=False, ddof=1)
    expected = np.sort(np.linalg.eigvalsh(cov))[::-1]
    assert np.allclose(result.eigenvalues, expected, atol=1e-9)


def test_pca_sign_convention_deterministic():
    rng = np.random.default_rng(23)
    panel = standardize(random_panel(rng))
    result = pca(panel)
    for row in result.components:
        assert row[int(np.argmax(np.abs(row)))] > 0


def test_select_key_variables_two_block_structure():
    """Two noisy clusters: one nominee per cluster at a mid threshold."""
    rng = np.random.default_rng(77)
    years = tuple(range(1980, 2040))
    base1 = np.cumsum(rng.standard_normal(len(years)))
    base2 = np.cumsum(rng.standard_normal(len(years)))
    series = []
    for i in range(3):
        series.append(make_series(f"a{i}", years,
                                  base1 + 0.05 * rng.standard_normal(len(years))))
    for i in range(3):
        series.append(make_series(f"b{i}", years,
                                  base2 + 0.05 * rng.standard_normal(len(years))))
    panel = standardize(series)
    result = pca(panel)
    keys = select_key_variables(result, panel, variance_threshold=0.95,
                                max_vars=7)
    assert len(keys.selected) == 2
    groups = {k[0] for k in keys.selected}
    assert groups == {"a", "b"}


def test_select_key_variables_respects_max_vars():
    rng = np.random.default_rng(78)
    panel = standardize(random_panel(rng, n_vars=8))
    result = pca(panel)
    keys = select_key_variables(result, panel, variance_threshold=1.0, max_vars=3)
    assert len(keys.selected) <= 3


# --- sign estimation -------------------------------------------------------

def lagged_pair(rng, sign, n=120):
    """Driver series and a follower that echoes its differences next year."""
    d = rng.standard_normal(n)
    x = np.cumsum(d)
    follow = np.zeros(n)
    follow[1:] = sign * d[:-1]
    y = np.cumsum(follow + 0.1 * rng.standard_normal(n))
    return x, y


@pytest.mark.parametrize("direction", [1.0, -1.0])
def test_estimate_signs_recovers_planted_lag(direction):
    rng = np.random.default_rng(int(direction) + 10)
    x, y = lagged_pair(rng, direction)
    years = tuple(range(1900, 1900 + len(x)))
    panel = standardize([make_series("x", years, x), make_series("y", years, y)])
    result = pca(panel)
    keys = select_key_variables(result, panel, variance_threshold=1.0, max_vars=2)
    assert set(keys.selected) == {"x", "y"}
    signs = estimate_signs(panel, keys, adjacency=None, r_threshold=0.3)
    expected = "plus" if direction > 0 else "minus"
    assert signs.entry("x", "y") == expected
    assert signs.entry("x", "x") == "self"


def test_estimate_signs_none_below_threshold():
    rng = np.random.default_rng(55)
    years = tuple(range(1900, 2000))
    a = np.cumsum(rng.standard_normal(100))
    b = np.cumsum(rng.standard_normal(100))
    panel = standardize([make_series("a", years, a), make_series("b", years, b)])
    keys = select_key_variables(pca(panel), panel, 1.0, 2)
    signs = estimate_signs(panel, keys, adjacency=None, r_threshold=0.9)
    assert signs.entry("a", "b") == "none"


def test_estimate_signs_adjacency_exclusion_is_directional():
    rng = np.random.default_rng(56)
    x, y = lagged_pair(rng, 1.0)
    years = tuple(range(1900, 1900 + len(x)))
    panel = standardize([make_series("x", years, x), make_series("y", years, y)])
    keys = select_key_variables(pca(panel), panel, 1.0, 2)
    adjacency = AdjacencyMatrix(
        variables=("x", "y"),
        related=((True, False), (True, True)))
    signs = estimate_signs(panel, keys, adjacency, r_threshold=0.3)
    assert signs.entry("x", "y") == "none"  # excluded, despite strong signal
    assert signs.evidence[0][1] is None


def test_sign_matrix_table_glyphs():
    rng = np.random.default_rng(57)
    x, y = lagged_pair(rng, 1.0)
    years = tuple(range(1900, 1900 + len(x)))
    panel = standardize([make_series("x", years, x), make_series("y", years, y)])
    keys = select_key_variables(pca(panel), panel, 1.0, 2)
    signs = estimate_signs(panel, keys, None, 0.3)
    table = sign_matrix_table(signs)
    assert SIGN_GLYPHS["self"] == "1"
    assert "1" in table and "+" in table
    assert set(table.splitlines()[0].split()) == {"x", "y"}


# --- trends ----------------------------------------------------------------

def test_fit_trend_matches_polyfit():
    rng = np.random.default_rng(91)
    for _ in range(25):
        n = int(rng.integers(3, 40))
        years = np.sort(rng.choice(np.arange(1950, 2020), n, replace=False))
        values = rng.standard_normal(n) * 5 + 0.3 * years
        trend = fit_trend(make_series("p", years.tolist(), values))
        slope, intercept = np.polyfit(years.astype(float), values, 1)
        assert trend.slope == pytest.approx(slope, abs=1e-8)
        assert trend.intercept == pytest.approx(intercept, abs=1e-6)
        sse = float(((values - (slope * years + intercept)) ** 2).sum())
        assert trend.residual_std == pytest.approx(
            math.sqrt(sse / (n - 2)), abs=1e-8)


def test_extrapolate_prediction_interval_widens():
    years = list(range(2000, 2020))
    rng = np.random.default_rng(92)
    values = 2.0 * np.arange(20) + rng.standard_normal(20)
    trend = fit_trend(make_series("p", years, values))
    mean_near, std_near = extrapolate(trend, 2025)
    mean_far, std_far = extrapolate(trend, 2045)
    assert std_far > std_near > trend.residual_std
    assert mean_far == pytest.approx(trend.slope * 2045 + trend.intercept)


def test_extrapolate_rejects_past_years():
    trend = fit_trend(make_series("p", [2000, 2001, 2002], [1.0, 2.0, 3.0]))
    with pytest.raises(AnalysisError):
        extrapolate(trend, 1999)


def test_fit_trend_exact_line_has_zero_residual():
    trend = fit_trend(make_series("p", [2000, 2001, 2002, 2003],
                                  [1.0, 3.0, 5.0, 7.0]))
    assert trend.slope == pytest.approx(2.0, abs=1e-12)
    assert trend.residual_std == pytest.approx(0.0, abs=1e-12)
    mean, std = extrapolate(trend, 2010)
    assert mean == pytest.approx(21.0, abs=1e-9)
    assert std == 0.0
