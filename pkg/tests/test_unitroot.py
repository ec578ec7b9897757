import numpy as np
import pytest

from coint.core.errors import SampleSizeError, SingularRegressionError
from coint.core.series import SeriesPanel
from coint.models.unitroot import (
    CriticalValues,
    adf_scan,
    adf_test,
    diff_search,
    difference,
    explore,
    reject_level,
    two_stage_search,
)


def test_linear_ramp_needs_one_difference():
    search = diff_search(np.arange(20.0), max_s=2, max_d=2)
    assert (search.optimum.s, search.optimum.d) == (1, 1)
    assert search.optimum.sigma == 0.0


def test_constant_series_keeps_the_baseline():
    search = diff_search(np.full(20, 3.0), max_s=2, max_d=2)
    assert (search.optimum.s, search.optimum.d) == (0, 0)


def test_search_rows_are_sample_deviations(rng):
    x = rng.standard_normal(40).cumsum()
    search = diff_search(x, max_s=3, max_d=2)
    assert len(search.rows) == 1 + 3 * 2
    assert search.rows[0].sigma == pytest.approx(np.std(x, ddof=1))
    for row in search.rows[1:]:
        assert row.sigma == pytest.approx(np.std(difference(x, row.s, row.d), ddof=1))
    assert search.optimum.sigma == min(row.sigma for row in search.rows)


def test_search_needs_enough_observations():
    with pytest.raises(SampleSizeError):
        diff_search(np.arange(5.0), max_s=2, max_d=2)


def test_second_stage_always_differences(rng):
    x = rng.standard_normal(60).cumsum()
    first, second = two_stage_search(x, max_s=3, max_d=2)
    assert all(row.d >= 1 for row in second.rows)
    assert first.optimum.d >= 0


def seasonal_series(T: int) -> np.ndarray:
    t = np.arange(T, dtype=float)
    return 5.0 * np.sin(2 * np.pi * t / 12) + 0.01 * t


def test_second_stage_fits_a_short_transformed_series():
    x = seasonal_series(30)
    diff_search(x, max_s=12, max_d=2)
    first, second = two_stage_search(x, max_s=12, max_d=2)
    assert first.optimum.s == 12
    n = len(x) - first.optimum.s * first.optimum.d
    assert second is not None
    assert all(row.d >= 1 and row.s * row.d + 2 <= n for row in second.rows)


def test_second_stage_is_absent_when_nothing_fits():
    first, second = two_stage_search([0.0, 1.0, 4.0, 9.0], max_s=1, max_d=2)
    assert (first.optimum.s, first.optimum.d) == (1, 2)
    assert second is None


def _ols_t_and_aic(y, X):
    coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    nobs, n_params = X.shape
    rss = resid @ resid
    cov = rss / (nobs - n_params) * np.linalg.inv(X.T @ X)
    return coef[1] / np.sqrt(cov[1, 1]), nobs * np.log(rss / nobs) + 2 * n_params


@pytest.mark.parametrize("seed", range(20))
def test_adf_matches_direct_regression(seed):
    x = np.random.default_rng(seed).standard_normal(12).cumsum()
    max_lags = 3
    dx = np.diff(x)
    trim = max_lags
    candidates = []
    for lags in range(max_lags + 1):
        columns = [np.ones(len(dx) - trim), x[trim:-1]]
        columns += [dx[trim - j : len(dx) - j] for j in range(1, lags + 1)]
        candidates.append(_ols_t_and_aic(dx[trim:], np.column_stack(columns)))
    chosen = int(np.argmin([aic for _, aic in candidates]))

    result = adf_test(x, max_lags)
    assert result.nobs == 8
    assert result.chosen_lags == chosen
    assert result.statistic == pytest.approx(candidates[chosen][0], abs=1e-9)
    assert list(result.aic_by_lag) == pytest.approx([aic for _, aic in candidates], abs=1e-9)


def test_adf_is_affine_invariant(rng):
    x = rng.standard_normal(80).cumsum()
    base = adf_test(x)
    shifted = adf_test(5.0 + 3.0 * x)
    assert shifted.statistic == pytest.approx(base.statistic, rel=1e-8)
    assert shifted.chosen_lags == base.chosen_lags


def test_adf_rejects_for_white_noise(rng):
    result = adf_test(rng.standard_normal(500))
    assert result.statistic < -3.46
    assert result.reject_at == 0.01
    assert result.rejects_unit_root


def test_adf_on_constant_series_is_singular():
    with pytest.raises(SingularRegressionError):
        adf_test(np.full(30, 2.0))


def test_adf_needs_enough_observations():
    with pytest.raises(SampleSizeError):
        adf_test(np.arange(8.0), max_lags=3)


def test_reject_level():
    cv = CriticalValues()
    assert (cv.one, cv.five, cv.ten) == (-3.46, -2.88, -2.57)
    assert reject_level(-0.89, cv) is None
    assert reject_level(-2.6, cv) == 0.10
    assert reject_level(-3.0, cv) == 0.05
    assert reject_level(-3.5, cv) == 0.01


def test_adf_scan_covers_every_lag(rng):
    x = rng.standard_normal(50).cumsum()
    stats = adf_scan(x, max_lags=2)
    assert len(stats) == 3
    result = adf_test(x, max_lags=2)
    assert stats[result.chosen_lags] == pytest.approx(result.statistic)


def test_explore_reports_each_series(random_panel):
    rows = explore(random_panel, max_s=3, max_d=2)
    assert [row.name for row in rows] == list(random_panel.names)
    assert all(len(row.adf_by_lag) == 4 for row in rows)


def test_explore_short_seasonal_panel_with_default_bounds(rng):
    noise = 0.1 * rng.standard_normal((30, 2))
    values = np.column_stack([seasonal_series(30), np.zeros(30)]) + noise.cumsum(axis=0)
    panel = SeriesPanel.from_array(values, names=["season", "walk"])
    rows = explore(panel, max_s=12, max_d=2)
    assert [row.name for row in rows] == ["season", "walk"]
    assert all(row.second is not None for row in rows)
