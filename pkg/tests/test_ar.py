import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.signal import lfilter
from statsmodels.tsa.stattools import pacf_yw

from gasforecast import ar
from gasforecast.data import DailySeries
from gasforecast.errors import MissingLagValue, RankDeficient, SeriesTooShort, UncoveredHorizon

D = dt.date
ORIGIN = D(2010, 1, 1)


def series(values, origin=ORIGIN):
    return DailySeries(origin, np.asarray(values, dtype=float), "demand")


def simulate_ar(coef, n, seed, intercept=0.0, burn=500):
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(n + burn) + intercept
    return lfilter([1.0], np.r_[1.0, -np.asarray(coef)], e)[burn:]


class TestPacf:
    def test_white_noise(self):
        n = 5000
        x = np.random.default_rng(1).standard_normal(n)
        p = ar.pacf(x, 40)
        assert np.mean(np.abs(p) < 3 / np.sqrt(n)) >= 0.95

    def test_ar1(self):
        p = ar.pacf(simulate_ar([0.8], 5000, seed=2), 5)
        assert p[0] == pytest.approx(0.8, abs=0.05)
        assert p[1] == pytest.approx(0.0, abs=0.05)

    def test_ar3_cuts_off(self):
        p = ar.pacf(simulate_ar([0.5, -0.3, 0.2], 5000, seed=3), 8)
        assert p[2] == pytest.approx(0.2, abs=0.05)
        assert np.all(np.abs(p[3:]) < 4 / np.sqrt(5000))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-100, 100), min_size=10, max_size=80).filter(lambda v: np.ptp(v) > 1e-3))
    def test_first_lag_is_autocorrelation(self, values):
        x = np.asarray(values) - np.mean(values)
        rho1 = (x[:-1] @ x[1:]) / (x @ x)
        assert ar.pacf(values, 1)[0] == pytest.approx(rho1, abs=1e-10)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_independent_yule_walker(self, seed):
        x = simulate_ar([0.6, 0.2], 800, seed)
        expected = pacf_yw(x, nlags=10, method="mle")[1:]
        np.testing.assert_allclose(ar.pacf(series(x), 10), expected, atol=1e-10)

    def test_bounded(self):
        p = ar.pacf(simulate_ar([0.9], 300, seed=4) + np.arange(300), 20)
        assert np.all(np.abs(p) <= 1 + 1e-12)

    def test_too_short(self):
        with pytest.raises(SeriesTooShort):
            ar.pacf([1.0, 2.0, 3.0], 5)
        with pytest.raises(SeriesTooShort):
            ar.pacf(np.ones(50), 3)


class TestFit:
    def test_exact_recurrence(self):
        x = [10.0]
        for _ in range(29):
            x.append(0.5 * x[-1] + 1)
        model = ar.fit_ar(series(x), p=1)
        assert model.lag_coefficients[0] == pytest.approx(0.5, abs=1e-10)
        assert model.intercept == pytest.approx(1.0, abs=1e-10)
        assert model.fit_range == (ORIGIN, ORIGIN + dt.timedelta(days=29))

    def test_monte_carlo_within_four_standard_errors(self):
        truth = np.array([0.5, -0.3, 0.2])
        hits = 0
        for seed in range(100):
            x = simulate_ar(truth, 5000, seed, intercept=3.0)
            model = ar.fit_ar(series(x), p=3)
            X = np.column_stack([np.ones(4997), x[2:-1], x[1:-2], x[:-3]])
            y = x[3:]
            beta = np.linalg.inv(X.T @ X) @ X.T @ y
            sigma2 = np.sum((y - X @ beta) ** 2) / (len(y) - 4)
            se = np.sqrt(sigma2 * np.diag(np.linalg.inv(X.T @ X)))[1:]
            hits += np.all(np.abs(model.lag_coefficients - truth) <= 4 * se)
        assert hits >= 99

    def test_fit_range_restricts_data(self):
        x = simulate_ar([0.7], 1000, seed=5)
        rng = (D(2010, 3, 1), D(2010, 12, 31))
        a = ar.fit_ar(series(x), 2, rng)
        y = x.copy()
        y[: series(x).index_of(rng[0])] = 1e6
        b = ar.fit_ar(series(y), 2, rng)
        assert np.array_equal(a.lag_coefficients, b.lag_coefficients) and a.intercept == b.intercept

    def test_constant_series(self):
        with pytest.raises(RankDeficient):
            ar.fit_ar(series(np.full(100, 7.0)), 3)

    def test_too_short(self):
        with pytest.raises(SeriesTooShort):
            ar.fit_ar(series(np.arange(6.0)), 3)

    def test_gap_in_window(self):
        x = simulate_ar([0.7], 100, seed=6)
        x[50] = np.nan
        with pytest.raises(ValueError):
            ar.fit_ar(series(x), 3)


class TestForecast:
    def test_persistence(self):
        model = ar.ARModel(1, np.array([1.0]), 0.0, (ORIGIN, ORIGIN))
        x = 50 + simulate_ar([0.9], 60, seed=7)
        r = ar.forecast_ar(model, (D(2010, 1, 2), D(2010, 3, 1)), series(x))
        np.testing.assert_array_equal(r.predictions, x[:-1])
        np.testing.assert_array_equal(r.actuals, x[1:])

    def test_fixed_point(self):
        # AR(1) fitted on a recurrence converging to 2; a constant series at 2 stays there
        x = [10.0]
        for _ in range(29):
            x.append(0.5 * x[-1] + 1)
        model = ar.fit_ar(series(x), p=1)
        r = ar.forecast_ar(model, (D(2011, 1, 1), D(2011, 12, 31)), series(np.full(800, 2.0)))
        np.testing.assert_allclose(r.predictions, 2.0, rtol=1e-10)

    def test_in_sample_reproduces_fitted_values(self):
        x = simulate_ar([0.5, 0.2], 400, seed=8, intercept=10)
        s = series(x)
        model = ar.fit_ar(s, 2)
        r = ar.forecast_ar(model, (ORIGIN + dt.timedelta(days=2), s.end), s)
        X = np.column_stack([np.ones(398), x[1:-1], x[:-2]])
        fitted = X @ np.r_[model.intercept, model.lag_coefficients]
        np.testing.assert_allclose(r.predictions, fitted, rtol=1e-12)

    def test_missing_lags(self):
        x = simulate_ar([0.5], 100, seed=9)
        model = ar.fit_ar(series(x), 3)
        with pytest.raises(MissingLagValue) as err:
            ar.forecast_ar(model, (D(2010, 1, 2), D(2010, 2, 1)), series(x))
        assert err.value.date == D(2009, 12, 30)
        x[40] = np.nan
        with pytest.raises(MissingLagValue):
            ar.forecast_ar(model, (D(2010, 1, 20), D(2010, 3, 1)), series(x))

    def test_horizon_beyond_actuals(self):
        x = simulate_ar([0.5], 100, seed=10)
        model = ar.fit_ar(series(x), 1)
        r = ar.forecast_ar(model, (D(2010, 4, 11), D(2010, 4, 11)), series(x))
        assert r.actuals is None and len(r) == 1


class TestRollover:
    def test_annual_reestimation(self, six_years):
        out = ar.rollover_ar(six_years.demand, [2011, 2012, 2013], p=3)
        assert [r.year for _, r in out] == [2011, 2012, 2013]
        for (model, r), year in zip(out, (2011, 2012, 2013)):
            assert model.fit_range == (D(year - 1, 1, 1), D(year - 1, 12, 31))
            assert len(r) == (366 if year == 2012 else 365) and r.metrics is not None
            assert r.kind == "AR(3)"

    def test_uncovered_year(self, six_years):
        with pytest.raises(UncoveredHorizon):
            ar.rollover_ar(six_years.demand, [2016])

    def test_coefficient_table_layout(self):
        # a realistic three-lag row as a layout reference
        m = ar.ARModel(3, np.array([1.3244, -0.5227, 0.1917]), 12.0, (D(2013, 1, 1), D(2013, 12, 31)))
        text = ar.format_coefficient_table([(2014, m)], header="invocation: t")
        assert text.splitlines() == ["# invocation: t", "year,lag1,lag2,lag3", "2014,1.3244,-0.5227,0.1917"]

    def test_coefficient_table_mixed_orders(self):
        a = ar.ARModel(1, np.array([0.5]), 0.0, (ORIGIN, ORIGIN))
        b = ar.ARModel(2, np.array([0.25, 0.125]), 0.0, (ORIGIN, ORIGIN))
        assert ar.format_coefficient_table([(2011, a), (2012, b)]).splitlines() == [
            "year,lag1,lag2", "2011,0.5,", "2012,0.25,0.125"]
