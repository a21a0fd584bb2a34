import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gasforecast.data import CalendarConfig, DailySeries, DayClass, classify_day
from gasforecast.errors import MissingHolidayMean, NoSummerData
from gasforecast.segregation import (
    format_ratio_table,
    industrial_ratio_holiday,
    industrial_ratio_weekend,
    seasonal_means,
    segregate,
)
from gasforecast.synth import GeneratorSpec, generate

D = dt.date
HOLIDAYS = (D(2012, 5, 1), D(2012, 5, 2), D(2012, 8, 30), D(2013, 7, 15))
CAL = CalendarConfig(holidays=HOLIDAYS)


def class_constant(wd, we, h, cal=CAL, start=D(2012, 1, 1), n=731):
    dates = [start + dt.timedelta(days=i) for i in range(n)]
    level = {DayClass.WEEKDAY: wd, DayClass.WEEKEND: we, DayClass.HOLIDAY: h}
    return DailySeries(start, np.array([level[classify_day(d, cal)] for d in dates], dtype=float), "city")


class TestSeasonalMeans:
    def test_class_constant(self):
        m = seasonal_means(class_constant(180, 120, 100), CAL, 2012)
        assert (m.wd_mean, m.we_mean, m.h_mean) == (180, 120, 100)
        assert m.n_h == 3 and m.n_wd + m.n_we + m.n_h == 183

    def test_excluded_holidays(self):
        cal = CalendarConfig(holidays=HOLIDAYS, exclusion_windows=((D(2012, 4, 28), D(2012, 5, 5)), (D(2012, 8, 30), D(2012, 8, 30))))
        m = seasonal_means(class_constant(180, 120, 100), cal, 2012)
        assert m.h_mean is None and m.n_h == 0
        assert m.wd_mean == 180

    def test_winter_days_ignored(self):
        s = class_constant(180, 120, 100)
        v = s.values.copy()
        v[[d.month not in range(4, 10) for d in s.dates()]] = 1e6
        assert seasonal_means(s.with_values(v), CAL, 2012).wd_mean == 180

    def test_custom_window(self):
        m = seasonal_means(class_constant(180, 120, 100), CAL, 2012, summer_months={6})
        assert m.h_mean is None and m.n_wd + m.n_we == 30

    def test_no_summer_data(self):
        s = DailySeries(D(2012, 10, 1), np.full(150, 5.0), "city")
        with pytest.raises(NoSummerData):
            seasonal_means(s, CAL, 2012)
        with pytest.raises(NoSummerData):
            segregate(s, CAL)


class TestRatios:
    def test_reference_values(self):
        assert industrial_ratio_holiday(181.19, 100) == pytest.approx(81.19, abs=1e-10)
        assert industrial_ratio_weekend(121.15, 100) == pytest.approx(21.15, abs=1e-10)

    def test_no_industry(self):
        assert industrial_ratio_holiday(150, 150) == 0
        assert industrial_ratio_weekend(150, 150) == 0

    def test_missing_holiday(self):
        with pytest.raises(MissingHolidayMean):
            industrial_ratio_holiday(100, None)
        with pytest.raises(MissingHolidayMean):
            industrial_ratio_holiday(100, 0.0)
        with pytest.raises(ValueError):
            industrial_ratio_weekend(100, 0.0)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(1, 1e4), st.floats(0, 1e4), st.floats(0, 1))
    def test_holiday_ratio_dominates(self, r, i, frac):
        s = class_constant(r + i, r + frac * i, r)
        (rep,) = segregate(s, CAL, [2012])
        assert rep.ratio_holiday >= rep.ratio_weekend - 1e-9
        assert rep.ratio_holiday == pytest.approx(100 * i / r, rel=1e-9, abs=1e-9)
        assert rep.ratio_weekend == pytest.approx(100 * (i - frac * i) / (r + frac * i), rel=1e-9, abs=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(1e-3, 1e3))
    def test_scale_invariance(self, c):
        data = generate(GeneratorSpec(seed=3), CalendarConfig(holidays=HOLIDAYS), n_days=800, origin=D(2012, 1, 1))
        a = segregate(data.demand, CAL, [2012])[0]
        b = segregate(data.demand.with_values(c * data.demand.values), CAL, [2012])[0]
        assert b.ratio_holiday == pytest.approx(a.ratio_holiday, rel=1e-9)
        assert b.ratio_weekend == pytest.approx(a.ratio_weekend, rel=1e-9)

    def test_residential_demand_pulls_toward_zero(self):
        flat = dict(annual_amplitudes=(), weekly_amplitudes=(), temp_coefficient=0.0, trend_per_day=0.0,
                    noise_sigma=0.0, industrial_level=80.0)
        previous = None
        for base in (50.0, 100.0, 200.0, 400.0):
            data = generate(GeneratorSpec(base_level=base, **flat), CAL, n_days=731, origin=D(2012, 1, 1))
            rep = segregate(data.demand, CAL, [2012])[0]
            current = (rep.ratio_holiday, rep.ratio_weekend)
            if previous:
                assert 0 < current[0] < previous[0] and 0 < current[1] < previous[1]
            previous = current


class TestReport:
    def test_years_default_to_summers_present(self):
        reps = segregate(class_constant(180, 120, 100), CAL)
        assert [r.year for r in reps] == [2012, 2013]
        assert reps[1].n_h == 1 and reps[0].label == "city"

    def test_no_holidays_leaves_holiday_ratio_blank(self):
        reps = segregate(class_constant(180, 120, 180, cal=CalendarConfig()), CalendarConfig())
        assert all(r.ratio_holiday is None and r.ratio_weekend == pytest.approx(50) for r in reps)

    def test_table(self):
        a = segregate(class_constant(180, 120, 100), CAL)
        b = segregate(class_constant(150, 150, 100, start=D(2013, 1, 1), n=365), CAL)
        text = format_ratio_table({"city_a": a, "city_b": b}, "holiday", header="invocation: t")
        assert text.splitlines() == ["# invocation: t", "year,city_a,city_b", "2012,80.0000,", "2013,80.0000,50.0000"]
        weekend = format_ratio_table({"city_a": a}, "weekend").splitlines()
        assert weekend == ["year,city_a", "2012,50.0000", "2013,50.0000"]
