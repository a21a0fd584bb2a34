"""Industrial share of demand from summer weekday, weekend and holiday consumption.

With weekday demand ``WD = R + I``, weekend ``WE = R + I0`` and holiday ``H = R``
(residential ``R``, industrial ``I``, weekend industrial remainder ``I0``):

* ``100 * (WD / H - 1)`` estimates ``100 * I / R``;
* ``100 * (WD / WE - 1)`` equals ``100 * (I - I0) / (R + I0)``.
"""

from __future__ import annotations

import datetime as dt
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .data import CalendarConfig, DailySeries, DayClass, classify_day
from .errors import MissingHolidayMean, NoSummerData

SUMMER_MONTHS = frozenset(range(4, 10))


@dataclass(frozen=True)
class SeasonalMeans:
    wd_mean: float | None
    we_mean: float | None
    h_mean: float | None
    n_wd: int
    n_we: int
    n_h: int


@dataclass(frozen=True)
class SegregationReport:
    year: int
    wd_mean: float
    we_mean: float | None
    h_mean: float | None
    ratio_holiday: float | None
    ratio_weekend: float | None
    n_wd: int
    n_we: int
    n_h: int
    label: str = ""


def seasonal_means(
    demand: DailySeries,
    cal: CalendarConfig,
    year: int,
    summer_months: Iterable[int] = SUMMER_MONTHS,
) -> SeasonalMeans:
    """Mean demand per day class over the summer months of ``year``.

    Days in ``cal.exclusion_windows`` and missing days are skipped. A class with no
    remaining days gets a mean of ``None``.
    """
    months = frozenset(summer_months)
    buckets: dict[DayClass, list[float]] = {c: [] for c in DayClass}
    start, end = max(dt.date(year, 1, 1), demand.origin), min(dt.date(year, 12, 31), demand.end)
    window = demand.window(start, end) if start <= end else None
    for date, value in zip(window.dates(), window.values) if window else ():
        if date.month not in months or math.isnan(value) or cal.is_excluded(date):
            continue
        buckets[classify_day(date, cal)].append(float(value))
    if not any(buckets.values()):
        raise NoSummerData(f"no {demand.label or 'demand'} data in months {sorted(months)} of {year}")

    def mean(c: DayClass) -> float | None:
        return float(np.mean(buckets[c])) if buckets[c] else None

    return SeasonalMeans(
        mean(DayClass.WEEKDAY), mean(DayClass.WEEKEND), mean(DayClass.HOLIDAY),
        len(buckets[DayClass.WEEKDAY]), len(buckets[DayClass.WEEKEND]), len(buckets[DayClass.HOLIDAY]),
    )


def industrial_ratio_holiday(wd_mean: float, h_mean: float | None) -> float:
    """``100 * (WD / H - 1)``, the industrial-to-residential ratio in percent."""
    if h_mean is None or not h_mean > 0:
        raise MissingHolidayMean("holiday mean is missing or not positive")
    return 100.0 * (wd_mean / h_mean - 1.0)


def industrial_ratio_weekend(wd_mean: float, we_mean: float) -> float:
    if not we_mean > 0:
        raise ValueError("weekend mean must be positive")
    return 100.0 * (wd_mean / we_mean - 1.0)


def summer_years(demand: DailySeries, summer_months: Iterable[int] = SUMMER_MONTHS) -> list[int]:
    months = frozenset(summer_months)
    return sorted({d.year for d, v in zip(demand.dates(), demand.values) if d.month in months and not math.isnan(v)})


def segregate(
    demand: DailySeries,
    cal: CalendarConfig,
    years: Sequence[int] | None = None,
    summer_months: Iterable[int] = SUMMER_MONTHS,
) -> list[SegregationReport]:
    """One report per year; the holiday ratio is ``None`` when no holiday falls in the window."""
    months = frozenset(summer_months)
    if years is None:
        years = summer_years(demand, months)
        if not years:
            raise NoSummerData(f"{demand.label or 'demand'} has no data in months {sorted(months)}")
    reports = []
    for year in years:
        m = seasonal_means(demand, cal, year, months)
        if m.wd_mean is None:
            raise NoSummerData(f"no summer weekdays for {year}")
        reports.append(SegregationReport(
            year=year,
            wd_mean=m.wd_mean,
            we_mean=m.we_mean,
            h_mean=m.h_mean,
            ratio_holiday=industrial_ratio_holiday(m.wd_mean, m.h_mean) if m.h_mean else None,
            ratio_weekend=industrial_ratio_weekend(m.wd_mean, m.we_mean) if m.we_mean else None,
            n_wd=m.n_wd, n_we=m.n_we, n_h=m.n_h,
            label=demand.label,
        ))
    return reports


def format_ratio_table(
    reports: Mapping[str, Sequence[SegregationReport]],
    ratio: str,
    header: str | None = None,
) -> str:
    """Year-by-series table of ``ratio`` (``"holiday"`` or ``"weekend"``); blanks where undefined."""
    attr = {"holiday": "ratio_holiday", "weekend": "ratio_weekend"}[ratio]
    labels = list(reports)
    table: dict[int, dict[str, float | None]] = {}
    for label, rows in reports.items():
        for r in rows:
            table.setdefault(r.year, {})[label] = getattr(r, attr)
    out = io.StringIO()
    if header:
        out.write(f"# {header}\n")
    out.write("year," + ",".join(labels) + "\n")
    for year in sorted(table):
        cells = [table[year].get(label) for label in labels]
        out.write(f"{year}," + ",".join("" if c is None else f"{c:.4f}" for c in cells) + "\n")
    return out.getvalue()
