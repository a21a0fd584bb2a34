"""AR(p) benchmark: partial autocorrelations, least-squares fit, one-step forecasts."""

from __future__ import annotations

import datetime as dt
import io
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import ols
from .data import DailySeries
from .design import DesignMatrix
from .errors import MissingLagValue, SeriesTooShort, UncoveredHorizon
from .metrics import evaluate
from .models import DateRange, ForecastResult

ONE_DAY = dt.timedelta(days=1)


@dataclass(frozen=True, eq=False)
class ARModel:
    order: int
    lag_coefficients: np.ndarray
    intercept: float
    fit_range: DateRange
    condition_estimate: float = float("nan")

    def __post_init__(self) -> None:
        if self.order < 1 or len(self.lag_coefficients) != self.order:
            raise ValueError("AR order must be >= 1 and match the coefficient count")
        if not (np.isfinite(self.lag_coefficients).all() and np.isfinite(self.intercept)):
            raise ValueError("AR coefficients must be finite")


def pacf(series: DailySeries | Sequence[float], max_lag: int) -> np.ndarray:
    """Partial autocorrelations at lags ``1..max_lag`` via the Durbin-Levinson recursion.

    Uses the biased (divide by ``n``) autocovariance of the demeaned series, so the
    lag-1 value is the lag-1 sample autocorrelation.
    """
    x = np.asarray(series.values if isinstance(series, DailySeries) else series, dtype=float)
    n = x.size
    if max_lag < 1 or n <= max_lag + 1:
        raise SeriesTooShort(f"need more than {max_lag + 1} values for {max_lag} lags, got {n}")
    x = x - x.mean()
    gamma0 = x @ x / n
    if gamma0 == 0:
        raise SeriesTooShort("constant series has no autocorrelation structure")
    rho = np.array([x[: n - k] @ x[k:] / n for k in range(max_lag + 1)]) / gamma0

    out = np.empty(max_lag)
    phi = np.zeros(0)
    for k in range(1, max_lag + 1):
        num = rho[k] - phi @ rho[k - 1:0:-1] if k > 1 else rho[1]
        den = 1.0 - phi @ rho[1:k] if k > 1 else 1.0
        phi_kk = num / den
        phi = np.append(phi - phi_kk * phi[::-1], phi_kk)
        out[k - 1] = phi_kk
    return out


def _lag_matrix(x: np.ndarray, p: int) -> np.ndarray:
    n = x.size
    cols = [np.ones(n - p)] + [x[p - i: n - i] for i in range(1, p + 1)]
    return np.column_stack(cols)


def fit_ar(series: DailySeries, p: int = 3, fit_range: DateRange | None = None) -> ARModel:
    """Regress ``S(t)`` on ``[1, S(t-1), ..., S(t-p)]`` over ``fit_range`` (inclusive).

    Only values inside the range are used, so the first ``p`` days serve as lags.
    """
    if p < 1:
        raise ValueError("AR order must be at least 1")
    start, end = fit_range or (series.origin, series.end)
    window = series.window(start, end)
    x = window.values
    if x.size - p < p + 1:
        raise SeriesTooShort(f"{x.size} days is too short to fit AR({p})")
    if np.isnan(x).any():
        raise ValueError("AR fit window contains gaps")
    labels = ("const",) + tuple(f"lag{i}" for i in range(1, p + 1))
    coef = ols.fit(DesignMatrix(_lag_matrix(x, p), labels), x[p:])
    return ARModel(p, coef.values[1:].copy(), float(coef.values[0]), (window.origin, window.end), coef.condition_estimate)


def forecast_ar(model: ARModel, horizon: DateRange, actual_demand: DailySeries) -> ForecastResult:
    """One-step-ahead predictions ``intercept + sum_i phi_i * S(d - i)`` from actual demand."""
    start, end = horizon
    if end < start:
        raise UncoveredHorizon(f"empty horizon {start}..{end}")
    p = model.order
    first_needed = start - dt.timedelta(days=p)
    if first_needed < actual_demand.origin:
        raise MissingLagValue(first_needed)
    n = (end - start).days + 1
    hist = np.full(n + p, np.nan)
    hi = min(end, actual_demand.end)
    if hi >= first_needed:
        hist[: (hi - first_needed).days + 1] = actual_demand.window(first_needed, hi).values
    missing = np.flatnonzero(np.isnan(hist[: n + p - 1]))
    if missing.size:
        raise MissingLagValue(first_needed + dt.timedelta(days=int(missing[0])))
    lags = np.column_stack([hist[p - i: p - i + n] for i in range(1, p + 1)])
    predictions = model.intercept + lags @ model.lag_coefficients
    actuals = hist[p:]
    metrics = None
    if np.isnan(actuals).any():
        actuals = None
    else:
        metrics = evaluate(actuals, predictions)
    dates = tuple(start + dt.timedelta(days=i) for i in range(n))
    return ForecastResult(dates, predictions, actuals, metrics, kind=f"AR({p})", train_range=model.fit_range)


def rollover_ar(
    demand: DailySeries,
    years: Sequence[int],
    p: int = 3,
    window_years: int = 1,
) -> list[tuple[ARModel, ForecastResult]]:
    """Re-estimate AR(p) at the end of each year on the preceding ``window_years`` and
    forecast the next year one step ahead."""
    out = []
    for year in years:
        first, last = dt.date(year, 1, 1), dt.date(year, 12, 31)
        if not demand.covers(first, last):
            raise UncoveredHorizon(f"year {year}: demand ({demand.origin}..{demand.end}) does not cover it")
        fit_start = max(dt.date(year - window_years, 1, 1), demand.origin)
        model = fit_ar(demand, p, (fit_start, first - ONE_DAY))
        result = forecast_ar(model, (first, last), demand)
        out.append((model, replace(result, year=year)))
    return out


def format_coefficient_table(rows: Sequence[tuple[int, ARModel]], header: str | None = None) -> str:
    """CSV ``year,lag1,...,lagp`` with one row per re-estimation year."""
    p = max(m.order for _, m in rows)
    out = io.StringIO()
    if header:
        out.write(f"# {header}\n")
    out.write("year," + ",".join(f"lag{i}" for i in range(1, p + 1)) + "\n")
    for year, m in rows:
        vals = [f"{c!r}" for c in m.lag_coefficients.tolist()] + [""] * (p - m.order)
        out.write(f"{year}," + ",".join(vals) + "\n")
    return out.getvalue()
