"""FSE / FSET / FSETF models: fitting, horizon and day-ahead forecasts, roll-over evaluation.

All three kinds share one design matrix layout and differ only in the optional
degree-day column (FSET, FSETF) and the previous-day demand column (FSETF). Time is
the absolute bucket index counted from the model origin, so a forecast matrix
continues the phase of the training matrix.
"""

from __future__ import annotations

import datetime as dt
import enum
import io
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import ols
from .data import DailySeries, Granularity, month_number, month_start
from .design import RegressorSpec, build_matrix
from .errors import (
    InsufficientHistory,
    KindRequiresFeedback,
    MissingLagValue,
    MissingTemperature,
    SpecViolation,
    UncoveredHorizon,
)
from .metrics import MetricReport, evaluate

DateRange = tuple[dt.date, dt.date]
ONE_DAY = dt.timedelta(days=1)


class ModelKind(enum.Enum):
    FSE = "fse"
    FSET = "fset"
    FSETF = "fsetf"

    @property
    def uses_temperature(self) -> bool:
        return self is not ModelKind.FSE

    @property
    def uses_lag(self) -> bool:
        return self is ModelKind.FSETF

    def apply(self, spec: RegressorSpec) -> RegressorSpec:
        return replace(spec, include_temperature=self.uses_temperature, include_lag=self.uses_lag)


@dataclass(frozen=True)
class FittedModel:
    kind: ModelKind
    spec: RegressorSpec
    coefficients: ols.Coefficients
    train_range: DateRange
    granularity: Granularity
    origin: dt.date

    def __post_init__(self) -> None:
        if len(self.coefficients) != self.spec.n_columns:
            raise ValueError("coefficient count does not match the regressor spec")
        if self.train_range[1] < self.train_range[0]:
            raise ValueError("empty training range")


@dataclass(frozen=True, eq=False)
class ForecastResult:
    dates: tuple[dt.date, ...]
    predictions: np.ndarray
    actuals: np.ndarray | None = None
    metrics: MetricReport | None = None
    kind: str = ""
    granularity: Granularity = Granularity.DAILY
    train_range: DateRange | None = None
    label: str = "forecast"
    year: int | None = None

    def __post_init__(self) -> None:
        if len(self.dates) != len(self.predictions):
            raise ValueError("dates and predictions differ in length")
        if self.actuals is not None and len(self.actuals) != len(self.predictions):
            raise ValueError("actuals and predictions differ in length")
        if (self.metrics is None) != (self.actuals is None):
            raise ValueError("metrics are present exactly when actuals are")

    def __len__(self) -> int:
        return len(self.dates)

    def to_csv(self, header: str | None = None) -> str:
        out = io.StringIO()
        if header:
            out.write(f"# {header}\n")
        out.write("date,prediction,actual\n" if self.actuals is not None else "date,prediction\n")
        for i, d in enumerate(self.dates):
            row = f"{d.isoformat()},{float(self.predictions[i])!r}"
            if self.actuals is not None:
                row += f",{float(self.actuals[i])!r}"
            out.write(row + "\n")
        return out.getvalue()

    def summary(self) -> dict:
        out = {
            "kind": self.kind,
            "granularity": self.granularity.value,
            "label": self.label,
            "mape_percent": self.metrics.mape_percent if self.metrics else None,
            "rmse_percent": self.metrics.rmse_percent if self.metrics else None,
            "rmse_absolute": self.metrics.rmse_absolute if self.metrics else None,
            "n": len(self),
            "train_range": [d.isoformat() for d in self.train_range] if self.train_range else None,
        }
        if self.year is not None:
            out["year"] = self.year
        return out


# --------------------------------------------------------------------------- bucket grid


def model_origin(demand: DailySeries, g: Granularity) -> dt.date:
    """Date of bucket index 0 for a model trained on ``demand``."""
    if g is Granularity.MONTHLY and demand.origin.day != 1:
        return month_start(month_number(demand.origin) + 1)
    return demand.origin


def bucket_grid(g: Granularity, origin: dt.date, start: dt.date, end: dt.date):
    """Complete buckets inside ``[start, end]``: ``(starts, ends, t)`` with contiguous ``t``."""
    if g is Granularity.DAILY:
        t0, t1 = (start - origin).days, (end - origin).days
        t = np.arange(t0, t1 + 1)
        starts = [origin + dt.timedelta(days=int(k)) for k in t]
        return starts, starts, t
    if g is Granularity.WEEKLY:
        k0 = -((origin - start).days // 7)  # ceil((start - origin) / 7)
        k1 = ((end - origin).days + 1) // 7 - 1
        t = np.arange(k0, k1 + 1)
        starts = [origin + dt.timedelta(days=7 * int(k)) for k in t]
        return starts, [s + dt.timedelta(days=6) for s in starts], t
    m0 = month_number(start) + (start.day != 1)
    m1 = month_number(end + ONE_DAY) - 1
    months = range(m0, m1 + 1)
    starts = [month_start(m) for m in months]
    ends = [month_start(m + 1) - ONE_DAY for m in months]
    return starts, ends, np.arange(m0, m1 + 1) - month_number(origin)


def _bucket_values(s: DailySeries, starts, ends, g: Granularity) -> np.ndarray | None:
    """Bucket means of ``s``; ``None`` if any bucket is not fully observed."""
    if not starts or starts[0] < s.origin or ends[-1] > s.end:
        return None
    if g is Granularity.DAILY:
        out = s.values[s.index_of(starts[0]): s.index_of(ends[-1]) + 1]
    else:
        out = np.array([s.values[s.index_of(a): s.index_of(b) + 1].mean() for a, b in zip(starts, ends)])
    return None if np.isnan(out).any() else out


def _temperature_values(kind, temperature, starts, ends, g) -> np.ndarray | None:
    if not kind.uses_temperature:
        return None
    if temperature is None:
        raise MissingTemperature(f"{kind.name} needs a temperature series")
    values = _bucket_values(temperature, starts, ends, g)
    if values is None:
        raise MissingTemperature(
            f"temperature ({temperature.origin}..{temperature.end}) does not cover {starts[0]}..{ends[-1]}"
        )
    return values


def _metrics(actuals: np.ndarray | None, predictions: np.ndarray):
    if actuals is None:
        return None, None
    return actuals, evaluate(actuals, predictions)


# --------------------------------------------------------------------------- fitting


def fit_model(
    kind: ModelKind | str,
    demand: DailySeries,
    temperature: DailySeries | None,
    spec: RegressorSpec,
    train_end: dt.date,
    granularity: Granularity | str = Granularity.DAILY,
    train_start: dt.date | None = None,
) -> FittedModel:
    """Fit a model on every complete bucket of ``[train_start, train_end)``.

    ``train_start`` defaults to the first day of ``demand``. At least one annual
    cycle of buckets (364 days, 52 weeks or 12 months) is required.
    """
    kind, g = ModelKind(kind), Granularity(granularity)
    if kind.uses_lag and g is not Granularity.DAILY:
        raise SpecViolation("FSETF day-ahead feedback is defined for daily data only")
    if kind.uses_temperature and temperature is None:
        raise MissingTemperature(f"{kind.name} needs a temperature series")
    spec = kind.apply(spec).for_granularity(g)
    origin = model_origin(demand, g)
    start = max(train_start or demand.origin, demand.origin)
    last = min(train_end - ONE_DAY, demand.end)
    starts, ends, t = bucket_grid(g, origin, start, last) if last >= start else ([], [], np.array([]))
    if len(t) < g.periods_per_year:
        raise InsufficientHistory(
            f"{len(t)} {g.value} bucket(s) before {train_end}; need at least one annual cycle "
            f"({g.periods_per_year})"
        )
    y = _bucket_values(demand, starts, ends, g)
    if y is None:
        raise InsufficientHistory(f"demand has gaps in {starts[0]}..{ends[-1]}; run align_and_fill first")
    temp = _temperature_values(kind, temperature, starts, ends, g)

    lag_kwargs = {}
    if kind.uses_lag:
        before = starts[0] - ONE_DAY
        lag_initial = demand.value_at(before) if before >= demand.origin else None
        lag_kwargs = {"lagged_demand": y, "lag_initial": lag_initial}
    F = build_matrix(spec, len(t), int(t[0]), temperature=temp, **lag_kwargs)
    coefficients = ols.fit(F, y)
    return FittedModel(kind, spec, coefficients, (starts[0], ends[-1]), g, origin)


def forecast_horizon(
    model: FittedModel,
    horizon: DateRange,
    temperature: DailySeries | None = None,
    actual: DailySeries | None = None,
) -> ForecastResult:
    """Open-loop forecast over every complete bucket in ``horizon``.

    Temperature over the horizon is an input (observed or a scenario). When
    ``actual`` covers the horizon the result carries metrics.
    """
    if model.kind.uses_lag:
        raise KindRequiresFeedback("FSETF forecasts need actual demand; use forecast_feedback")
    starts, ends, t = bucket_grid(model.granularity, model.origin, *horizon)
    if len(t) == 0:
        raise UncoveredHorizon(f"no complete {model.granularity.value} bucket in {horizon[0]}..{horizon[1]}")
    temp = _temperature_values(model.kind, temperature, starts, ends, model.granularity)
    F = build_matrix(model.spec, len(t), int(t[0]), temperature=temp)
    predictions = ols.predict(F, model.coefficients)
    actuals = _bucket_values(actual, starts, ends, model.granularity) if actual is not None else None
    actuals, metrics = _metrics(actuals, predictions)
    return ForecastResult(
        tuple(starts), predictions, actuals, metrics,
        kind=model.kind.name, granularity=model.granularity, train_range=model.train_range,
    )


def forecast_feedback(
    model: FittedModel,
    horizon: DateRange,
    temperature: DailySeries,
    actual_demand: DailySeries,
) -> ForecastResult:
    """Day-ahead FSETF forecast: day ``d`` uses the actual demand of day ``d - 1``.

    Coefficients stay fixed over the horizon. Metrics are attached when the actual
    demand also covers the last horizon day.
    """
    if not model.kind.uses_lag:
        raise ValueError(f"forecast_feedback needs an FSETF model, got {model.kind.name}")
    start, end = horizon
    if end < start:
        raise UncoveredHorizon(f"empty horizon {start}..{end}")
    starts, ends, t = bucket_grid(Granularity.DAILY, model.origin, start, end)
    temp = _temperature_values(model.kind, temperature, starts, ends, Granularity.DAILY)

    n = len(t)
    lagged = np.full(n, np.nan)
    lo = max(start, actual_demand.origin)
    hi = min(end, actual_demand.end)
    if hi >= lo:
        lagged[(lo - start).days:(hi - start).days + 1] = actual_demand.window(lo, hi).values
    before = start - ONE_DAY
    if not actual_demand.origin <= before <= actual_demand.end or math.isnan(actual_demand.value_at(before)):
        raise MissingLagValue(before)
    missing = np.flatnonzero(np.isnan(lagged[:-1]))
    if missing.size:
        raise MissingLagValue(start + dt.timedelta(days=int(missing[0])))

    F = build_matrix(
        model.spec, n, int(t[0]), temperature=temp,
        lagged_demand=np.nan_to_num(lagged), lag_initial=actual_demand.value_at(before),
    )
    predictions = ols.predict(F, model.coefficients)
    actuals = None if np.isnan(lagged[-1]) else lagged
    actuals, metrics = _metrics(actuals, predictions)
    return ForecastResult(
        tuple(starts), predictions, actuals, metrics,
        kind=model.kind.name, granularity=Granularity.DAILY, train_range=model.train_range,
    )


def forecast(
    model: FittedModel,
    horizon: DateRange,
    temperature: DailySeries | None = None,
    actual: DailySeries | None = None,
) -> ForecastResult:
    """Dispatch to :func:`forecast_feedback` or :func:`forecast_horizon` by model kind."""
    if model.kind.uses_lag:
        if actual is None:
            raise MissingLagValue(horizon[0] - ONE_DAY)
        return forecast_feedback(model, horizon, temperature, actual)
    return forecast_horizon(model, horizon, temperature, actual)


def in_sample(model: FittedModel, demand: DailySeries, temperature: DailySeries | None = None) -> ForecastResult:
    """Modelling (in-sample) fit over the training range, labelled ``modelling``.

    For FSETF the first training day is skipped when no demand precedes it.
    """
    start, end = model.train_range
    if model.kind.uses_lag and start <= demand.origin:
        start += ONE_DAY
    result = forecast(model, (start, end), temperature, demand)
    return replace(result, label="modelling")


def rollover_evaluate(
    kind: ModelKind | str,
    demand: DailySeries,
    temperature: DailySeries | None,
    spec: RegressorSpec,
    years: Sequence[int],
    granularity: Granularity | str = Granularity.DAILY,
) -> list[ForecastResult]:
    """Rolling-origin backtest: for each year, train on all data before 1 January, forecast the year."""
    kind, g = ModelKind(kind), Granularity(granularity)
    results = []
    for year in years:
        first, last = dt.date(year, 1, 1), dt.date(year, 12, 31)
        if first - demand.origin < dt.timedelta(days=364):
            raise InsufficientHistory(f"year {year}: less than one year of demand history before {first}")
        if not demand.covers(first, last):
            raise UncoveredHorizon(f"year {year}: demand ({demand.origin}..{demand.end}) does not cover it")
        model = fit_model(kind, demand, temperature, spec, first, g)
        result = forecast(model, (first, last), temperature, demand)
        results.append(replace(result, year=year))
    return results


# --------------------------------------------------------------------------- persistence


def format_model(model: FittedModel, header: Sequence[str] = ()) -> str:
    meta = [
        *header,
        f"kind={model.kind.value}",
        f"granularity={model.granularity.value}",
        f"origin={model.origin.isoformat()}",
        f"train_start={model.train_range[0].isoformat()}",
        f"train_end={model.train_range[1].isoformat()}",
    ]
    meta += [f"spec.{k}={json.dumps(v)}" for k, v in model.spec.to_dict().items()]
    return ols.format_coefficients(model.coefficients, meta)


def save_model(model: FittedModel, path: str | Path, header: Sequence[str] = ()) -> None:
    Path(path).write_text(format_model(model, header), encoding="utf-8")


def load_model(path: str | Path) -> FittedModel:
    coefficients, comments = ols.parse_coefficients(Path(path).read_text(encoding="utf-8"))
    meta, spec_fields = {}, {}
    for line in comments:
        key, sep, value = line.partition("=")
        if not sep or " " in key:
            continue
        if key.startswith("spec."):
            spec_fields[key[5:]] = json.loads(value)
        else:
            meta[key] = value
    try:
        return FittedModel(
            kind=ModelKind(meta["kind"]),
            spec=RegressorSpec(**spec_fields),
            coefficients=coefficients,
            train_range=(dt.date.fromisoformat(meta["train_start"]), dt.date.fromisoformat(meta["train_end"])),
            granularity=Granularity(meta["granularity"]),
            origin=dt.date.fromisoformat(meta["origin"]),
        )
    except KeyError as exc:
        raise ValueError(f"model file {path} lacks the {exc.args[0]!r} header field") from None
