"""Fourier-series demand forecasting with temperature and day-ahead feedback.

Daily, weekly and monthly demand is modelled as a linear trend plus annual and
weekly harmonics, amplitude-modulated annual harmonics, heating degree-days and
(optionally) the previous day's demand, fitted by least squares.
"""

from .ar import ARModel, fit_ar, forecast_ar, pacf, rollover_ar
from .data import (
    BucketSeries,
    CalendarConfig,
    DailySeries,
    DayClass,
    Granularity,
    Statistic,
    aggregate,
    align_and_fill,
    classify_day,
    fill_gaps,
    load_calendar,
    parse_series_csv,
    write_series_csv,
)
from .design import DesignMatrix, RegressorSpec, build_matrix, split_matrix, temperature_deviation
from .metrics import MetricReport, mape, rmse, rmse_percent
from .models import (
    FittedModel,
    ForecastResult,
    ModelKind,
    fit_model,
    forecast,
    forecast_feedback,
    forecast_horizon,
    in_sample,
    load_model,
    rollover_evaluate,
    save_model,
)
from .ols import Coefficients, fit, predict
from .segregation import (
    SegregationReport,
    industrial_ratio_holiday,
    industrial_ratio_weekend,
    seasonal_means,
    segregate,
)
from .synth import GeneratorSpec, generate

__version__ = "0.1.0"
