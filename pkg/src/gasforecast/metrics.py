"""Forecast error metrics: MAPE, RMSE and mean-normalised RMSE percent."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import LengthMismatch, ZeroActual, ZeroMeanActual


def _pair(actual, forecast) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(actual, dtype=float).ravel()
    f = np.asarray(forecast, dtype=float).ravel()
    if a.size != f.size or a.size == 0:
        raise LengthMismatch(f"need equal non-zero lengths, got {a.size} actual and {f.size} forecast")
    return a, f


def mape(actual, forecast) -> float:
    """Mean absolute percentage error, in percent. Actuals must be strictly positive."""
    a, f = _pair(actual, forecast)
    if (a <= 0).any():
        raise ZeroActual("MAPE requires strictly positive actual values")
    return float(100.0 * np.mean(np.abs(f - a) / a))


def rmse(actual, forecast) -> float:
    a, f = _pair(actual, forecast)
    return float(np.sqrt(np.mean((f - a) ** 2)))


def rmse_percent(actual, forecast) -> float:
    """RMSE as a percentage of the mean actual value."""
    a, f = _pair(actual, forecast)
    mean = a.mean()
    if mean <= 0:
        raise ZeroMeanActual("RMSE percent needs a positive mean actual value")
    return float(100.0 * rmse(a, f) / mean)


@dataclass(frozen=True)
class MetricReport:
    mape_percent: float
    rmse_absolute: float
    rmse_percent: float
    n: int

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(actual, forecast) -> MetricReport:
    a, f = _pair(actual, forecast)
    return MetricReport(mape(a, f), rmse(a, f), rmse_percent(a, f), a.size)
