"""Regressor matrix: trend, annual/weekly harmonics, modulated harmonics, degree-days, lag."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .data import DailySeries, Granularity
from .errors import LengthMismatch, SpecViolation, SplitOutOfRange

ANNUAL_PERIOD_DAYS = 364
WEEKLY_PERIOD_DAYS = 7


@dataclass(frozen=True)
class RegressorSpec:
    """Which columns go into the design matrix.

    Periods are in rows of the matrix: 364 and 7 for daily data. Weekly and monthly
    models reuse the same machinery with ``annual_period`` 52 or 12 (see
    :meth:`for_granularity`). Harmonic orders are bounded by the two-sample
    Nyquist limit, ``period / order >= 2``.
    """

    annual_harmonics: int = 12
    weekly_harmonics: int = 2
    modulated_harmonics: int = 5
    include_trend: bool = True
    include_temperature: bool = False
    include_lag: bool = False
    comfort_temp: float = 18.0
    annual_period: float = ANNUAL_PERIOD_DAYS
    weekly_period: float = WEEKLY_PERIOD_DAYS

    def __post_init__(self) -> None:
        for name in ("annual_harmonics", "weekly_harmonics", "modulated_harmonics"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise SpecViolation(f"{name} must be a non-negative integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not np.isfinite(self.comfort_temp):
            raise SpecViolation("comfort_temp must be finite")
        k, m = self.annual_harmonics, self.weekly_harmonics
        if k and self.annual_period / k < 2:
            raise SpecViolation(
                f"annual_harmonics={k} gives a shortest period of {self.annual_period / k:.3g} "
                f"samples; the sampling theorem requires at least 2 (max {int(self.annual_period // 2)})"
            )
        if m and self.weekly_period / m < 2:
            raise SpecViolation(
                f"weekly_harmonics={m} gives a shortest period of {self.weekly_period / m:.3g} "
                f"samples; the sampling theorem requires at least 2 (max {int(self.weekly_period // 2)})"
            )
        if self.modulated_harmonics > k:
            raise SpecViolation(
                f"modulated_harmonics={self.modulated_harmonics} exceeds annual_harmonics={k}"
            )

    @property
    def n_columns(self) -> int:
        return (
            2 * self.include_trend
            + 2 * self.annual_harmonics
            + 2 * self.weekly_harmonics
            + 2 * self.modulated_harmonics
            + self.include_temperature
            + self.include_lag
        )

    def labels(self) -> tuple[str, ...]:
        labels: list[str] = []
        if self.include_trend:
            labels += ["const", "t"]
        for n in range(1, self.annual_harmonics + 1):
            labels += [f"sinA{n}", f"cosA{n}"]
        for n in range(1, self.weekly_harmonics + 1):
            labels += [f"sinW{n}", f"cosW{n}"]
        for n in range(1, self.modulated_harmonics + 1):
            labels += [f"t*sinA{n}", f"t*cosA{n}"]
        if self.include_temperature:
            labels.append("Td")
        if self.include_lag:
            labels.append("lag1")
        return tuple(labels)

    def for_granularity(self, g: Granularity) -> "RegressorSpec":
        """Re-express the spec in bucket units.

        Weekly harmonics vanish inside a weekly or monthly bucket, and the annual
        order is capped one below the bucket Nyquist limit (at the limit the sine
        column is identically zero).
        """
        if g is Granularity.DAILY:
            return self
        period = g.periods_per_year
        k = min(self.annual_harmonics, (period - 1) // 2)
        return replace(
            self,
            annual_harmonics=k,
            weekly_harmonics=0,
            modulated_harmonics=min(self.modulated_harmonics, k),
            include_lag=False,
            annual_period=period,
        )

    def to_dict(self) -> dict:
        return {
            "annual_harmonics": self.annual_harmonics,
            "weekly_harmonics": self.weekly_harmonics,
            "modulated_harmonics": self.modulated_harmonics,
            "include_trend": self.include_trend,
            "include_temperature": self.include_temperature,
            "include_lag": self.include_lag,
            "comfort_temp": self.comfort_temp,
            "annual_period": self.annual_period,
            "weekly_period": self.weekly_period,
        }


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    columns: np.ndarray
    labels: tuple[str, ...]
    t_offset: int = 0
    first_valid_row: int = 0

    def __post_init__(self) -> None:
        if self.columns.ndim != 2 or self.columns.shape[1] != len(self.labels):
            raise LengthMismatch(f"{self.columns.shape} matrix for {len(self.labels)} labels")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("design matrix labels must be unique")
        self.columns.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.columns.shape

    @property
    def n_rows(self) -> int:
        return self.columns.shape[0]

    def rows(self, start: int, stop: int) -> "DesignMatrix":
        return DesignMatrix(
            self.columns[start:stop].copy(),
            self.labels,
            t_offset=self.t_offset + start,
            first_valid_row=max(self.first_valid_row - start, 0),
        )

    def column(self, label: str) -> np.ndarray:
        return self.columns[:, self.labels.index(label)]


def temperature_deviation(temperature, comfort_temp: float = 18.0):
    """Heating degree-days below ``comfort_temp``: ``max(comfort_temp - T, 0)``."""
    deviation = np.maximum(comfort_temp - np.asarray(temperature, dtype=float), 0.0)
    return float(deviation) if deviation.ndim == 0 else deviation


def _as_vector(values, n: int, name: str) -> np.ndarray:
    arr = values.values if isinstance(values, DailySeries) else np.asarray(values, dtype=float)
    if arr.shape != (n,):
        raise LengthMismatch(f"{name} has {arr.size} values, design matrix has {n} rows")
    return arr


def build_matrix(
    spec: RegressorSpec,
    n_days: int,
    t_offset: int = 0,
    temperature=None,
    lagged_demand=None,
    lag_initial: float | None = None,
) -> DesignMatrix:
    """Build the regressor matrix for rows ``t = t_offset, ..., t_offset + n_days - 1``.

    ``t`` is the absolute row index from the model origin, so matrices for adjacent
    windows stack into the matrix of the union. The lag column of row ``r`` holds
    ``lagged_demand[r - 1]``; row 0 uses ``lag_initial`` (the demand at ``t_offset - 1``)
    and is marked invalid when it is unknown.
    """
    if n_days < 1:
        raise LengthMismatch("n_days must be at least 1")
    if spec.include_temperature != (temperature is not None):
        raise LengthMismatch("temperature must be supplied iff include_temperature is set")
    if spec.include_lag != (lagged_demand is not None):
        raise LengthMismatch("lagged_demand must be supplied iff include_lag is set")

    t = np.arange(t_offset, t_offset + n_days, dtype=float)
    alpha = 2 * np.pi / spec.annual_period
    beta = 2 * np.pi / spec.weekly_period
    blocks: list[np.ndarray] = []

    if spec.include_trend:
        blocks += [np.ones_like(t), t]
    annual = []
    for n in range(1, spec.annual_harmonics + 1):
        # reduce n*t modulo the period first so sin/cos see small exact arguments
        phase = alpha * np.mod(n * t, spec.annual_period)
        annual += [np.sin(phase), np.cos(phase)]
    blocks += annual
    for n in range(1, spec.weekly_harmonics + 1):
        phase = beta * np.mod(n * t, spec.weekly_period)
        blocks += [np.sin(phase), np.cos(phase)]
    blocks += [t * col for col in annual[: 2 * spec.modulated_harmonics]]

    first_valid = 0
    if spec.include_temperature:
        blocks.append(temperature_deviation(_as_vector(temperature, n_days, "temperature"), spec.comfort_temp))
    if spec.include_lag:
        demand = _as_vector(lagged_demand, n_days, "lagged_demand")
        lag = np.empty(n_days)
        lag[1:] = demand[:-1]
        lag[0] = np.nan if lag_initial is None else lag_initial
        first_valid = 0 if lag_initial is not None else 1
        blocks.append(lag)

    columns = np.column_stack(blocks) if blocks else np.empty((n_days, 0))
    return DesignMatrix(columns, spec.labels(), t_offset=t_offset, first_valid_row=first_valid)


def split_matrix(F: DesignMatrix, S, split: int):
    """Cut rows into past ``[first_valid_row, split)`` and future ``[split, end)``.

    Returns ``(F1, S1, F2, S2)``.
    """
    S = _as_vector(S, F.n_rows, "demand")
    if not F.first_valid_row <= split < F.n_rows:
        raise SplitOutOfRange(
            f"split {split} outside [{F.first_valid_row}, {F.n_rows}) for this matrix"
        )
    return (
        F.rows(F.first_valid_row, split),
        S[F.first_valid_row:split].copy(),
        F.rows(split, F.n_rows),
        S[split:].copy(),
    )
