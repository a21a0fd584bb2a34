"""Synthetic demand/temperature generator with known ground truth.

Demand is the sum of

* a linear trend ``base_level + trend_per_day * t``,
* annual (period 364) and weekly (period 7) harmonics, with optional
  ``t``-modulated annual harmonics,
* ``temp_coefficient * max(comfort_temp - T, 0)``,
* an industrial step: ``I`` on weekdays, ``I0 = fraction * I`` on weekends, 0 on holidays,
* AR(1) residuals with marginal standard deviation ``noise_sigma`` (additive) and
  ``noise_relative`` (multiplicative, on the noise-free demand).

``t`` counts days from the first generated day. The harmonic terms are computed
here directly rather than through :mod:`gasforecast.design`, so the generator can
serve as an independent check on the model code.
"""

from __future__ import annotations

import datetime as dt
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.signal import lfilter

from .data import CalendarConfig, DailySeries, classify_day, DayClass
from .errors import ClippingWarning

Pair = tuple[float, float]


@dataclass(frozen=True)
class GeneratorSpec:
    base_level: float = 60.0
    trend_per_day: float = 0.005
    annual_amplitudes: tuple[Pair, ...] = ((3.0, 10.0), (1.0, 2.0))
    weekly_amplitudes: tuple[Pair, ...] = ((0.5, 0.5),)
    modulation_amplitudes: tuple[Pair, ...] = ()
    temp_coefficient: float = 6.0
    comfort_temp: float = 18.0
    temp_mean: float = 14.0
    temp_amplitude: float = 10.0
    temp_noise_sigma: float = 3.0
    coldest_day_of_year: int = 20
    residual_ar_phi: float = 0.7
    noise_sigma: float = 5.0
    noise_relative: float = 0.0
    industrial_level: float = 40.0
    weekend_industrial_fraction: float = 0.4
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("annual_amplitudes", "weekly_amplitudes", "modulation_amplitudes"):
            pairs = tuple((float(a), float(b)) for a, b in getattr(self, name))
            if not all(math.isfinite(v) for p in pairs for v in p):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, pairs)
        if not -1 < self.residual_ar_phi < 1:
            raise ValueError("residual_ar_phi must lie in (-1, 1)")
        if self.noise_sigma < 0 or self.noise_relative < 0 or self.temp_noise_sigma < 0:
            raise ValueError("noise levels must be non-negative")
        if not 0 <= self.weekend_industrial_fraction <= 1:
            raise ValueError("weekend_industrial_fraction must lie in [0, 1]")
        if len(self.modulation_amplitudes) > len(self.annual_amplitudes):
            raise ValueError("more modulated than annual harmonics")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorSpec":
        data = dict(data)
        for name in ("annual_amplitudes", "weekly_amplitudes", "modulation_amplitudes"):
            if name in data:
                data[name] = tuple(tuple(p) for p in data[name])
        return cls(**data)


@dataclass(frozen=True)
class SyntheticData:
    demand: DailySeries
    temperature: DailySeries
    truth: GeneratorSpec
    clipped_days: int = 0
    residual: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]


def _ar1(rng: np.random.Generator, n: int, phi: float) -> np.ndarray:
    """Stationary AR(1) path with unit marginal variance."""
    eps = rng.standard_normal(n)
    eps[1:] *= math.sqrt(1.0 - phi * phi)
    return lfilter([1.0], [1.0, -phi], eps)


def seasonal_structure(spec: GeneratorSpec, t: np.ndarray) -> np.ndarray:
    """Trend plus harmonic terms at day offsets ``t`` (no temperature, industry or noise)."""
    out = spec.base_level + spec.trend_per_day * t
    for n, (a, b) in enumerate(spec.annual_amplitudes, start=1):
        out = out + a * np.sin(2 * np.pi * n * t / 364) + b * np.cos(2 * np.pi * n * t / 364)
    for n, (c, d) in enumerate(spec.weekly_amplitudes, start=1):
        out = out + c * np.sin(2 * np.pi * n * t / 7) + d * np.cos(2 * np.pi * n * t / 7)
    for n, (h, k) in enumerate(spec.modulation_amplitudes, start=1):
        out = out + t * (h * np.sin(2 * np.pi * n * t / 364) + k * np.cos(2 * np.pi * n * t / 364))
    return out


def generate(
    spec: GeneratorSpec = GeneratorSpec(),
    cal: CalendarConfig = CalendarConfig(),
    n_days: int = 3 * 365,
    origin: dt.date = dt.date(2010, 1, 1),
) -> SyntheticData:
    if n_days < 1:
        raise ValueError("n_days must be at least 1")
    rng = np.random.default_rng(spec.seed)
    t = np.arange(n_days, dtype=float)
    dates = [origin + dt.timedelta(days=i) for i in range(n_days)]

    doy = np.array([d.timetuple().tm_yday for d in dates], dtype=float)
    temperature = (
        spec.temp_mean
        - spec.temp_amplitude * np.cos(2 * np.pi * (doy - spec.coldest_day_of_year) / 365.25)
        + spec.temp_noise_sigma * rng.standard_normal(n_days)
    )
    heating = spec.temp_coefficient * np.maximum(spec.comfort_temp - temperature, 0.0)

    industry_by_class = {
        DayClass.WEEKDAY: spec.industrial_level,
        DayClass.WEEKEND: spec.industrial_level * spec.weekend_industrial_fraction,
        DayClass.HOLIDAY: 0.0,
    }
    industry = np.array([industry_by_class[classify_day(d, cal)] for d in dates])

    clean = seasonal_structure(spec, t) + heating + industry
    u = _ar1(rng, n_days, spec.residual_ar_phi)
    v = _ar1(rng, n_days, spec.residual_ar_phi)
    residual = spec.noise_sigma * u + spec.noise_relative * clean * v
    demand = clean + residual

    clipped = int((demand < 0).sum())
    if clipped:
        warnings.warn(f"{clipped} generated demand value(s) were negative and clipped to 0", ClippingWarning, stacklevel=2)
        demand = np.maximum(demand, 0.0)
    return SyntheticData(
        DailySeries(origin, demand, "demand"),
        DailySeries(origin, temperature, "temperature"),
        spec,
        clipped,
        residual,
    )


def expected_coefficients(spec: GeneratorSpec, labels: tuple[str, ...]) -> dict[str, float]:
    """Coefficient values a correctly specified model should recover, keyed by column label.

    Only meaningful when the generated demand lies in the model span (no industrial
    step, matching harmonic orders, origin-anchored ``t``).
    """
    truth = {"const": spec.base_level, "t": spec.trend_per_day, "Td": spec.temp_coefficient}
    for n, (a, b) in enumerate(spec.annual_amplitudes, start=1):
        truth[f"sinA{n}"], truth[f"cosA{n}"] = a, b
    for n, (c, d) in enumerate(spec.weekly_amplitudes, start=1):
        truth[f"sinW{n}"], truth[f"cosW{n}"] = c, d
    for n, (h, k) in enumerate(spec.modulation_amplitudes, start=1):
        truth[f"t*sinA{n}"], truth[f"t*cosA{n}"] = h, k
    unknown = set(truth) - set(labels) - {"Td", "t"}
    if any(truth[k] != 0 for k in unknown):
        raise ValueError(f"generator terms {sorted(unknown)} are not in the model columns")
    return {label: truth.get(label, 0.0) for label in labels}


def synthetic_holidays(first_year: int, last_year: int, drift_days: int = 11) -> list[dt.date]:
    """Two multi-day holidays per year that drift earlier each year, kept inside April-September."""
    out = []
    window_start, window_len = 5, 160  # April 5 onward, ends before September 12
    for k, year in enumerate(range(first_year, last_year + 1)):
        anchor = dt.date(year, 4, window_start)
        for offset, length in ((100, 3), (30, 4)):
            start = (offset - drift_days * k) % (window_len - length)
            out += [anchor + dt.timedelta(days=start + i) for i in range(length)]
    return sorted(set(out))
