"""Daily series container, calendar classification, bucketing and CSV ingestion."""

from __future__ import annotations

import csv
import datetime as dt
import enum
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np
import yaml

from .errors import (
    CalendarError,
    DuplicateDate,
    EmptyAfterBucketing,
    GapTooLarge,
    MalformedRow,
    NegativeValue,
    NoOverlap,
    NonFiniteValue,
)

WEEKDAY_NAMES = ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")


def _readonly(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DailySeries:
    """Values on consecutive calendar days starting at ``origin``.

    Missing days are stored as NaN; ``gaps`` lists ``(first_missing_date, length)``
    for each run of them. Series coming out of :func:`align_and_fill` are gap free.
    """

    origin: dt.date
    values: np.ndarray
    label: str = ""
    gaps: tuple[tuple[dt.date, int], ...] = ()

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("DailySeries needs a non-empty 1-d vector of values")
        if np.isinf(values).any():
            raise ValueError("DailySeries values must be finite (NaN marks a gap)")
        if not values.flags.writeable and values is self.values:
            arr = values
        else:
            arr = values.copy()
            arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        if not self.gaps and np.isnan(arr).any():
            object.__setattr__(self, "gaps", _find_gaps(self.origin, arr))

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DailySeries):
            return NotImplemented
        return (
            self.origin == other.origin
            and self.label == other.label
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def end(self) -> dt.date:
        """Last date covered (inclusive)."""
        return self.origin + dt.timedelta(days=len(self) - 1)

    @property
    def has_gaps(self) -> bool:
        return bool(np.isnan(self.values).any())

    def dates(self) -> list[dt.date]:
        return [self.origin + dt.timedelta(days=i) for i in range(len(self))]

    def index_of(self, date: dt.date) -> int:
        """Row offset of ``date``; may be out of range."""
        return (date - self.origin).days

    def covers(self, start: dt.date, end: dt.date) -> bool:
        return self.origin <= start and end <= self.end

    def value_at(self, date: dt.date) -> float:
        i = self.index_of(date)
        if not 0 <= i < len(self):
            raise KeyError(date)
        return float(self.values[i])

    def window(self, start: dt.date, end: dt.date) -> "DailySeries":
        """Sub-series on ``[start, end]`` inclusive, clipped to the covered range."""
        start = max(start, self.origin)
        end = min(end, self.end)
        if end < start:
            raise ValueError(f"window {start}..{end} does not intersect {self.origin}..{self.end}")
        i, j = self.index_of(start), self.index_of(end) + 1
        return DailySeries(start, self.values[i:j], self.label)

    def with_values(self, values: Sequence[float]) -> "DailySeries":
        return DailySeries(self.origin, np.asarray(values, dtype=float), self.label)


def _find_gaps(origin: dt.date, values: np.ndarray) -> tuple[tuple[dt.date, int], ...]:
    gaps = []
    missing = np.isnan(values)
    i, n = 0, values.size
    while i < n:
        if missing[i]:
            j = i
            while j < n and missing[j]:
                j += 1
            gaps.append((origin + dt.timedelta(days=i), j - i))
            i = j
        else:
            i += 1
    return tuple(gaps)


# --------------------------------------------------------------------------- calendar


class DayClass(enum.Enum):
    WEEKDAY = "weekday"
    WEEKEND = "weekend"
    HOLIDAY = "holiday"


def _weekday_number(name: str | int) -> int:
    if isinstance(name, int):
        if not 0 <= name <= 6:
            raise CalendarError(f"weekday number out of range: {name}")
        return name
    key = str(name).strip().lower()
    for i, full in enumerate(WEEKDAY_NAMES):
        if key == full or key == full[:3]:
            return i
    raise CalendarError(f"unknown weekday name: {name!r}")


def _parse_date(text: object) -> dt.date:
    if isinstance(text, dt.date):
        return text
    try:
        return dt.date.fromisoformat(str(text).strip())
    except ValueError as exc:
        raise CalendarError(f"invalid ISO date: {text!r}") from exc


@dataclass(frozen=True)
class CalendarConfig:
    """Weekend days, explicit holiday dates and date ranges excluded from statistics.

    ``weekend_days`` holds weekday numbers (Monday = 0); names are accepted by
    :meth:`from_dict`.
    """

    weekend_days: frozenset[int] = frozenset({5, 6})
    holidays: frozenset[dt.date] = frozenset()
    exclusion_windows: tuple[tuple[dt.date, dt.date], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "weekend_days", frozenset(_weekday_number(d) for d in self.weekend_days))
        object.__setattr__(self, "holidays", frozenset(_parse_date(d) for d in self.holidays))
        windows = tuple((_parse_date(a), _parse_date(b)) for a, b in self.exclusion_windows)
        for a, b in windows:
            if b < a:
                raise CalendarError(f"exclusion window {a}..{b} has start after end")
        object.__setattr__(self, "exclusion_windows", windows)

    def is_excluded(self, date: dt.date) -> bool:
        return any(a <= date <= b for a, b in self.exclusion_windows)

    @classmethod
    def from_dict(cls, data: dict | None) -> "CalendarConfig":
        data = dict(data or {})
        unknown = set(data) - {"weekend_days", "holidays", "exclusion_windows"}
        if unknown:
            raise CalendarError(f"unknown calendar keys: {sorted(unknown)}")
        windows = []
        for item in data.get("exclusion_windows") or []:
            if isinstance(item, str):
                parts = item.split("..")
                if len(parts) != 2:
                    raise CalendarError(f"exclusion window must look like START..END: {item!r}")
            else:
                parts = list(item)
            windows.append((parts[0], parts[1]))
        return cls(
            weekend_days=frozenset(data.get("weekend_days", ["saturday", "sunday"])),
            holidays=frozenset(data.get("holidays") or []),
            exclusion_windows=tuple(windows),
        )

    def to_dict(self) -> dict:
        return {
            "weekend_days": [WEEKDAY_NAMES[d] for d in sorted(self.weekend_days)],
            "holidays": [d.isoformat() for d in sorted(self.holidays)],
            "exclusion_windows": [f"{a.isoformat()}..{b.isoformat()}" for a, b in self.exclusion_windows],
        }


def load_calendar(path: str | Path) -> CalendarConfig:
    """Read a YAML (or JSON) calendar file."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise CalendarError(f"cannot parse calendar file {path}: {exc}") from exc
    if data is not None and not isinstance(data, dict):
        raise CalendarError(f"calendar file {path} must hold a mapping")
    return CalendarConfig.from_dict(data)


def dump_calendar(cal: CalendarConfig, path: str | Path, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        yaml.safe_dump(cal.to_dict(), fh, sort_keys=False)


def classify_day(date: dt.date, cal: CalendarConfig = CalendarConfig()) -> DayClass:
    if date in cal.holidays:
        return DayClass.HOLIDAY
    if date.weekday() in cal.weekend_days:
        return DayClass.WEEKEND
    return DayClass.WEEKDAY


# --------------------------------------------------------------------------- bucketing


class Granularity(enum.Enum):
    DAILY = "daily"
    WEEKLY = "weekly"
    MONTHLY = "monthly"

    @property
    def periods_per_year(self) -> int:
        """Length of the annual cycle in bucket units."""
        return {"daily": 364, "weekly": 52, "monthly": 12}[self.value]


class Statistic(enum.Enum):
    MEAN = "mean"
    SUM = "sum"


@dataclass(frozen=True, eq=False)
class BucketSeries:
    """Aggregated series: one value per complete bucket, keyed by bucket start date."""

    starts: tuple[dt.date, ...]
    values: np.ndarray
    granularity: Granularity
    label: str = ""
    lengths: tuple[int, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.starts)


def month_number(date: dt.date) -> int:
    """Months since year 0, for month arithmetic."""
    return date.year * 12 + (date.month - 1)


def month_start(number: int) -> dt.date:
    return dt.date(number // 12, number % 12 + 1, 1)


def bucket_bounds(s: DailySeries, g: Granularity) -> list[tuple[dt.date, dt.date]]:
    """Inclusive ``(start, end)`` date ranges of every complete bucket in ``s``."""
    if g is Granularity.DAILY:
        return [(d, d) for d in s.dates()]
    if g is Granularity.WEEKLY:
        return [
            (s.origin + dt.timedelta(days=7 * k), s.origin + dt.timedelta(days=7 * k + 6))
            for k in range(len(s) // 7)
        ]
    first = month_number(s.origin) + (0 if s.origin.day == 1 else 1)
    after_last = month_number(s.end + dt.timedelta(days=1))
    return [(month_start(m), month_start(m + 1) - dt.timedelta(days=1)) for m in range(first, after_last)]


def aggregate(
    s: DailySeries,
    g: Granularity,
    statistic: Statistic | str = Statistic.MEAN,
) -> BucketSeries:
    """Collapse a daily series to weekly (origin-anchored 7-day blocks) or calendar-month buckets.

    Incomplete buckets at either end are dropped.
    """
    statistic = Statistic(statistic)
    bounds = bucket_bounds(s, g)
    if not bounds:
        raise EmptyAfterBucketing(f"no complete {g.value} bucket in {s.origin}..{s.end}")
    values = []
    lengths = []
    for a, b in bounds:
        chunk = s.values[s.index_of(a): s.index_of(b) + 1]
        values.append(chunk.sum() if statistic is Statistic.SUM else chunk.mean())
        lengths.append(chunk.size)
    return BucketSeries(
        starts=tuple(a for a, _ in bounds),
        values=_readonly(values),
        granularity=g,
        label=s.label,
        lengths=tuple(lengths),
    )


# --------------------------------------------------------------------------- CSV


def _open_text(source: str | Path | bytes | IO) -> IO[str]:
    if isinstance(source, (str, Path)):
        return open(source, encoding="utf-8", newline="")
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"), newline="")
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8", newline="")


def parse_series_csv(
    source: str | Path | bytes | IO,
    date_column: str = "date",
    value_column: str = "value",
    label: str | None = None,
    allow_negative: bool = True,
) -> DailySeries:
    """Read a two-column daily CSV.

    Lines starting with ``#`` are comments. Rows may come in any order; missing days
    become NaN gaps recorded on the returned series. Line numbers in errors are
    physical (the header is line 1).
    """
    fh = _open_text(source)
    close = isinstance(source, (str, Path))
    try:
        lines = fh.read().splitlines()
    finally:
        if close:
            fh.close()

    header_idx = None
    for i, line in enumerate(lines):
        if line.strip() and not line.lstrip().startswith("#"):
            header_idx = i
            break
    if header_idx is None:
        raise MalformedRow(1, "missing header row")
    header = [h.strip() for h in next(csv.reader([lines[header_idx]]))]
    try:
        di, vi = header.index(date_column), header.index(value_column)
    except ValueError:
        raise MalformedRow(header_idx + 1, f"header must contain {date_column!r} and {value_column!r}") from None

    rows: dict[dt.date, float] = {}
    for lineno, line in enumerate(lines[header_idx + 1:], start=header_idx + 2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = next(csv.reader([line]))
        if len(fields) != len(header):
            raise MalformedRow(lineno, f"expected {len(header)} fields, got {len(fields)}")
        try:
            date = dt.date.fromisoformat(fields[di].strip())
        except ValueError:
            raise MalformedRow(lineno, f"bad date {fields[di]!r}") from None
        text = fields[vi].strip()
        try:
            value = float(text)
        except ValueError:
            raise MalformedRow(lineno, f"bad number {text!r}") from None
        if not math.isfinite(value):
            raise NonFiniteValue(lineno, text)
        if not allow_negative and value < 0:
            raise NegativeValue(lineno, value)
        if date in rows:
            raise DuplicateDate(date, lineno)
        rows[date] = value
    if not rows:
        raise MalformedRow(len(lines) + 1, "no data rows")

    origin, last = min(rows), max(rows)
    values = np.full((last - origin).days + 1, np.nan)
    for date, value in rows.items():
        values[(date - origin).days] = value
    if label is None:
        label = Path(source).stem if isinstance(source, (str, Path)) else value_column
    return DailySeries(origin, values, label)


def format_series_csv(s: DailySeries, value_column: str = "value", header: str | None = None) -> str:
    """Render as CSV; ``repr`` floats so a re-parse is bit-identical. Gaps are omitted."""
    out = io.StringIO()
    if header:
        out.write(f"# {header}\n")
    out.write(f"date,{value_column}\n")
    for i, v in enumerate(s.values):
        if not math.isnan(v):
            out.write(f"{(s.origin + dt.timedelta(days=i)).isoformat()},{float(v)!r}\n")
    return out.getvalue()


def write_series_csv(s: DailySeries, path: str | Path, value_column: str = "value", header: str | None = None) -> None:
    Path(path).write_text(format_series_csv(s, value_column, header), encoding="utf-8")


def align_and_fill(
    demand: DailySeries,
    temperature: DailySeries,
    max_gap: int = 3,
) -> tuple[DailySeries, DailySeries]:
    """Restrict both series to their common date range and interpolate short gaps.

    Interior runs of at most ``max_gap`` missing days are filled linearly between the
    neighbouring observations; longer runs raise :class:`GapTooLarge`.
    """
    start = max(_first_valid(demand), _first_valid(temperature))
    end = min(_last_valid(demand), _last_valid(temperature))
    if end < start:
        raise NoOverlap(
            f"{demand.label or 'demand'} ({demand.origin}..{demand.end}) and "
            f"{temperature.label or 'temperature'} ({temperature.origin}..{temperature.end}) do not overlap"
        )
    return (
        fill_gaps(demand.window(start, end), max_gap),
        fill_gaps(temperature.window(start, end), max_gap),
    )


def _first_valid(s: DailySeries) -> dt.date:
    idx = np.flatnonzero(~np.isnan(s.values))
    if idx.size == 0:
        raise NoOverlap(f"series {s.label!r} holds no observations")
    return s.origin + dt.timedelta(days=int(idx[0]))


def _last_valid(s: DailySeries) -> dt.date:
    idx = np.flatnonzero(~np.isnan(s.values))
    return s.origin + dt.timedelta(days=int(idx[-1]))


def fill_gaps(s: DailySeries, max_gap: int = 3) -> DailySeries:
    """Linearly interpolate interior gaps of at most ``max_gap`` days."""
    values = s.values.copy()
    gaps = _find_gaps(s.origin, values)
    for start, length in gaps:
        if length > max_gap:
            raise GapTooLarge(start, length)
    missing = np.isnan(values)
    if missing.any():
        x = np.arange(values.size)
        values[missing] = np.interp(x[missing], x[~missing], values[~missing])
    return DailySeries(s.origin, values, s.label)
