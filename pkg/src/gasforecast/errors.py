"""Exception hierarchy shared by every gasforecast module."""

from __future__ import annotations

import datetime as dt


class ForecastError(Exception):
    """Base class for all errors raised by gasforecast."""


# ingestion / calendar

class MalformedRow(ForecastError):
    def __init__(self, line: int, reason: str = "") -> None:
        self.line = line
        msg = f"malformed row at line {line}"
        super().__init__(f"{msg}: {reason}" if reason else msg)


class DuplicateDate(ForecastError):
    def __init__(self, date: dt.date, line: int | None = None) -> None:
        self.date = date
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate date {date.isoformat()}{where}")


class NonFiniteValue(ForecastError):
    def __init__(self, line: int, value: str) -> None:
        self.line = line
        super().__init__(f"non-finite value {value!r} at line {line}")


class NegativeValue(ForecastError):
    def __init__(self, line: int, value: float) -> None:
        self.line = line
        super().__init__(f"negative demand value {value} at line {line}")


class GapTooLarge(ForecastError):
    def __init__(self, date: dt.date, length: int) -> None:
        self.date = date
        self.length = length
        super().__init__(f"gap of {length} day(s) starting {date.isoformat()} exceeds max_gap")


class NoOverlap(ForecastError):
    pass


class EmptyAfterBucketing(ForecastError):
    pass


class CalendarError(ForecastError):
    pass


# design matrix

class SpecViolation(ForecastError, ValueError):
    pass


class LengthMismatch(ForecastError, ValueError):
    pass


class SplitOutOfRange(ForecastError, IndexError):
    pass


# solver

class RankDeficient(ForecastError):
    def __init__(self, label: str, condition: float) -> None:
        self.label = label
        self.condition = condition
        super().__init__(
            f"design matrix is rank deficient (condition ~ {condition:.3g}); "
            f"first dependent column: {label!r}"
        )


class DimensionMismatch(ForecastError, ValueError):
    pass


class LabelMismatch(ForecastError, ValueError):
    pass


class ConditioningWarning(UserWarning):
    pass


# models

class InsufficientHistory(ForecastError):
    pass


class MissingTemperature(ForecastError):
    pass


class UncoveredHorizon(ForecastError):
    pass


class KindRequiresFeedback(ForecastError):
    pass


class MissingLagValue(ForecastError):
    def __init__(self, date: dt.date) -> None:
        self.date = date
        super().__init__(f"no actual demand available for {date.isoformat()}")


class SeriesTooShort(ForecastError):
    pass


# metrics

class ZeroActual(ForecastError, ValueError):
    pass


class ZeroMeanActual(ForecastError, ValueError):
    pass


# segregation

class NoSummerData(ForecastError):
    pass


class MissingHolidayMean(ForecastError):
    pass


class ClippingWarning(UserWarning):
    pass
