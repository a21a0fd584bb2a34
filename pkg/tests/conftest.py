import datetime as dt

import pytest

from gasforecast.data import CalendarConfig
from gasforecast.synth import GeneratorSpec, generate, synthetic_holidays

ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for an acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])

    def check(name: str, ok: bool, detail: str) -> None:
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        assert ok, f"{name}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def holiday_calendar():
    return CalendarConfig(holidays=frozenset(synthetic_holidays(2008, 2030)))


@pytest.fixture(scope="session")
def six_years(holiday_calendar):
    """Default synthetic dataset, 2010-2015."""
    n = (dt.date(2016, 1, 1) - dt.date(2010, 1, 1)).days
    return generate(GeneratorSpec(seed=7), holiday_calendar, n, dt.date(2010, 1, 1))
