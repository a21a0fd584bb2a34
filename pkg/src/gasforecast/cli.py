"""``gasforecast`` command line: ingest, fit, forecast, evaluate, segregate, synth."""

from __future__ import annotations

import argparse
import datetime as dt
import json
import logging
import shlex
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from . import ar, models
from .data import (
    CalendarConfig,
    DailySeries,
    Granularity,
    align_and_fill,
    dump_calendar,
    fill_gaps,
    load_calendar,
    parse_series_csv,
    write_series_csv,
)
from .design import RegressorSpec
from .errors import ForecastError, MissingTemperature
from .segregation import SUMMER_MONTHS, format_ratio_table, segregate
from .synth import GeneratorSpec, generate, synthetic_holidays

log = logging.getLogger("gasforecast")


class CommandError(Exception):
    pass


# --------------------------------------------------------------------------- argument types


def _date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM-DD, got {text!r}") from None


def _years(text: str) -> list[int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            first, last = int(a), int(b)
        else:
            first = last = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YEAR or Y1..Y2, got {text!r}") from None
    if last < first:
        raise argparse.ArgumentTypeError(f"empty year range {text!r}")
    return list(range(first, last + 1))


def _date_range(text: str) -> tuple[dt.date, dt.date]:
    parts = text.split("..")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected START..END, got {text!r}")
    start, end = _date(parts[0]), _date(parts[1])
    if end < start:
        raise argparse.ArgumentTypeError(f"empty date range {text!r}")
    return start, end


def _months(text: str) -> frozenset[int]:
    months: set[int] = set()
    for part in filter(None, (p.strip() for p in text.split(","))):
        try:
            if "-" in part:
                a, b = (int(x) for x in part.split("-", 1))
                months.update(range(a, b + 1))
            else:
                months.add(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad month list {text!r}") from None
    if any(not 1 <= m <= 12 for m in months):
        raise argparse.ArgumentTypeError(f"months must lie in 1..12: {text!r}")
    return frozenset(months)


# --------------------------------------------------------------------------- shared helpers


def _invocation(argv: Sequence[str]) -> str:
    return "invocation: gasforecast " + shlex.join(argv)


def _existing(path: Path | None, what: str) -> Path | None:
    if path is not None and not path.is_file():
        raise CommandError(f"{what} file not found: {path}")
    return path


def _load_inputs(args, need_temperature: bool) -> tuple[DailySeries, DailySeries | None]:
    demand_path = _existing(args.demand, "demand")
    temp_path = _existing(args.temperature, "temperature")
    if need_temperature and temp_path is None:
        raise MissingTemperature(f"--kind {args.kind} needs --temperature")
    demand = parse_series_csv(demand_path, label=demand_path.stem, allow_negative=False)
    if temp_path is None:
        return fill_gaps(demand, args.max_gap), None
    temperature = parse_series_csv(temp_path, label=temp_path.stem)
    return align_and_fill(demand, temperature, args.max_gap)


def _spec(args) -> RegressorSpec:
    overrides = {
        "annual_harmonics": args.annual_harmonics,
        "weekly_harmonics": args.weekly_harmonics,
        "modulated_harmonics": args.modulated_harmonics,
        "comfort_temp": args.comfort_temp,
    }
    return RegressorSpec(**{k: v for k, v in overrides.items() if v is not None})


def _out_dir(args) -> Path:
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


def _write_json(path: Path, payload: dict, header: str) -> None:
    path.write_text(json.dumps({"invocation": header.split(": ", 1)[1], **payload}, indent=2) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------- commands


def cmd_ingest(args, header: str) -> None:
    out = _out_dir(args)
    demand = parse_series_csv(_existing(args.demand, "demand"), allow_negative=False)
    temperature = parse_series_csv(_existing(args.temperature, "temperature"))
    raw_gaps = {"demand": demand.gaps, "temperature": temperature.gaps}
    demand, temperature = align_and_fill(demand, temperature, args.max_gap)
    write_series_csv(demand, out / "demand.csv", header=header)
    write_series_csv(temperature, out / "temperature.csv", header=header)
    _write_json(out / "ingest.json", {
        "start": demand.origin.isoformat(),
        "end": demand.end.isoformat(),
        "n_days": len(demand),
        "filled_gaps": {k: [[d.isoformat(), n] for d, n in v] for k, v in raw_gaps.items()},
    }, header)


def cmd_fit(args, header: str) -> None:
    spec = _spec(args)
    kind = models.ModelKind(args.kind)
    demand, temperature = _load_inputs(args, kind.uses_temperature)
    train_end = args.train_end or demand.end + dt.timedelta(days=1)
    model = models.fit_model(kind, demand, temperature, spec, train_end, args.granularity)
    out = _out_dir(args)
    models.save_model(model, out / "model.csv", [header])
    log.info("wrote %s (%d coefficients)", out / "model.csv", len(model.coefficients))
    modelling = models.in_sample(model, demand, temperature)
    _write_json(out / "fit.json", {
        **modelling.summary(),
        "condition_estimate": model.coefficients.condition_estimate,
        "n_columns": len(model.coefficients),
    }, header)


def cmd_forecast(args, header: str) -> None:
    model = models.load_model(_existing(args.model, "model"))
    temperature = parse_series_csv(_existing(args.temperature, "temperature")) if args.temperature else None
    actual = parse_series_csv(_existing(args.demand, "demand"), allow_negative=False) if args.demand else None
    if model.kind.uses_temperature and temperature is None:
        raise MissingTemperature(f"a {model.kind.name} model needs --temperature")
    result = models.forecast(model, args.horizon, temperature, actual)
    out = _out_dir(args)
    (out / "forecast.csv").write_text(result.to_csv(header), encoding="utf-8")
    _write_json(out / "forecast.json", result.summary(), header)


def cmd_evaluate(args, header: str) -> None:
    spec = _spec(args)
    kind = models.ModelKind(args.kind)
    demand, temperature = _load_inputs(args, kind.uses_temperature)
    out = _out_dir(args)
    results = models.rollover_evaluate(kind, demand, temperature, spec, args.years, args.granularity)
    ar_results = ar.rollover_ar(demand, args.years, args.ar_order) if args.ar_order else []

    cols = ["year", f"{kind.value}_mape", f"{kind.value}_rmse_pct"]
    if ar_results:
        cols += ["ar_mape", "ar_rmse_pct"]
    lines = [f"# {header}", ",".join(cols)]
    summary = []
    for i, r in enumerate(results):
        row = [str(r.year), f"{r.metrics.mape_percent:.4f}", f"{r.metrics.rmse_percent:.4f}"]
        entry = {kind.value: r.summary()}
        if ar_results:
            ar_model, ar_r = ar_results[i]
            row += [f"{ar_r.metrics.mape_percent:.4f}", f"{ar_r.metrics.rmse_percent:.4f}"]
            entry["ar"] = {**ar_r.summary(), "lag_coefficients": ar_model.lag_coefficients.tolist(),
                           "intercept": ar_model.intercept}
            (out / f"forecast_ar_{r.year}.csv").write_text(ar_r.to_csv(header), encoding="utf-8")
        lines.append(",".join(row))
        summary.append(entry)
        (out / f"forecast_{kind.value}_{r.year}.csv").write_text(r.to_csv(header), encoding="utf-8")
    (out / "evaluation.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if ar_results:
        table = ar.format_coefficient_table([(r.year, m) for m, r in ar_results], header)
        (out / "ar_coefficients.csv").write_text(table, encoding="utf-8")
    _write_json(out / "evaluation.json", {"years": summary}, header)


def cmd_segregate(args, header: str) -> None:
    cal = load_calendar(_existing(args.calendar, "calendar")) if args.calendar else CalendarConfig()
    if not args.summer_months:
        raise CommandError("summer window is empty")
    reports = {}
    for path in args.demand:
        series = fill_gaps(parse_series_csv(_existing(path, "demand"), label=path.stem, allow_negative=False), args.max_gap)
        reports[path.stem] = segregate(series, cal, args.years, args.summer_months)
    out = _out_dir(args)
    (out / "ratio_holiday.csv").write_text(format_ratio_table(reports, "holiday", header), encoding="utf-8")
    (out / "ratio_weekend.csv").write_text(format_ratio_table(reports, "weekend", header), encoding="utf-8")
    _write_json(out / "segregation.json", {
        label: [asdict(r) for r in rows] for label, rows in reports.items()
    }, header)


def cmd_synth(args, header: str) -> None:
    params = json.loads(_existing(args.spec, "generator spec").read_text()) if args.spec else {}
    if args.seed is not None:
        params["seed"] = args.seed
    spec = GeneratorSpec.from_dict(params)
    years = args.years or list(range(2010, 2016))
    origin = dt.date(years[0], 1, 1)
    n_days = (dt.date(years[-1] + 1, 1, 1) - origin).days
    cal = CalendarConfig(holidays=frozenset(synthetic_holidays(years[0], years[-1])))
    data = generate(spec, cal, n_days, origin)
    out = _out_dir(args)
    write_series_csv(data.demand, out / "demand.csv", header=header)
    write_series_csv(data.temperature, out / "temperature.csv", header=header)
    dump_calendar(cal, out / "calendar.yaml", header=header)
    residential = spec.base_level
    industry, weekend = spec.industrial_level, spec.industrial_level * spec.weekend_industrial_fraction
    _write_json(out / "truth.json", {
        "generator": spec.to_dict(),
        "start": origin.isoformat(),
        "n_days": n_days,
        "clipped_days": data.clipped_days,
        # exact only when summer residential demand equals base_level
        "nominal_ratio_holiday": 100.0 * industry / residential,
        "nominal_ratio_weekend": 100.0 * (industry - weekend) / (residential + weekend),
    }, header)


# --------------------------------------------------------------------------- parser


def _add_inputs(p: argparse.ArgumentParser, temperature: bool = True) -> None:
    p.add_argument("--demand", type=Path, required=True, help="daily demand CSV (date,value)")
    if temperature:
        p.add_argument("--temperature", type=Path, help="daily temperature CSV (date,value), deg C")
    p.add_argument("--max-gap", type=int, default=3, help="longest gap (days) filled by interpolation")


def _add_spec(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=[k.value for k in models.ModelKind], default="fset")
    p.add_argument("--granularity", choices=[g.value for g in Granularity], default="daily")
    p.add_argument("--annual-harmonics", type=int, help="annual harmonic pairs (default 12)")
    p.add_argument("--weekly-harmonics", type=int, help="weekly harmonic pairs (default 2, max 3)")
    p.add_argument("--modulated-harmonics", type=int, help="t-modulated annual pairs (default 5)")
    p.add_argument("--comfort-temp", type=float, help="comfortable temperature, deg C (default 18)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log written files")
    parser = argparse.ArgumentParser(prog="gasforecast", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="align demand and temperature, fill short gaps")
    p.add_argument("--demand", type=Path, required=True)
    p.add_argument("--temperature", type=Path, required=True)
    p.add_argument("--max-gap", type=int, default=3)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fit", parents=[common], help="fit an FSE/FSET/FSETF model and write its coefficients")
    _add_inputs(p)
    _add_spec(p)
    p.add_argument("--train-end", type=_date, help="first day excluded from training (default: after last day)")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("forecast", parents=[common], help="forecast a horizon with a saved model")
    p.add_argument("--model", type=Path, required=True, help="model.csv written by 'fit'")
    p.add_argument("--horizon", type=_date_range, required=True, help="START..END (inclusive)")
    p.add_argument("--temperature", type=Path, help="temperature over the horizon")
    p.add_argument("--demand", type=Path, help="actual demand (required for FSETF, enables metrics)")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("evaluate", parents=[common], help="roll-over yearly evaluation, optionally against AR(p)")
    _add_inputs(p)
    _add_spec(p)
    p.add_argument("--years", type=_years, required=True, help="target years, Y1..Y2")
    p.add_argument("--ar-order", type=int, help="also run the AR(N) benchmark")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("segregate", parents=[common], help="industrial share from summer weekday/weekend/holiday means")
    p.add_argument("--demand", type=Path, action="append", required=True, help="demand CSV (repeatable)")
    p.add_argument("--calendar", type=Path, help="YAML/JSON calendar (weekend_days, holidays, exclusion_windows)")
    p.add_argument("--years", type=_years, help="years to report (default: every year with summer data)")
    p.add_argument("--summer-months", type=_months, default=SUMMER_MONTHS, help="e.g. 4-9 (default)")
    p.add_argument("--max-gap", type=int, default=3)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_segregate)

    p = sub.add_parser("synth", parents=[common], help="write synthetic demand, temperature, calendar and truth files")
    p.add_argument("--years", type=_years, help="calendar years to generate (default 2010..2015)")
    p.add_argument("--seed", type=int)
    p.add_argument("--spec", type=Path, help="JSON file of generator parameters")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args, _invocation(argv))
    except (ForecastError, CommandError, OSError, ValueError) as exc:
        print(f"gasforecast {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
