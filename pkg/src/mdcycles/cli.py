"""``mdcycles`` command-line interface.

Exit codes: 0 success, 1 data or analysis error, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import (
    AnalysisConfig,
    DecomposeSettings,
    column_settings,
    configured_columns,
    load_config_file,
    peak_options,
    selection_strategy,
)
from .cycle import CycleReport, Marker, analyze
from .decompose import Decomposition, decompose
from .errors import ConfigError, InsufficiencyError, MdCyclesError, SelectionError
from .ingest import (
    COMPOSITES,
    CountsTable,
    RecordKind,
    bundled_counts_text,
    counts_from_records,
    load_counts_table,
    parse_fda_file,
    read_columns_csv,
    write_counts_csv,
)
from .peaks import Peak, PeakOptions, find_peaks
from .plot import PALETTE, FigureSpec, Trace, render_svg
from .series import MonthlySeries, YearMonth, index_to_date

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2

_FIELD_COLUMNS = {
    "received": ("X510kr", "PMAr", "X510krPMAr"),
    "decision": ("X510kc", "PMAa", "X510kcPMAa"),
}


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"mdcycles: error: {msg}", file=sys.stderr)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write_text(path: str | Path, text: str) -> None:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True)
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _ym(text: str) -> YearMonth:
    try:
        return YearMonth.parse(text)
    except MdCyclesError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# ---------------------------------------------------------------- ingest


def cmd_ingest(args) -> int:
    if args.from_counts:
        if args.pmn or args.pma:
            raise UsageError("--from-counts cannot be combined with --pmn/--pma")
        table = load_counts_table(_read_text(args.from_counts))
        text = _table_csv(table)
    else:
        if not args.pmn and not args.pma:
            raise UsageError("give at least one --pmn or --pma file (or --from-counts)")
        if args.start is None or args.end is None:
            raise UsageError("--start and --end are required when counting raw records")
        pmn, pma = [], []
        for paths, kind, bucket in ((args.pmn, RecordKind.PMN, pmn), (args.pma, RecordKind.PMA, pma)):
            for path in paths:
                records, diag = parse_fda_file(_read_text(path), kind)
                print(f"{path}: {diag.summary()}", file=sys.stderr)
                bucket.extend(records)
        table, excluded = counts_from_records(pmn, pma, args.start, args.end)
        for label in ("X510kr", "X510kc", "PMAr", "PMAa"):
            if excluded[label]:
                print(f"{label}: {excluded[label]} record(s) outside {args.start}..{args.end} excluded", file=sys.stderr)
        if args.date_field == "both":
            text = _table_csv(table)
        else:
            cols = _FIELD_COLUMNS[args.date_field]
            lines = ["date," + ",".join(cols)]
            for k in range(len(table)):
                lines.append(str(table.start + k) + "," + ",".join(str(int(table[c].values[k])) for c in cols))
            text = "\n".join(lines) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        _write_text(args.out, text)
    return EXIT_OK


def _table_csv(table: CountsTable) -> str:
    buf = io.StringIO()
    write_counts_csv(table, buf)
    return buf.getvalue()


# ---------------------------------------------------------------- analyze


def run_pipeline(series: MonthlySeries, settings: DecomposeSettings, opts: PeakOptions, strategy):
    """Decompose ``series`` and build its cycle report.

    Returns the decomposition, the report and the detected peak table.
    """
    dec = decompose(
        series,
        period=settings.period,
        seasonal=settings.seasonal,
        method=settings.method,
        half_width=settings.half_width,
        centering=settings.centering,
    )
    report = analyze(dec.trend, opts, strategy)
    return dec, report, find_peaks(dec.trend.values, opts)


def _peak_overrides(args) -> dict[str, str]:
    vals = {}
    for key in ("nups", "ndowns", "minpeakheight", "threshold", "minpeakdistance", "npeaks"):
        v = getattr(args, key, None)
        if v is not None:
            vals[key] = str(v)
    if getattr(args, "sort_desc", False):
        vals["sort_desc"] = "true"
    return vals


def _strategy_overrides(args) -> dict[str, str]:
    vals = {}
    if args.mode:
        vals["mode"] = args.mode
    if args.window:
        vals["windows"] = ",".join(args.window)
    if args.explicit:
        vals["explicit"] = args.explicit
    if args.force:
        vals["force"] = "true"
    if "mode" not in vals:
        if "windows" in vals:
            vals["mode"] = "window_max"
        elif "explicit" in vals:
            vals["mode"] = "explicit_indices"
    return vals


def build_config(args) -> AnalysisConfig:
    cp = load_config_file(args.config)
    dset, opts, strategy = column_settings(cp, args.column)
    if args.period is not None:
        dset = replace(dset, period=args.period)
    if args.no_seasonal:
        dset = replace(dset, seasonal=False)
    if args.method:
        dset = replace(dset, method=args.method)
    if args.centering:
        dset = replace(dset, centering=args.centering)
    if args.half_width is not None:
        dset = replace(dset, half_width=args.half_width)
    opts = peak_options(_peak_overrides(args), opts)
    strategy = selection_strategy(_strategy_overrides(args), strategy)
    return AnalysisConfig(
        input=args.input or "<bundled>",
        column=args.column,
        decompose=dset,
        peaks=opts,
        strategy=strategy,
        report=args.report,
        decomp=args.decomp,
    )


def _load_column(cfg: AnalysisConfig) -> MonthlySeries:
    text = bundled_counts_text() if cfg.input == "<bundled>" else _read_text(cfg.input)
    cols = read_columns_csv(text)
    if cfg.column not in cols:
        raise UsageError(f"column {cfg.column!r} not in {cfg.input} (have: {', '.join(cols)})")
    return cols[cfg.column]


def _print_candidates(exc) -> None:
    print("detected candidates:", file=sys.stderr)
    if not exc.candidates:
        print("  (none)", file=sys.stderr)
    for c in exc.candidates:
        print(f"  {c['date']}  index={c['index']}  value={c['value']}", file=sys.stderr)


def _decomp_csv(dec: Decomposition) -> str:
    buf = io.StringIO()
    dec.to_csv(buf)
    return buf.getvalue()


def cmd_analyze(args) -> int:
    cfg = build_config(args)
    series = _load_column(cfg)
    try:
        dec, report, _ = run_pipeline(series, cfg.decompose, cfg.peaks, cfg.strategy)
    except (InsufficiencyError, SelectionError) as exc:
        _err(str(exc))
        _print_candidates(exc)
        return EXIT_DATA
    if cfg.decomp:
        _write_text(cfg.decomp, _decomp_csv(dec))
    if cfg.report:
        _write_text(cfg.report, report.to_json())
    for w in report.selection.get("warnings", []):
        print(f"warning: {w}", file=sys.stderr)
    print(report.summary())
    return EXIT_OK


# ---------------------------------------------------------------- plot


def _split(arg: str | None) -> list[str]:
    return [p for p in (arg or "").split(",") if p]


def read_decomposition_trend(path: str, label: str | None = None) -> MonthlySeries:
    cols = read_columns_csv(_read_text(path))
    if "trend" not in cols:
        raise UsageError(f"{path}: no trend column")
    return cols["trend"].with_values(cols["trend"].values, label=label or Path(path).stem)


def read_report_markers(path: str) -> tuple[str, tuple[Marker, ...]]:
    try:
        d = json.loads(_read_text(path))
        markers = tuple(
            Marker(YearMonth.parse(d[k]["date"]), int(d[k]["index"]), float(d[k]["amplitude"]))
            for k in ("peak1", "trough", "peak2")
        )
        return str(d["label"]), markers
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: not a cycle report ({exc})") from None


def figure_svg(trends: list[MonthlySeries], markers: list[tuple[Marker, ...]], **kw) -> str:
    traces = tuple(Trace(s, PALETTE[k], m) for k, (s, m) in enumerate(zip(trends, markers)))
    return render_svg(FigureSpec(traces, **kw))


def cmd_plot(args) -> int:
    decomps, reports = _split(args.decomp), _split(args.report)
    if not decomps:
        raise UsageError("--decomp needs at least one CSV")
    if len(decomps) > 2:
        raise UsageError("at most two decomposition CSVs")
    if reports and len(reports) != len(decomps):
        raise UsageError("give one report per decomposition CSV")
    labels, markers = [], []
    for r in reports:
        label, m = read_report_markers(r)
        labels.append(label)
        markers.append(m)
    if not reports:
        labels = [None] * len(decomps)
        markers = [()] * len(decomps)
    trends = [read_decomposition_trend(p, lab) for p, lab in zip(decomps, labels)]
    try:
        svg = figure_svg(trends, markers, width=args.width, height=args.height, title=args.title or "")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write_text(args.out, svg)
    return EXIT_OK


# ---------------------------------------------------------------- reproduce-paper


def _peaks_csv(trend: MonthlySeries, peaks: list[Peak]) -> str:
    lines = ["date,value,index,start,end"]
    for p in peaks:
        lines.append(f"{index_to_date(trend, p.index)},{p.value:.4f},{p.index},{p.start},{p.end}")
    return "\n".join(lines) + "\n"


def cmd_reproduce(args) -> int:
    cp = load_config_file(args.config)
    columns = configured_columns(cp) or list(COMPOSITES)
    table = load_counts_table(bundled_counts_text() if args.input is None else _read_text(args.input))
    for c in columns:
        if c not in table.series:
            raise UsageError(f"config names unknown column {c!r}")
    jobs = [(table[c], *column_settings(cp, c)) for c in columns]

    try:
        with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
            results = list(pool.map(lambda j: run_pipeline(*j), jobs))
    except (InsufficiencyError, SelectionError) as exc:
        _err(str(exc))
        _print_candidates(exc)
        return EXIT_DATA

    out = Path(args.out_dir)
    for c, (dec, report, peaks) in zip(columns, results):
        _write_text(out / f"decomposition_{c}.csv", _decomp_csv(dec))
        _write_text(out / f"report_{c}.json", report.to_json())
        _write_text(out / f"findpeaks_{c}.csv", _peaks_csv(dec.trend, peaks))
        for w in report.selection.get("warnings", []):
            print(f"warning: {c}: {w}", file=sys.stderr)
        print(report.summary())
    svg = figure_svg(
        [dec.trend for dec, _, _ in results],
        [_markers(r) for _, r, _ in results],
        title="Composite trends: applications (red), registrations (blue)",
    )
    _write_text(out / "cycles.svg", svg)
    return EXIT_OK


def _markers(report: CycleReport) -> tuple[Marker, ...]:
    return (report.peak1, report.trough, report.peak2)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mdcycles", description="Secular cycle analysis of monthly FDA device counts.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    pi = sub.add_parser("ingest", help="count raw FDA records per month")
    pi.add_argument("--pmn", nargs="+", action="extend", default=[], metavar="FILE", help="510(k)/De Novo download files")
    pi.add_argument("--pma", nargs="+", action="extend", default=[], metavar="FILE", help="PMA download files")
    pi.add_argument(
        "--date-field",
        choices=["received", "decision", "both"],
        default="both",
        help="received: applications only; decision: registrations only; both (default): all six columns",
    )
    pi.add_argument("--start", type=_ym, metavar="YYYY-MM")
    pi.add_argument("--end", type=_ym, metavar="YYYY-MM")
    pi.add_argument("--from-counts", metavar="CSV", help="validate and re-emit an existing counts table")
    pi.add_argument("--out", metavar="CSV", help="output path (default: stdout)")
    pi.set_defaults(func=cmd_ingest)

    pa = sub.add_parser("analyze", help="decompose one column and report its cycle")
    pa.add_argument("--input", metavar="CSV", help="counts table (default: bundled 1976-2020 data)")
    pa.add_argument("--column", required=True)
    pa.add_argument("--config", metavar="INI", help="analysis config (default: shipped reproduction config)")
    pa.add_argument("--report", metavar="JSON")
    pa.add_argument("--decomp", metavar="CSV")
    g = pa.add_argument_group("decomposition overrides")
    g.add_argument("--period", type=int)
    g.add_argument("--no-seasonal", action="store_true")
    g.add_argument("--method", choices=["refined", "classical"])
    g.add_argument("--centering", choices=["indices", "observations"])
    g.add_argument("--half-width", type=int)
    g = pa.add_argument_group("peak overrides")
    g.add_argument("--nups", type=int)
    g.add_argument("--ndowns", type=int)
    g.add_argument("--minpeakheight", type=float)
    g.add_argument("--threshold", type=float)
    g.add_argument("--minpeakdistance", type=int)
    g.add_argument("--npeaks", type=int)
    g.add_argument("--sort-desc", action="store_true")
    g = pa.add_argument_group("selection overrides")
    g.add_argument("--mode", choices=["auto_first_two", "window_max", "explicit_indices"])
    g.add_argument("--window", action="append", metavar="YYYY-MM..YYYY-MM", help="repeat twice for window_max")
    g.add_argument("--explicit", metavar="I1,I2", help="two 1-based trend indices")
    g.add_argument("--force", action="store_true", help="accept explicit indices that are not detected peaks")
    pa.set_defaults(func=cmd_analyze)

    pp = sub.add_parser("plot", help="draw trends and cycle markers as SVG")
    pp.add_argument("--decomp", required=True, metavar="CSV[,CSV]")
    pp.add_argument("--report", metavar="JSON[,JSON]")
    pp.add_argument("--out", required=True, metavar="SVG")
    pp.add_argument("--width", type=int, default=800)
    pp.add_argument("--height", type=int, default=450)
    pp.add_argument("--title")
    pp.set_defaults(func=cmd_plot)

    pr = sub.add_parser("reproduce-paper", help="run the reference analysis of both composites")
    pr.add_argument("--out-dir", required=True)
    pr.add_argument("--config", metavar="INI")
    pr.add_argument("--input", metavar="CSV", help="counts table (default: bundled data)")
    pr.set_defaults(func=cmd_reproduce)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except MdCyclesError as exc:
        _err(str(exc))
        return EXIT_DATA
    except OSError as exc:
        _err(str(exc))
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
