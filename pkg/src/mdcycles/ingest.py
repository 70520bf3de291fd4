"""Reading FDA 510(k)/PMA download files and monthly counts tables.

Two inputs are supported:

* raw FDA downloads (pipe-delimited, one row per submission) which are
  parsed into :class:`FdaRecord` objects and then binned by month with
  :func:`count_monthly`;
* counts tables with the six canonical columns, such as the bundled
  1976-05 .. 2020-12 dataset (:func:`load_bundled`).

Files are never downloaded here. The 510(k) archives (PMN7680 ... PMN96CUR)
and the PMA archive are published at
https://www.fda.gov/medical-devices/510k-clearances/downloadable-510k-files and
https://www.fda.gov/medical-devices/device-approvals-denials-and-clearances/pma-approvals
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import io
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, TextIO

import numpy as np

from .errors import IntegrityError, ParseError, RangeError, SchemaError
from .series import MonthlySeries, YearMonth, composite

CANONICAL_COLUMNS = ("X510kr", "X510kc", "PMAr", "PMAa", "X510krPMAr", "X510kcPMAa")
# composite -> (PMN column, PMA column)
COMPOSITES = {"X510krPMAr": ("X510kr", "PMAr"), "X510kcPMAa": ("X510kc", "PMAa")}
DEFAULT_START = YearMonth(1976, 5)
BUNDLED_COUNTS = "fda_md_counts_1976_2020.csv"

RECEIVED_COLUMN = "DATERECEIVED"
DECISION_COLUMN = "DECISIONDATE"
_ID_COLUMNS = ("KNUMBER", "PMANUMBER", "DENNUMBER")


class RecordKind(str, enum.Enum):
    PMN = "PMN"
    PMA = "PMA"


class DateField(str, enum.Enum):
    RECEIVED = "received"
    DECISION = "decision"


@dataclass(frozen=True)
class FdaRecord:
    record_id: str
    date_received: dt.date | None
    decision_date: dt.date | None
    kind: RecordKind

    def date(self, which: DateField | str) -> dt.date | None:
        return self.date_received if DateField(which) is DateField.RECEIVED else self.decision_date


@dataclass
class ParseDiagnostics:
    rows_read: int = 0
    kept: int = 0
    rejected: int = 0
    unparseable_dates: int = 0
    date_formats: Counter = field(default_factory=Counter)
    duplicate_ids: list[str] = field(default_factory=list)
    de_novo: int = 0

    def summary(self) -> str:
        fmts = ", ".join(f"{k}={v}" for k, v in sorted(self.date_formats.items())) or "none"
        return (
            f"rows={self.rows_read} kept={self.kept} rejected={self.rejected} "
            f"bad_dates={self.unparseable_dates} duplicates={len(self.duplicate_ids)} "
            f"de_novo={self.de_novo} formats[{fmts}]"
        )


# Tried in order; the first that matches wins.
_DATE_FORMATS = (
    ("MM/DD/YYYY", re.compile(r"^(\d{1,2})/(\d{1,2})/(\d{4})$"), "mdy"),
    ("YYYY-MM-DD", re.compile(r"^(\d{4})-(\d{1,2})-(\d{1,2})$"), "ymd"),
    ("YYYYMMDD", re.compile(r"^(\d{4})(\d{2})(\d{2})$"), "ymd"),
    ("M/D/YY", re.compile(r"^(\d{1,2})/(\d{1,2})/(\d{2})$"), "mdy2"),
)
_TWO_DIGIT_PIVOT = 50


def parse_date(text: str) -> tuple[dt.date, str] | None:
    """Parse one FDA date cell; returns ``(date, format_name)`` or None."""
    text = text.strip()
    if not text:
        return None
    # some exports append a midnight time component
    text = text.split(" ", 1)[0]
    for name, rx, order in _DATE_FORMATS:
        m = rx.match(text)
        if not m:
            continue
        a, b, c = (int(g) for g in m.groups())
        if order == "ymd":
            y, mo, d = a, b, c
        elif order == "mdy":
            mo, d, y = a, b, c
        else:
            mo, d = a, b
            y = 1900 + c if c >= _TWO_DIGIT_PIVOT else 2000 + c
        try:
            return dt.date(y, mo, d), name
        except ValueError:
            return None
    return None


def _sniff_delimiter(header: str) -> str:
    for delim in ("|", ",", "\t"):
        if delim in header:
            return delim
    return "|"


def parse_fda_file(content: TextIO | str, kind: RecordKind | str) -> tuple[list[FdaRecord], ParseDiagnostics]:
    """Parse an FDA 510(k) or PMA download into records.

    The header must contain DATERECEIVED and DECISIONDATE (any case). The
    delimiter is taken from the header line: ``|`` first, then ``,`` and tab.
    Rows without an id, or without either date, are rejected and counted.
    """
    kind = RecordKind(kind)
    stream = io.StringIO(content) if isinstance(content, str) else content
    header_line = stream.readline()
    if not header_line.strip():
        raise SchemaError("empty input: no header row")
    delim = _sniff_delimiter(header_line)
    header = [h.strip().strip('"').upper() for h in header_line.rstrip("\r\n").split(delim)]
    if RECEIVED_COLUMN not in header and DECISION_COLUMN not in header:
        raise SchemaError(f"header lacks {RECEIVED_COLUMN} and {DECISION_COLUMN}: {header[:8]}")
    col_rcv = header.index(RECEIVED_COLUMN) if RECEIVED_COLUMN in header else None
    col_dec = header.index(DECISION_COLUMN) if DECISION_COLUMN in header else None
    col_id = next((header.index(c) for c in _ID_COLUMNS if c in header), 0)

    quoting = csv.QUOTE_NONE if delim == "|" else csv.QUOTE_MINIMAL
    reader = csv.reader(stream, delimiter=delim, quoting=quoting)
    diag = ParseDiagnostics()
    records: list[FdaRecord] = []
    seen: Counter = Counter()

    def cell(row, j):
        return row[j] if j is not None and j < len(row) else ""

    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        diag.rows_read += 1
        rid = cell(row, col_id).strip()
        dates = []
        for j in (col_rcv, col_dec):
            raw = cell(row, j)
            parsed = parse_date(raw)
            if parsed is None:
                if raw.strip():
                    diag.unparseable_dates += 1
                dates.append(None)
            else:
                dates.append(parsed[0])
                diag.date_formats[parsed[1]] += 1
        if not rid or (dates[0] is None and dates[1] is None):
            diag.rejected += 1
            continue
        seen[rid] += 1
        if rid.upper().startswith("DEN"):
            diag.de_novo += 1
        records.append(FdaRecord(rid, dates[0], dates[1], kind))
    diag.kept = len(records)
    diag.duplicate_ids = sorted(k for k, v in seen.items() if v > 1)
    return records, diag


@dataclass(frozen=True)
class MonthlyCounts:
    """Result of :func:`count_monthly`.

    ``excluded`` counts dated records falling outside the range, ``undated``
    those lacking the selected date.
    """

    series: MonthlySeries
    excluded: int
    undated: int


def count_monthly(
    records: Iterable[FdaRecord],
    which: DateField | str,
    start: YearMonth,
    end: YearMonth,
    label: str | None = None,
) -> MonthlyCounts:
    """Number of records whose selected date falls in each month of ``start..end``."""
    if end < start:
        raise RangeError(f"empty range {start}..{end}")
    which = DateField(which)
    n = (end - start) + 1
    counts = np.zeros(n)
    excluded = undated = 0
    for rec in records:
        d = rec.date(which)
        if d is None:
            undated += 1
            continue
        k = YearMonth(d.year, d.month) - start
        if 0 <= k < n:
            counts[k] += 1
        else:
            excluded += 1
    return MonthlyCounts(MonthlySeries(label or which.value, start, counts), excluded, undated)


def counts_from_records(
    pmn: Iterable[FdaRecord],
    pma: Iterable[FdaRecord],
    start: YearMonth,
    end: YearMonth,
) -> tuple["CountsTable", dict[str, int]]:
    """Build all six canonical series from parsed PMN and PMA records.

    Returns the table and the number of out-of-range records per column.
    """
    pmn, pma = list(pmn), list(pma)
    plan = {
        "X510kr": (pmn, DateField.RECEIVED),
        "X510kc": (pmn, DateField.DECISION),
        "PMAr": (pma, DateField.RECEIVED),
        "PMAa": (pma, DateField.DECISION),
    }
    series, excluded = {}, {}
    for label, (recs, which) in plan.items():
        res = count_monthly(recs, which, start, end, label=label)
        series[label] = res.series
        excluded[label] = res.excluded
    for label, (a, b) in COMPOSITES.items():
        series[label] = composite(series[a], series[b], label=label)
    return CountsTable(start, series), excluded


@dataclass(frozen=True)
class CountsTable:
    """The six canonical monthly count series, aligned on one calendar axis."""

    start: YearMonth
    series: Mapping[str, MonthlySeries]

    def __post_init__(self):
        lengths = {len(s) for s in self.series.values()}
        starts = {s.start for s in self.series.values()}
        if len(lengths) > 1 or starts != {self.start}:
            raise IntegrityError("counts table series are not aligned")

    def __getitem__(self, label: str) -> MonthlySeries:
        return self.series[label]

    def __len__(self) -> int:
        return len(next(iter(self.series.values())))

    def row(self, i: int) -> tuple[int, ...]:
        """Canonical-order counts of the 1-based row ``i``."""
        return tuple(int(self.series[c].at(i)) for c in CANONICAL_COLUMNS)


def read_columns_csv(content: TextIO | str, start: YearMonth | None = None) -> dict[str, MonthlySeries]:
    """Read a comma-delimited monthly table into series keyed by column name.

    A leading ``date`` column (YYYY-MM, consecutive months) anchors the
    series; any other leading non-numeric column, such as an R row-name
    column, is ignored and ``start`` (default 1976-05) is used instead.
    Integer-valued columns are parsed strictly as integers.
    """
    stream = io.StringIO(content) if isinstance(content, str) else content
    reader = csv.reader(stream)
    header = next(reader, None)
    if not header or not any(h.strip() for h in header):
        raise SchemaError("empty input: no header row")
    header = [h.strip().strip('"') for h in header]
    rows = [r for r in reader if r and any(c.strip() for c in r)]
    if not rows:
        raise SchemaError("table has a header but no data rows")

    first = header[0]
    skip_first = first.lower() in ("date", "", "row") or first.lower().startswith("unnamed")
    date_col = first.lower() == "date"
    names = header[1:] if skip_first else header
    offset = 1 if skip_first else 0
    if start is None:
        start = DEFAULT_START
    if date_col:
        start = YearMonth.parse(rows[0][0])
        for k, r in enumerate(rows):
            if YearMonth.parse(r[0]) != start + k:
                raise ParseError(f"row {k + 1}, column date: expected {start + k}, got {r[0]!r}")

    data = np.empty((len(rows), len(names)))
    for k, r in enumerate(rows):
        if len(r) - offset != len(names):
            raise ParseError(f"row {k + 1}: expected {len(names)} values, got {len(r) - offset}")
        for j, name in enumerate(names):
            cell = r[j + offset].strip()
            try:
                data[k, j] = float(cell)
            except ValueError:
                raise ParseError(f"row {k + 1}, column {name}: not a number: {cell!r}") from None
    return {name: MonthlySeries(name, start, data[:, j]) for j, name in enumerate(names)}


def load_counts_table(content: TextIO | str, start: YearMonth | None = None) -> CountsTable:
    """Load and validate a six-column counts table.

    Every count must be a non-negative integer, and each composite column
    must equal the sum of its PMN and PMA columns on every row.
    """
    cols = read_columns_csv(content, start)
    missing = [c for c in CANONICAL_COLUMNS if c not in cols]
    if missing:
        raise SchemaError(f"missing canonical columns: {', '.join(missing)}")
    for name in CANONICAL_COLUMNS:
        v = cols[name].values
        bad = np.flatnonzero((v != np.round(v)) | (v < 0))
        if bad.size:
            raise ParseError(f"row {bad[0] + 1}, column {name}: not a count: {v[bad[0]]!r}")
    for name, (a, b) in COMPOSITES.items():
        diff = np.flatnonzero(cols[name].values != cols[a].values + cols[b].values)
        if diff.size:
            i = diff[0]
            raise IntegrityError(
                f"row {i + 1}: {name}={cols[name].values[i]:g} != "
                f"{a}+{b}={cols[a].values[i]:g}+{cols[b].values[i]:g}"
            )
    table_start = cols[CANONICAL_COLUMNS[0]].start
    return CountsTable(table_start, {c: cols[c] for c in CANONICAL_COLUMNS})


def bundled_counts_text() -> str:
    return resources.files("mdcycles").joinpath("data").joinpath(BUNDLED_COUNTS).read_text(encoding="utf-8")


def load_bundled() -> CountsTable:
    """The bundled monthly counts, May 1976 through December 2020 (536 rows)."""
    return load_counts_table(bundled_counts_text())


def write_counts_csv(table: CountsTable, out: TextIO) -> None:
    """Write ``date`` plus the six canonical columns, one row per month."""
    out.write("date," + ",".join(CANONICAL_COLUMNS) + "\n")
    for k in range(len(table)):
        ym = table.start + k
        out.write(str(ym) + "," + ",".join(str(v) for v in table.row(k + 1)) + "\n")
