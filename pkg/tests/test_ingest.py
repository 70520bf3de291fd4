import datetime as dt
import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mdcycles.errors import IntegrityError, ParseError, RangeError, SchemaError
from mdcycles.ingest import (
    CANONICAL_COLUMNS,
    FdaRecord,
    RecordKind,
    bundled_counts_text,
    count_monthly,
    counts_from_records,
    load_counts_table,
    parse_date,
    parse_fda_file,
    write_counts_csv,
)
from mdcycles.series import YearMonth

HEADER = "KNUMBER|APPLICANT|DATERECEIVED|DECISIONDATE|DECISION\n"
FIXTURE = HEADER + (
    "K800001|ACME|01/15/1980|03/02/1980|SESE\n"
    "K800002|ACME|02/01/1980|03/20/1980|SESE\n"
    "K800003|BETA|02/20/1980||SESE\n"
)


def test_header_only():
    records, diag = parse_fda_file(HEADER, "PMN")
    assert records == []
    assert (diag.kept, diag.rejected) == (0, 0)


def test_three_row_fixture():
    records, diag = parse_fda_file(FIXTURE, RecordKind.PMN)
    assert len(records) == 3 and diag.kept == 3
    assert records[2].decision_date is None
    assert records[0].date_received == dt.date(1980, 1, 15)
    assert diag.date_formats["MM/DD/YYYY"] == 5
    res = count_monthly(records, "received", YearMonth(1980, 1), YearMonth(1980, 3))
    assert list(res.series) == [1, 2, 0]
    res = count_monthly(records, "received", YearMonth(1980, 1), YearMonth(1980, 2))
    assert dict(zip(map(str, res.series.dates()), res.series)) == {"1980-01": 1, "1980-02": 2}


def test_delimiters_and_case():
    text = "pmanumber,datereceived,decisiondate\nP800001,1980-01-15,19800320\n"
    records, diag = parse_fda_file(text, "PMA")
    assert records[0].record_id == "P800001"
    assert records[0].decision_date == dt.date(1980, 3, 20)
    assert set(diag.date_formats) == {"YYYY-MM-DD", "YYYYMMDD"}
    tab = "KNUMBER\tDATERECEIVED\tDECISIONDATE\nK1\t1/5/81\t\n"
    records, _ = parse_fda_file(tab, "PMN")
    assert records[0].date_received == dt.date(1981, 1, 5)


def test_rejects_and_diagnostics():
    text = HEADER + "K1|A|||X\n|A|01/01/1990||X\nK2|A|garbage|01/02/1990|X\nK2|A|01/03/1990||X\nDEN1|A|01/04/1990||X\n"
    records, diag = parse_fda_file(text, "PMN")
    assert diag.rows_read == 5
    assert diag.rejected == 2
    assert diag.kept == 3
    assert diag.unparseable_dates == 1
    assert records[0].date_received is None
    assert diag.duplicate_ids == ["K2"]
    assert diag.de_novo == 1
    assert "rejected=2" in diag.summary()


@pytest.mark.parametrize(
    "text, expected",
    [
        ("12/31/1999", dt.date(1999, 12, 31)),
        ("1999-12-31", dt.date(1999, 12, 31)),
        ("19991231", dt.date(1999, 12, 31)),
        ("12/31/49", dt.date(2049, 12, 31)),
        ("12/31/50", dt.date(1950, 12, 31)),
        ("01/02/2003 00:00:00", dt.date(2003, 1, 2)),
    ],
)
def test_parse_date_formats(text, expected):
    assert parse_date(text)[0] == expected


@pytest.mark.parametrize("text", ["", "13/01/1999", "2/30/2000", "yesterday"])
def test_parse_date_rejects(text):
    assert parse_date(text) is None


def test_schema_errors():
    with pytest.raises(SchemaError):
        parse_fda_file("", "PMN")
    with pytest.raises(SchemaError):
        parse_fda_file("KNUMBER|APPLICANT\nK1|A\n", "PMN")


def test_count_monthly_edges():
    res = count_monthly([], "decision", YearMonth(2000, 1), YearMonth(2000, 12))
    assert len(res.series) == 12 and not res.series.values.any()
    with pytest.raises(RangeError):
        count_monthly([], "received", YearMonth(2000, 2), YearMonth(2000, 1))
    recs = [FdaRecord(f"K{i}", dt.date(2000, m, 1), None, RecordKind.PMN) for i, m in enumerate([1, 1, 2])]
    assert list(count_monthly(recs, "received", YearMonth(2000, 1), YearMonth(2000, 2)).series) == [2, 1]


dates = st.one_of(st.none(), st.dates(dt.date(1975, 1, 1), dt.date(1982, 12, 31)))


@given(st.lists(st.tuples(dates, dates), max_size=60), st.sampled_from(["received", "decision"]))
def test_count_totals(pairs, which):
    recs = [FdaRecord(f"K{i}", a, b, RecordKind.PMN) for i, (a, b) in enumerate(pairs)]
    res = count_monthly(recs, which, YearMonth(1976, 5), YearMonth(1980, 12))
    with_date = sum(r.date(which) is not None for r in recs)
    assert res.series.values.sum() + res.excluded == with_date
    assert res.undated == len(recs) - with_date


def test_fixture_composites_identity():
    pmn, _ = parse_fda_file(FIXTURE, "PMN")
    pma, _ = parse_fda_file("PMANUMBER|DATERECEIVED|DECISIONDATE\nP1|02/11/1980|01/05/1981\n", "PMA")
    table, excluded = counts_from_records(pmn, pma, YearMonth(1980, 1), YearMonth(1980, 6))
    assert excluded["PMAa"] == 1
    assert np.array_equal(table["X510krPMAr"].values, table["X510kr"].values + table["PMAr"].values)
    assert np.array_equal(table["X510kcPMAa"].values, table["X510kc"].values + table["PMAa"].values)
    assert list(table["X510krPMAr"]) == [1, 3, 0, 0, 0, 0]
    assert list(table["X510kcPMAa"]) == [0, 0, 2, 0, 0, 0]


def test_bundled_table(table):
    assert len(table) == 536
    assert table.row(1) == (3, 0, 4, 4, 7, 4)
    assert table.row(2)[0] + table.row(2)[2] == table.row(2)[4] == 128
    assert table.row(536) == (135, 279, 134, 293, 269, 572)
    assert table.start == YearMonth(1976, 5)


def test_load_rownames_and_single_row():
    text = '"",' + ",".join(f'"{c}"' for c in CANONICAL_COLUMNS) + '\n"1",0,0,0,0,0,0\n'
    t = load_counts_table(text)
    assert len(t) == 1 and t.start == YearMonth(1976, 5)
    t = load_counts_table(",".join(CANONICAL_COLUMNS) + "\n0,0,0,0,0,0\n", start=YearMonth(2001, 2))
    assert t.start == YearMonth(2001, 2)


def test_load_errors():
    head = ",".join(CANONICAL_COLUMNS) + "\n"
    with pytest.raises(IntegrityError, match="row 2"):
        load_counts_table(head + "1,1,1,1,2,2\n1,1,1,1,3,2\n")
    with pytest.raises(ParseError, match="row 1, column PMAr"):
        load_counts_table(head + "1,1,1.5,1,2.5,2\n")
    with pytest.raises(ParseError, match="column X510kc"):
        load_counts_table(head + "1,x,1,1,2,2\n")
    with pytest.raises(SchemaError):
        load_counts_table("X510kr,PMAr\n1,2\n")
    with pytest.raises(SchemaError):
        load_counts_table("")


def test_counts_csv_round_trip(table):
    buf = io.StringIO()
    write_counts_csv(table, buf)
    text = buf.getvalue()
    assert text.startswith("date,X510kr,X510kc,PMAr,PMAa,X510krPMAr,X510kcPMAa\n1976-05,3,0,4,4,7,4\n")
    again = io.StringIO()
    write_counts_csv(load_counts_table(text), again)
    assert again.getvalue() == text


def test_bundled_text_is_deterministic():
    assert bundled_counts_text() == bundled_counts_text()
