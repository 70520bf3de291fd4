import json
import re

import pytest

from mdcycles.cli import main
from mdcycles.ingest import bundled_counts_text, load_counts_table

PMN = (
    "KNUMBER|APPLICANT|DATERECEIVED|DECISIONDATE\n"
    "K800001|A|01/15/1980|03/02/1980\n"
    "K800002|A|02/01/1980|03/20/1980\n"
    "K800003|B|02/20/1980|\n"
)
PMA = "PMANUMBER|DATERECEIVED|DECISIONDATE\nP800001|02/11/1980|04/05/1980\n"

SUMMARY = re.compile(
    r"^(?P<label>\w+): P1=(?P<p1>\d{4}-\d\d)\[(?P<a1>[\d.]+)\] T=(?P<t>\d{4}-\d\d)\[(?P<at>[\d.]+)\] "
    r"P2=(?P<p2>\d{4}-\d\d)\[(?P<a2>[\d.]+)\] period=(?P<period>[\d.]+)y rpd=(?P<rpd>[\d.]+)%$"
)


@pytest.fixture
def raw_files(tmp_path):
    pmn, pma = tmp_path / "pmn.txt", tmp_path / "pma.txt"
    pmn.write_text(PMN)
    pma.write_text(PMA)
    return str(pmn), str(pma)


def test_ingest_fixture(tmp_path, raw_files, capsys):
    out = tmp_path / "counts.csv"
    code = main(["ingest", "--pmn", raw_files[0], "--pma", raw_files[1], "--date-field", "both",
                 "--start", "1980-01", "--end", "1980-06", "--out", str(out)])
    assert code == 0
    table = load_counts_table(out.read_text())
    assert list(table["X510krPMAr"]) == [1, 3, 0, 0, 0, 0]
    assert list(table["X510kcPMAa"]) == [0, 0, 2, 1, 0, 0]
    assert "kept=3" in capsys.readouterr().err


def test_ingest_single_field(tmp_path, raw_files):
    out = tmp_path / "apps.csv"
    assert main(["ingest", "--pmn", raw_files[0], "--pma", raw_files[1], "--date-field", "received",
                 "--start", "1980-01", "--end", "1980-03", "--out", str(out)]) == 0
    assert out.read_text() == "date,X510kr,PMAr,X510krPMAr\n1980-01,1,0,1\n1980-02,2,1,3\n1980-03,0,0,0\n"


def test_ingest_usage_errors(raw_files, capsys):
    assert main(["ingest", "--start", "1980-01", "--end", "1980-02", "--out", "x.csv"]) == 2
    assert main(["ingest", "--pmn", raw_files[0], "--start", "1980-01"]) == 2
    assert main(["ingest", "--pmn", raw_files[0], "--date-field", "approved", "--start", "1980-01", "--end", "1980-02"]) == 2
    assert main(["ingest", "--pmn", raw_files[0], "--start", "1980-13", "--end", "1980-02"]) == 2
    assert main(["ingest", "--pmn", "/nonexistent/file.txt", "--start", "1980-01", "--end", "1980-02"]) == 2


def test_ingest_schema_error(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("KNUMBER|APPLICANT\nK1|A\n")
    assert main(["ingest", "--pmn", str(bad), "--start", "1980-01", "--end", "1980-02"]) == 1


def test_from_counts_is_byte_stable(tmp_path):
    src = tmp_path / "bundled.csv"
    src.write_text(bundled_counts_text())
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["ingest", "--from-counts", str(src), "--out", str(a)]) == 0
    assert main(["ingest", "--from-counts", str(a), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[536] == "2020-12,135,279,134,293,269,572"


def _summary(capsys):
    line = capsys.readouterr().out.strip().splitlines()[-1]
    m = SUMMARY.match(line)
    assert m, line
    return m


@pytest.mark.parametrize(
    "column, period, rpd",
    [("X510krPMAr", 20.5, 24), ("X510kcPMAa", 26.5, 28)],
)
def test_analyze_bundled(tmp_path, capsys, column, period, rpd):
    report, decomp = tmp_path / "r.json", tmp_path / "d.csv"
    assert main(["analyze", "--column", column, "--report", str(report), "--decomp", str(decomp)]) == 0
    m = _summary(capsys)
    assert float(m["period"]) == pytest.approx(period, abs=0.25)
    assert float(m["rpd"]) == pytest.approx(rpd, abs=1.5)
    d = json.loads(report.read_text())
    assert m["label"] == d["label"] == column
    assert (m["p1"], m["t"], m["p2"]) == (d["peak1"]["date"], d["trough"]["date"], d["peak2"]["date"])
    assert [float(m[k]) for k in ("a1", "at", "a2", "period", "rpd")] == [
        d["peak1"]["amplitude"], d["trough"]["amplitude"], d["peak2"]["amplitude"], d["period_years"], d["rpd_percent"]
    ]
    lines = decomp.read_text().splitlines()
    assert lines[0] == "date,data,trend,seasonal,residual" and len(lines) == 537


def test_analyze_input_file(tmp_path, capsys):
    src = tmp_path / "counts.csv"
    src.write_text(bundled_counts_text())
    assert main(["analyze", "--input", str(src), "--column", "X510kcPMAa"]) == 0
    assert _summary(capsys)["p2"] == "2019-03"


def test_analyze_flag_overrides(capsys):
    code = main(["analyze", "--column", "X510krPMAr", "--window", "1990-01..1995-12",
                 "--window", "2008-01..2016-06", "--mode", "window_max"])
    assert code == 0
    assert _summary(capsys)["p2"] == "2015-09"
    # the registrations config does not force explicit picks
    assert main(["analyze", "--column", "X510kcPMAa", "--explicit", "197,438"]) == 1
    err = capsys.readouterr().err
    assert "not a detected peak" in err and "index=515" in err


def test_analyze_constant_column(tmp_path, capsys):
    src = tmp_path / "flat.csv"
    src.write_text("date,flat\n" + "".join(f"{2000 + k // 12}-{k % 12 + 1:02d},5\n" for k in range(48)))
    assert main(["analyze", "--input", str(src), "--column", "flat"]) == 1
    err = capsys.readouterr().err
    assert "0 peak(s) detected" in err and "(none)" in err


def test_analyze_usage_errors(tmp_path, capsys):
    assert main(["analyze", "--column", "nope"]) == 2
    assert main(["analyze"]) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[peaks]\nthreshold = lots\n")
    assert main(["analyze", "--column", "PMAr", "--config", str(bad)]) == 2
    assert main(["analyze", "--column", "PMAr", "--window", "1990-01"]) == 2


def test_plot(tmp_path, capsys):
    paths = {}
    for col in ("X510krPMAr", "X510kcPMAa"):
        r, d = tmp_path / f"{col}.json", tmp_path / f"{col}.csv"
        assert main(["analyze", "--column", col, "--report", str(r), "--decomp", str(d)]) == 0
        paths[col] = (str(r), str(d))
    out1, out2, out3 = tmp_path / "f1.svg", tmp_path / "f2.svg", tmp_path / "single.svg"
    args = ["plot", "--decomp", f"{paths['X510krPMAr'][1]},{paths['X510kcPMAa'][1]}",
            "--report", f"{paths['X510krPMAr'][0]},{paths['X510kcPMAa'][0]}"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    svg = out1.read_text()
    assert out1.read_bytes() == out2.read_bytes()
    assert svg.count("<polyline") == 2
    assert svg.count('class="rule-v"') == 6 and svg.count('class="rule-h"') == 6
    assert 'data-label="X510krPMAr" fill="none" stroke="red"' in svg
    assert 'data-label="X510kcPMAa" fill="none" stroke="blue"' in svg
    assert main(["plot", "--decomp", paths["X510krPMAr"][1], "--out", str(out3)]) == 0
    single = out3.read_text()
    assert single.count("<polyline") == 1 and "rule-" not in single


def test_plot_errors(tmp_path):
    assert main(["plot", "--decomp", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "x.svg")]) == 2
    assert main(["plot", "--out", str(tmp_path / "x.svg")]) == 2
    d = tmp_path / "d.csv"
    d.write_text("date,data,trend,seasonal,residual\n2000-01,1,1,0,0\n2000-02,1,1,0,0\n")
    assert main(["plot", "--decomp", str(d), "--report", f"{d},{d}", "--out", str(tmp_path / "x.svg")]) == 2


def test_reproduce_paper(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["reproduce-paper", "--out-dir", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [SUMMARY.match(x)["label"] for x in lines] == ["X510krPMAr", "X510kcPMAa"]
    names = sorted(p.name for p in out.iterdir())
    assert names == [
        "cycles.svg",
        "decomposition_X510kcPMAa.csv", "decomposition_X510krPMAr.csv",
        "findpeaks_X510kcPMAa.csv", "findpeaks_X510krPMAr.csv",
        "report_X510kcPMAa.json", "report_X510krPMAr.json",
    ]
    assert len((out / "findpeaks_X510kcPMAa.csv").read_text().splitlines()) == 18
    assert (out / "findpeaks_X510krPMAr.csv").read_text().splitlines()[1].startswith("1992-04,443.6")


def test_version(capsys):
    assert main(["--version"]) == 0
    assert "mdcycles" in capsys.readouterr().out
