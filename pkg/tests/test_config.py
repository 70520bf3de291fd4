import pytest

from mdcycles.config import (
    AnalysisConfig,
    column_settings,
    configured_columns,
    load_config_file,
    parse_windows,
    read_config_text,
    selection_strategy,
)
from mdcycles.errors import ConfigError
from mdcycles.series import YearMonth


def test_shipped_config():
    cp = load_config_file(None)
    assert configured_columns(cp) == ["X510krPMAr", "X510kcPMAa"]
    d, p, s = column_settings(cp, "X510krPMAr")
    assert d.period == 12 and d.seasonal and d.method == "refined"
    assert p.threshold == 2 and p.npeaks == 0
    assert s.mode == "explicit_indices" and s.explicit == (192, 438) and s.force
    d, p, s = column_settings(cp, "X510kcPMAa")
    assert (p.minpeakheight, p.threshold, p.npeaks) == (430, 0, 200)
    assert s.windows == ((YearMonth(1990, 1), YearMonth(1995, 12)), (YearMonth(2015, 1), YearMonth(2020, 12)))
    _, p, s = column_settings(cp, "PMAr")
    assert p.threshold == 0 and s.mode == "auto_first_two"


def test_per_column_override_wins():
    cp = read_config_text("[peaks]\nthreshold = 1\nnpeaks = 3\n[peaks:A]\nthreshold = 4\n")
    assert column_settings(cp, "A")[1].threshold == 4
    assert column_settings(cp, "A")[1].npeaks == 3
    assert column_settings(cp, "B")[1].threshold == 1


@pytest.mark.parametrize(
    "text",
    [
        "[peaks]\nthreshhold = 1\n",
        "[plot]\nwidth = 3\n",
        "[peaks]\nthreshold = -1\n",
        "[peaks]\nnpeaks = many\n",
        "[decompose]\nmethod = loess\n",
        "[decompose]\nseasonal = maybe\n",
        "[cycle]\nmode = window_max\n",
        "[cycle]\nmode = window_max\nwindows = 1990-01..1995-12, 2015-13..2020-12\n",
        "no section header\n",
    ],
)
def test_bad_configs(text):
    with pytest.raises(ConfigError):
        column_settings(read_config_text(text), "A")


def test_parse_windows():
    assert parse_windows("2000-01..2000-12") == ((YearMonth(2000, 1), YearMonth(2000, 12)),)
    with pytest.raises(ConfigError):
        parse_windows("2000-01-2000-12")


def test_mode_switch_drops_foreign_fields():
    base = selection_strategy({"mode": "explicit_indices", "explicit": "1,5"})
    s = selection_strategy({"mode": "auto_first_two"}, base)
    assert s.explicit is None


def test_analysis_config_paths():
    with pytest.raises(ConfigError):
        AnalysisConfig(input="", column="X")
    with pytest.raises(ConfigError):
        AnalysisConfig(input="a.csv", column="")
    with pytest.raises(ConfigError):
        AnalysisConfig(input="a.csv", column="X", report="")
    with pytest.raises(ConfigError):
        load_config_file("/nonexistent/x.ini")
