"""Secular cycle analysis of monthly FDA medical-device application and registration counts."""

from .series import MonthlySeries, YearMonth, composite, date_to_index, index_to_date, period_years
from .ingest import CountsTable, load_bundled, load_counts_table, parse_fda_file, count_monthly
from .decompose import Decomposition, decompose
from .peaks import Peak, PeakOptions, find_peaks, find_trough
from .cycle import CycleReport, Marker, SelectionStrategy, analyze, relative_percent_difference

__version__ = "0.1.0"

__all__ = [
    "CountsTable",
    "CycleReport",
    "Decomposition",
    "Marker",
    "MonthlySeries",
    "Peak",
    "PeakOptions",
    "SelectionStrategy",
    "YearMonth",
    "analyze",
    "composite",
    "count_monthly",
    "date_to_index",
    "decompose",
    "find_peaks",
    "find_trough",
    "index_to_date",
    "load_bundled",
    "load_counts_table",
    "parse_fda_file",
    "period_years",
    "relative_percent_difference",
]
