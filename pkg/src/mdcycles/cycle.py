"""Peak-to-peak cycle statistics from a trend series.

:func:`analyze` picks two peaks from the detected candidates according to
a :class:`SelectionStrategy`, locates the trough between them and reports
the period, the peak-to-trough relative percent difference and the recent
trend direction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import DomainError, InsufficiencyError, LengthError, SelectionError
from .peaks import Peak, PeakOptions, find_peaks, find_trough
from .series import MonthlySeries, YearMonth, index_to_date, period_years

Mode = Literal["auto_first_two", "explicit_indices", "window_max"]

DIRECTION_SPAN = 24
FLAT_TOLERANCE = 1.0
TROUGH_NOTE = "trough amplitude read from the trend series, not the raw counts"


class ReportInvariantError(AssertionError):
    """A CycleReport was built with inconsistent fields (a programming error)."""


@dataclass(frozen=True)
class Marker:
    date: YearMonth
    index: int
    amplitude: float

    @classmethod
    def on(cls, trend: MonthlySeries, index: int) -> "Marker":
        return cls(index_to_date(trend, index), index, trend.at(index))

    def to_dict(self) -> dict:
        return {"date": str(self.date), "index": self.index, "amplitude": _r4(self.amplitude)}


@dataclass(frozen=True)
class SelectionStrategy:
    """How to choose the two cycle peaks among the detected candidates.

    ``window_max`` takes the highest candidate inside each of two inclusive
    month windows; ``explicit_indices`` takes two given 1-based indices,
    which must be detected peaks unless ``force`` is set.
    """

    mode: Mode = "auto_first_two"
    windows: tuple[tuple[YearMonth, YearMonth], tuple[YearMonth, YearMonth]] | None = None
    explicit: tuple[int, int] | None = None
    force: bool = False

    def __post_init__(self):
        if self.mode not in ("auto_first_two", "explicit_indices", "window_max"):
            raise ValueError(f"unknown selection mode {self.mode!r}")
        if self.mode == "window_max":
            if self.windows is None or len(self.windows) != 2:
                raise ValueError("window_max needs exactly two windows")
            for lo, hi in self.windows:
                if hi < lo:
                    raise ValueError(f"window {lo}..{hi} is empty")
        elif self.windows is not None:
            raise ValueError(f"windows are only valid for window_max, not {self.mode}")
        if self.mode == "explicit_indices":
            if self.explicit is None or len(self.explicit) != 2:
                raise ValueError("explicit_indices needs two indices")
        elif self.explicit is not None:
            raise ValueError(f"explicit indices are only valid for explicit_indices, not {self.mode}")

    def to_dict(self) -> dict:
        d: dict = {"mode": self.mode}
        if self.windows is not None:
            d["windows"] = [[str(lo), str(hi)] for lo, hi in self.windows]
        if self.explicit is not None:
            d["explicit"] = list(self.explicit)
        if self.force:
            d["force"] = True
        return d


@dataclass(frozen=True)
class CycleReport:
    label: str
    peak1: Marker
    peak2: Marker
    trough: Marker
    period_years: float
    rpd_percent: float
    trend_direction_last_24m: Literal["rising", "falling", "flat"]
    selection: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.peak1.index < self.trough.index < self.peak2.index:
            raise ReportInvariantError(
                f"marker order violated: {self.peak1.index}, {self.trough.index}, {self.peak2.index}"
            )
        if self.period_years != period_years(self.peak1.index, self.peak2.index):
            raise ReportInvariantError("period_years disagrees with peak indices")
        top = max(self.peak1.amplitude, self.peak2.amplitude)
        if not np.isclose(self.rpd_percent, relative_percent_difference(top, self.trough.amplitude)):
            raise ReportInvariantError("rpd_percent disagrees with marker amplitudes")

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "peak1": self.peak1.to_dict(),
            "peak2": self.peak2.to_dict(),
            "trough": self.trough.to_dict(),
            "period_years": _r4(self.period_years),
            "rpd_percent": _r4(self.rpd_percent),
            "trend_direction_last_24m": self.trend_direction_last_24m,
            "selection": self.selection,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def summary(self) -> str:
        d = self.to_dict()

        def mk(m):
            return f"{m['date']}[{m['amplitude']}]"

        return (
            f"{self.label}: P1={mk(d['peak1'])} T={mk(d['trough'])} P2={mk(d['peak2'])} "
            f"period={d['period_years']}y rpd={d['rpd_percent']}%"
        )


def _r4(v: float) -> float:
    r = round(float(v), 4)
    return 0.0 if r == 0 else r


def relative_percent_difference(peak_amp: float, trough_amp: float) -> float:
    """Drop from peak to trough as a percentage of the peak."""
    if not peak_amp > 0:
        raise DomainError(f"peak amplitude must be positive, got {peak_amp}")
    return 100.0 * (peak_amp - trough_amp) / peak_amp


def trend_direction(values, span: int = DIRECTION_SPAN, flat: float = FLAT_TOLERANCE) -> str:
    values = np.asarray(values, dtype=float)
    if values.size <= span:
        raise LengthError(f"need more than {span} values for a direction")
    delta = values[-1] - values[-1 - span]
    if abs(delta) < flat:
        return "flat"
    return "rising" if delta > 0 else "falling"


def _candidates_text(peaks: list[Peak], trend: MonthlySeries) -> list[dict]:
    return [
        {"date": str(index_to_date(trend, p.index)), "index": p.index, "value": _r4(p.value)}
        for p in peaks
    ]


def _select(trend: MonthlySeries, peaks: list[Peak], strategy: SelectionStrategy, warnings: list[str]):
    if strategy.mode == "auto_first_two":
        if len(peaks) < 2:
            raise InsufficiencyError(
                f"{trend.label}: {len(peaks)} peak(s) detected, need 2", _candidates_text(peaks, trend)
            )
        return peaks[0].index, peaks[1].index

    if strategy.mode == "window_max":
        chosen = []
        for lo, hi in strategy.windows:
            inside = [p for p in peaks if lo <= index_to_date(trend, p.index) <= hi]
            if not inside:
                raise SelectionError(
                    f"{trend.label}: no detected peak in window {lo}..{hi}", _candidates_text(peaks, trend)
                )
            best = max(inside, key=lambda p: (p.value, -p.index))
            chosen.append(best.index)
        return tuple(chosen)

    i1, i2 = strategy.explicit
    detected = {p.index for p in peaks}
    for i in (i1, i2):
        index_to_date(trend, i)  # range check
        if i not in detected:
            msg = f"index {i} ({index_to_date(trend, i)}) is not a detected peak"
            if not strategy.force:
                raise SelectionError(f"{trend.label}: {msg}", _candidates_text(peaks, trend))
            warnings.append(msg + "; used because force is set")
    return i1, i2


def analyze(
    trend: MonthlySeries,
    opts: PeakOptions | None = None,
    strategy: SelectionStrategy | None = None,
) -> CycleReport:
    """Cycle report for one trend series.

    Raises :class:`InsufficiencyError` when fewer than two peaks are found
    and :class:`SelectionError` when the strategy cannot be satisfied; both
    carry the detected candidates.
    """
    opts = opts or PeakOptions()
    strategy = strategy or SelectionStrategy()
    if len(trend) < 25:
        raise LengthError(f"trend needs at least 25 months, got {len(trend)}")
    peaks = sorted(find_peaks(trend.values, opts), key=lambda p: p.index)
    if len(peaks) < 2:
        raise InsufficiencyError(
            f"{trend.label}: {len(peaks)} peak(s) detected, need 2", _candidates_text(peaks, trend)
        )
    warnings: list[str] = []
    i1, i2 = _select(trend, peaks, strategy, warnings)
    if i1 == i2:
        raise SelectionError(f"{trend.label}: both selections resolve to index {i1}", _candidates_text(peaks, trend))
    i1, i2 = sorted((i1, i2))
    ti, _ = find_trough(trend.values, i1, i2)

    p1, p2, tr = Marker.on(trend, i1), Marker.on(trend, i2), Marker.on(trend, ti)
    notes = [TROUGH_NOTE]
    if strategy.mode != "auto_first_two":
        first_two = [index_to_date(trend, p.index) for p in peaks[:2]]
        notes.append("first two detected peaks: " + ", ".join(str(d) for d in first_two))
    selection = {
        "options": opts.to_dict(),
        "strategy": strategy.to_dict(),
        "candidates": _candidates_text(peaks, trend),
        "warnings": warnings,
        "notes": notes,
    }
    return CycleReport(
        label=trend.label,
        peak1=p1,
        peak2=p2,
        trough=tr,
        period_years=period_years(i1, i2),
        rpd_percent=relative_percent_difference(max(p1.amplitude, p2.amplitude), tr.amplitude),
        trend_direction_last_24m=trend_direction(trend.values),
        selection=selection,
    )


def window(lo: str, hi: str) -> tuple[YearMonth, YearMonth]:
    """Shorthand for a ``(YearMonth, YearMonth)`` window from two ``YYYY-MM`` strings."""
    return YearMonth.parse(lo), YearMonth.parse(hi)


__all__ = [
    "CycleReport",
    "Marker",
    "SelectionStrategy",
    "analyze",
    "relative_percent_difference",
    "trend_direction",
    "window",
]
