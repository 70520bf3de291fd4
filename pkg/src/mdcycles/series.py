"""Year-month calendar coordinates and monthly series.

Indices exposed by this module are 1-based, matching how reports and logs
number months (index 1 is the first observation).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import AlignmentError, OrderingError, ParseError, RangeError

MONTHS_PER_YEAR = 12

_YM_RE = re.compile(r"^\s*(\d{4})-(\d{1,2})\s*$")


@dataclass(frozen=True, order=True)
class YearMonth:
    """A calendar month. Ordering is chronological."""

    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValueError(f"month must be in 1..12, got {self.month}")

    @classmethod
    def parse(cls, text: str) -> "YearMonth":
        """Parse ``YYYY-MM``."""
        m = _YM_RE.match(text)
        if not m:
            raise ParseError(f"expected YYYY-MM, got {text!r}")
        try:
            return cls(int(m.group(1)), int(m.group(2)))
        except ValueError as exc:
            raise ParseError(f"invalid month in {text!r}") from exc

    @classmethod
    def from_ordinal(cls, ordinal: int) -> "YearMonth":
        year, month0 = divmod(ordinal, MONTHS_PER_YEAR)
        return cls(year, month0 + 1)

    @property
    def ordinal(self) -> int:
        """Months since year 0, January (monotone in time)."""
        return self.year * MONTHS_PER_YEAR + self.month - 1

    def shift(self, months: int) -> "YearMonth":
        return YearMonth.from_ordinal(self.ordinal + int(months))

    def __add__(self, months: int) -> "YearMonth":
        if not isinstance(months, (int, np.integer)):
            return NotImplemented
        return self.shift(months)

    def __sub__(self, other):
        if isinstance(other, YearMonth):
            return self.ordinal - other.ordinal
        if isinstance(other, (int, np.integer)):
            return self.shift(-other)
        return NotImplemented

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


class MonthlySeries:
    """Immutable monthly-frequency series anchored at ``start``.

    Values are stored as a read-only float64 array; counts and trend values
    share the same type.
    """

    __slots__ = ("label", "start", "_values")

    def __init__(self, label: str, start: YearMonth, values: Sequence[float]):
        arr = np.array(values, dtype=float).ravel()
        if arr.size < 1:
            raise ValueError("a MonthlySeries needs at least one value")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0]) + 1
            raise ValueError(f"non-finite value at index {bad} of series {label!r}")
        arr.flags.writeable = False
        object.__setattr__(self, "label", str(label))
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "_values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("MonthlySeries is immutable")

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def end(self) -> YearMonth:
        return self.start + (len(self) - 1)

    def __len__(self) -> int:
        return self._values.size

    def __iter__(self) -> Iterator[float]:
        return iter(self._values.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonthlySeries):
            return NotImplemented
        return (
            self.label == other.label
            and self.start == other.start
            and np.array_equal(self._values, other._values)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"MonthlySeries({self.label!r}, start={self.start}, n={len(self)})"

    def at(self, i: int) -> float:
        """Value at 1-based index ``i``."""
        _check_index(self, i)
        return float(self._values[i - 1])

    def dates(self) -> list[YearMonth]:
        return [self.start + k for k in range(len(self))]

    def with_values(self, values: Sequence[float], label: str | None = None) -> "MonthlySeries":
        """New series on the same calendar axis."""
        return MonthlySeries(self.label if label is None else label, self.start, values)


def _check_index(s: MonthlySeries, i: int) -> None:
    if not 1 <= i <= len(s):
        raise RangeError(f"index {i} out of range for series {s.label!r} of length {len(s)}")


def index_to_date(s: MonthlySeries, i: int) -> YearMonth:
    """Calendar month of the 1-based observation ``i``."""
    _check_index(s, i)
    return s.start + (i - 1)


def date_to_index(s: MonthlySeries, d: YearMonth) -> int:
    """1-based index of month ``d`` in ``s``."""
    i = (d - s.start) + 1
    if not 1 <= i <= len(s):
        raise RangeError(f"{d} lies outside {s.label!r} ({s.start}..{s.end})")
    return i


def composite(a: MonthlySeries, b: MonthlySeries, label: str | None = None) -> MonthlySeries:
    """Element-wise sum of two aligned series.

    The default label concatenates the inputs' labels, so ``X510kr`` and
    ``PMAr`` give ``X510krPMAr``.
    """
    if a.start != b.start or len(a) != len(b):
        raise AlignmentError(
            f"cannot combine {a.label!r} ({a.start}, n={len(a)}) "
            f"with {b.label!r} ({b.start}, n={len(b)})"
        )
    return MonthlySeries(a.label + b.label if label is None else label, a.start, a.values + b.values)


def period_years(i1: int, i2: int) -> float:
    """Elapsed years between two monthly indices."""
    if i2 < i1:
        raise OrderingError(f"period end {i2} precedes start {i1}")
    return (i2 - i1) / MONTHS_PER_YEAR
