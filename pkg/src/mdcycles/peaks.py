"""Pattern-based peak finding and trough location.

A peak is a point with at least ``nups`` strictly increasing steps right
before it and at least ``ndowns`` strictly decreasing steps right after it,
the same rule as the ``findpeaks`` function of R's pracma package (pattern
``[+]{nups,}[-]{ndowns,}``). Runs of equal values are first collapsed to a
single point, so a flat-topped hump counts as one peak located at the first
element of its plateau.

All indices in :class:`Peak` are 1-based.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import LengthError, RangeError


@dataclass(frozen=True)
class PeakOptions:
    nups: int = 1
    ndowns: int | None = None  # None: same as nups
    minpeakheight: float = -np.inf
    threshold: float = 0.0
    minpeakdistance: int = 1
    npeaks: int = 0  # 0: unlimited
    sort_desc: bool = False

    def __post_init__(self):
        if self.nups < 1:
            raise ValueError("nups must be >= 1")
        if self.ndowns is not None and self.ndowns < 1:
            raise ValueError("ndowns must be >= 1")
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")
        if self.minpeakdistance < 1:
            raise ValueError("minpeakdistance must be >= 1")
        if self.npeaks < 0:
            raise ValueError("npeaks must be >= 0")

    @property
    def downs(self) -> int:
        return self.nups if self.ndowns is None else self.ndowns

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ndowns"] = self.downs
        if not np.isfinite(d["minpeakheight"]):
            d["minpeakheight"] = None
        return d


@dataclass(frozen=True)
class Peak:
    value: float
    index: int
    start: int
    end: int

    def as_row(self) -> tuple[float, int, int, int]:
        return (self.value, self.index, self.start, self.end)


def find_peaks(x, opts: PeakOptions | None = None) -> list[Peak]:
    """Detect peaks in ``x``.

    Candidates must reach ``minpeakheight`` and rise at least ``threshold``
    above the higher of their two pattern boundaries. ``minpeakdistance``
    is enforced greedily from the highest peak down (earlier wins ties).
    The result is in position order, or by decreasing height when
    ``sort_desc`` is set, and truncated to ``npeaks`` when positive.
    """
    opts = opts or PeakOptions()
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    if n < 3:
        raise LengthError(f"find_peaks needs at least 3 values, got {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("find_peaks input must be finite")

    change = np.flatnonzero(np.diff(x) != 0) + 1
    firsts = np.concatenate(([0], change))
    lasts = np.concatenate((change - 1, [n - 1]))
    c = x[firsts]
    m = c.size
    rising = c[1:] > c[:-1]

    # length of the strictly rising run ending at p / falling run starting at p
    run_up = np.zeros(m, dtype=int)
    for p in range(1, m):
        run_up[p] = run_up[p - 1] + 1 if rising[p - 1] else 0
    run_down = np.zeros(m, dtype=int)
    for p in range(m - 2, -1, -1):
        run_down[p] = run_down[p + 1] + 1 if not rising[p] else 0

    nups, ndowns = opts.nups, opts.downs
    found: list[Peak] = []
    for p in np.flatnonzero((run_up >= nups) & (run_down >= ndowns)):
        idx = firsts[p]
        start = lasts[p - run_up[p]]
        end = firsts[p + run_down[p]]
        v = x[idx]
        if v >= opts.minpeakheight and v - max(x[start], x[end]) >= opts.threshold:
            found.append(Peak(float(v), int(idx) + 1, int(start) + 1, int(end) + 1))

    if opts.minpeakdistance > 1 and len(found) > 1:
        kept: list[Peak] = []
        for pk in sorted(found, key=lambda p: (-p.value, p.index)):
            if all(abs(pk.index - k.index) >= opts.minpeakdistance for k in kept):
                kept.append(pk)
        found = kept

    if opts.sort_desc:
        found.sort(key=lambda p: (-p.value, p.index))
    else:
        found.sort(key=lambda p: p.index)
    if opts.npeaks > 0:
        found = found[: opts.npeaks]
    return found


def find_trough(x, i1: int, i2: int) -> tuple[int, float]:
    """Lowest point strictly between the 1-based indices ``i1`` and ``i2``.

    Ties resolve to the earliest position.
    """
    x = np.asarray(x, dtype=float).ravel()
    if not (1 <= i1 <= x.size and 1 <= i2 <= x.size):
        raise RangeError(f"indices ({i1}, {i2}) out of range for length {x.size}")
    if i2 - i1 < 2:
        raise RangeError(f"no positions strictly between {i1} and {i2}")
    seg = x[i1 : i2 - 1]
    k = int(np.argmin(seg))
    return i1 + 1 + k, float(seg[k])
