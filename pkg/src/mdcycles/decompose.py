"""Additive seasonal decomposition of monthly series.

Two trend estimators are provided.

``"refined"`` (default) is the refined moving-average filter:

1. seasonal deviations are taken against the mean of each consecutive
   ``period``-long block counted from the first observation (a trailing
   incomplete block is measured against the mean of all complete blocks),
   averaged per phase and centred;
2. the deseasonalized series is smoothed with a ``2q+1`` moving average
   whose ends are handled by a local-linear fit on the truncated window;
3. ``q`` is the plug-in minimiser of the moving average's leading-order
   mean squared error, with noise variance and curvature taken from a cubic
   pilot fit (:func:`refined_half_width`).

``"classical"`` is the textbook two-pass filter: a centred ``2 x period``
moving average with renormalised truncated windows at the ends, seasonal
indices from the detrended series, then the same moving average applied to
the deseasonalized series.

Seasonal indices are returned in phase order tied to the calendar: for
monthly data ``indices[0]`` is January, whatever month the series starts in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, TextIO

import numpy as np

from .errors import CoverageError, LengthError
from .series import MonthlySeries

Method = Literal["refined", "classical"]
Centering = Literal["indices", "observations"]


def _ma_weights(period: int) -> np.ndarray:
    if period % 2 == 0:
        w = np.ones(period + 1)
        w[0] = w[-1] = 0.5
        return w / period
    return np.ones(period) / period


def centered_ma(x, period: int) -> np.ndarray:
    """Centred moving average of order ``period`` covering the full range.

    Even ``period`` uses the ``2 x period`` weights ``(1/2, 1, ..., 1, 1/2) / period``;
    odd ``period`` the plain ``period``-term mean. Near the ends the window is
    cut to the available positions and the surviving weights rescaled to
    sum to one.
    """
    x = np.asarray(x, dtype=float)
    if period < 2:
        raise ValueError(f"period must be >= 2, got {period}")
    n = x.size
    if n < period + 1:
        raise LengthError(f"centered_ma needs at least {period + 1} values, got {n}")
    w = _ma_weights(period)
    h = w.size // 2
    out = np.empty(n)
    out[h : n - h] = np.convolve(x, w[::-1], mode="valid")
    for i in list(range(min(h, n))) + list(range(max(n - h, h), n)):
        lo, hi = max(0, i - h), min(n, i + h + 1)
        ww = w[lo - (i - h) : w.size - (i + h + 1 - hi)]
        out[i] = ww @ x[lo:hi] / ww.sum()
    return out


def local_linear_ma(x, q: int) -> np.ndarray:
    """Moving average of half-width ``q`` with local-linear end correction.

    Each output is the value at the centre of a least-squares line fitted to
    the window ``[i-q, i+q]`` clipped to the data. Where the window is
    complete this is exactly the ``2q+1``-term mean; at the ends the fitted
    slope removes the bias a truncated mean would carry.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if q < 1:
        raise ValueError(f"half-width must be >= 1, got {q}")
    if n < 2:
        raise LengthError("local_linear_ma needs at least 2 values")
    q = min(q, n - 1)
    out = np.empty(n)
    if n >= 2 * q + 1:
        out[q : n - q] = np.convolve(x, np.full(2 * q + 1, 1.0 / (2 * q + 1)), mode="valid")
        edge = list(range(q)) + list(range(n - q, n))
    else:
        edge = range(n)
    for i in edge:
        lo, hi = max(0, i - q), min(n, i + q + 1)
        t = np.arange(lo - i, hi - i, dtype=float)
        m = t.size
        s1, s2 = t.sum(), t @ t
        # weights of the fitted intercept at t = 0
        w = (s2 - s1 * t) / (m * s2 - s1 * s1)
        out[i] = w @ x[lo:hi]
    return out


def refined_half_width(x, max_q: int | None = None) -> int:
    """Data-driven half-width for :func:`local_linear_ma`.

    A uniform ``2q+1`` window has bias ``m'' q(q+1)/6`` and variance
    ``sigma^2/(2q+1)``; balancing the leading terms gives
    ``q = (9 sigma^2 / (2 mean(m''^2)))^(1/5)``. ``sigma^2`` is the residual
    variance of a cubic least-squares fit and ``m''`` that fit's second
    derivative (in index units). Result is floored and clipped to
    ``[1, max_q]``; ``max_q`` defaults to ``(n-1)//2``. A series with no
    curvature gets ``max_q``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 5:
        raise LengthError(f"need at least 5 values to choose a window, got {n}")
    if max_q is None:
        max_q = (n - 1) // 2
    t = np.arange(1, n + 1, dtype=float)
    fit = np.polynomial.Polynomial.fit(t, x, 3)
    resid = x - fit(t)
    sigma2 = float(resid @ resid) / (n - 4)
    curvature = float(np.mean(fit.deriv(2)(t) ** 2))
    scale = max(float(np.abs(x).max()), 1.0)
    if curvature <= (1e-12 * scale) ** 2:
        return max_q
    q = math.floor((9.0 * sigma2 / (2.0 * curvature)) ** 0.2)
    return int(min(max(q, 1), max_q))


def _phases(n: int, period: int, start_phase: int) -> np.ndarray:
    return (np.arange(n) + start_phase) % period


def seasonal_indices(detrended, period: int, start_phase: int = 0) -> np.ndarray:
    """Mean-centred per-phase averages of ``detrended``.

    ``detrended[k]`` belongs to phase ``(k + start_phase) % period``. NaN
    entries are ignored. The result is indexed by phase and sums to zero.
    """
    d = np.asarray(detrended, dtype=float)
    if not 0 <= start_phase < period:
        raise ValueError(f"start_phase must be in 0..{period - 1}")
    ph = _phases(d.size, period, start_phase)
    w = np.empty(period)
    for k in range(period):
        vals = d[(ph == k) & ~np.isnan(d)]
        if vals.size == 0:
            raise CoverageError(f"phase {k} has no observations")
        w[k] = vals.mean()
    return w - w.mean()


def block_deviations(x, period: int) -> np.ndarray:
    """Deviation of each value from the mean of its ``period``-long block.

    Blocks are counted from the first observation. Values in a trailing
    incomplete block are measured against the mean of all complete blocks.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    full = n // period * period
    if full == 0:
        raise LengthError(f"need at least one complete block of {period} values")
    out = np.empty(n)
    blocks = x[:full].reshape(-1, period)
    out[:full] = (blocks - blocks.mean(axis=1, keepdims=True)).ravel()
    out[full:] = x[full:] - x[:full].mean()
    return out


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Aligned data/trend/seasonal/residual split of one series."""

    source: MonthlySeries
    trend: MonthlySeries
    seasonal: MonthlySeries
    residual: MonthlySeries
    indices: np.ndarray
    period: int
    method: str
    half_width: int | None = None

    def to_csv(self, out: TextIO) -> None:
        """Write ``date,data,trend,seasonal,residual`` with 6 decimals."""
        out.write("date,data,trend,seasonal,residual\n")
        cols = (self.source.values, self.trend.values, self.seasonal.values, self.residual.values)
        for k, ym in enumerate(self.source.dates()):
            out.write(str(ym) + "," + ",".join(_fmt6(c[k]) for c in cols) + "\n")


def _fmt6(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def decompose(
    s: MonthlySeries,
    period: int = 12,
    seasonal: bool = True,
    method: Method = "refined",
    half_width: int | None = None,
    centering: Centering = "indices",
) -> Decomposition:
    """Split ``s`` into trend, seasonal and residual components.

    Parameters
    ----------
    s
        Source series, at least ``2*period + 1`` long.
    period
        Seasonal period in months.
    seasonal
        When False the seasonal component is zero and the trend is the
        chosen filter applied to the raw series.
    method
        ``"refined"`` or ``"classical"`` (see module docstring).
    half_width
        Fixed half-width for the refined filter instead of the data-driven one.
    centering
        ``"indices"`` makes the ``period`` seasonal indices sum to zero.
        ``"observations"`` instead makes the seasonal component average zero
        over the observed months, which differs when the length is not a
        multiple of ``period``. Refined method only.
    """
    n = len(s)
    if n < 2 * period + 1:
        raise LengthError(f"decompose needs at least {2 * period + 1} values, got {n}")
    # work relative to the first value so a constant input stays exactly
    # constant instead of picking up rounding ripples (which read as peaks)
    level = float(s.values[0])
    x = s.values - level
    start_phase = (s.start.month - 1) % period
    ph = _phases(n, period, start_phase)

    if method == "classical":
        q = None
        if seasonal:
            provisional = centered_ma(x, period)
            idx = seasonal_indices(x - provisional, period, start_phase)
            season = idx[ph]
            trend = centered_ma(x - season, period)
        else:
            idx, season = np.zeros(period), np.zeros(n)
            trend = centered_ma(x, period)
    elif method == "refined":
        if seasonal:
            idx = seasonal_indices(block_deviations(x, period), period, start_phase)
            if centering == "observations":
                idx = idx - idx[ph].mean()
            elif centering != "indices":
                raise ValueError(f"unknown centering {centering!r}")
            season = idx[ph]
        else:
            idx, season = np.zeros(period), np.zeros(n)
        adjusted = x - season
        q = refined_half_width(adjusted) if half_width is None else int(half_width)
        trend = local_linear_ma(adjusted, q)
    else:
        raise ValueError(f"unknown method {method!r}")

    residual = x - trend - season
    trend = trend + level
    idx = np.array(idx, dtype=float)
    idx.flags.writeable = False
    return Decomposition(
        source=s,
        trend=s.with_values(trend),
        seasonal=s.with_values(season),
        residual=s.with_values(residual),
        indices=idx,
        period=period,
        method=method,
        half_width=q,
    )
