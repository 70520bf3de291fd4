"""Deterministic SVG line charts of trend series with date/amplitude rules.

Each marker becomes a vertical rule at its month and a horizontal rule at
its amplitude, drawn in the color of the series it belongs to. Output is a
pure function of the :class:`FigureSpec`: coordinates are printed with two
decimals and element order follows the input order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape, quoteattr

from .cycle import Marker
from .series import MonthlySeries, YearMonth

PALETTE = ("red", "blue", "green", "purple", "orange")

_MARGIN_LEFT = 64
_MARGIN_RIGHT = 20
_MARGIN_TOP = 20
_MARGIN_BOTTOM = 48


@dataclass(frozen=True)
class Trace:
    series: MonthlySeries
    color: str
    markers: tuple[Marker, ...] = ()


@dataclass(frozen=True)
class FigureSpec:
    """What to draw and where.

    ``x_range`` is an inclusive month range and ``y_range`` a value range;
    both default to the data extent (y padded to round tick values).
    """

    traces: tuple[Trace, ...]
    width: int = 800
    height: int = 450
    x_range: tuple[YearMonth, YearMonth] | None = None
    y_range: tuple[float, float] | None = None
    title: str = ""
    x_label: str = "Year"
    y_label: str = "Trend (monthly count)"
    _resolved: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= len(self.traces) <= len(PALETTE):
            raise ValueError(f"need 1..{len(PALETTE)} traces, got {len(self.traces)}")
        if self.width <= _MARGIN_LEFT + _MARGIN_RIGHT or self.height <= _MARGIN_TOP + _MARGIN_BOTTOM:
            raise ValueError(f"canvas {self.width}x{self.height} is too small")
        xr = self.x_range or (
            min(t.series.start for t in self.traces),
            max(t.series.end for t in self.traces),
        )
        if not xr[0] < xr[1]:
            raise ValueError(f"empty x range {xr[0]}..{xr[1]}")
        if self.y_range is None:
            lo = min(float(t.series.values.min()) for t in self.traces)
            hi = max(float(t.series.values.max()) for t in self.traces)
            yr = _nice_range(lo, hi)
        else:
            yr = (float(self.y_range[0]), float(self.y_range[1]))
        if not yr[0] < yr[1]:
            raise ValueError(f"empty y range {yr[0]}..{yr[1]}")
        for t in self.traces:
            for m in t.markers:
                if not (xr[0] <= m.date <= xr[1] and yr[0] <= m.amplitude <= yr[1]):
                    raise ValueError(f"marker {m.date} [{m.amplitude:.4f}] lies outside the axis ranges")
        self._resolved.update(x=xr, y=yr)

    @property
    def x_bounds(self) -> tuple[YearMonth, YearMonth]:
        return self._resolved["x"]

    @property
    def y_bounds(self) -> tuple[float, float]:
        return self._resolved["y"]


def _nice_step(span: float, target: int = 6) -> float:
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    for mult in (1, 2, 2.5, 5, 10):
        if raw <= mult * mag:
            return mult * mag
    return 10 * mag


def _nice_range(lo: float, hi: float) -> tuple[float, float]:
    if hi == lo:
        lo, hi = lo - 1, hi + 1
    step = _nice_step(hi - lo)
    return math.floor(lo / step) * step, math.ceil(hi / step) * step


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _num_label(v: float) -> str:
    return f"{v:g}"


def render_svg(spec: FigureSpec) -> str:
    """SVG document text for ``spec``."""
    w, h = spec.width, spec.height
    x0, x1 = spec.x_bounds
    y0, y1 = spec.y_bounds
    left, right = _MARGIN_LEFT, w - _MARGIN_RIGHT
    top, bottom = _MARGIN_TOP, h - _MARGIN_BOTTOM
    span_x = x1 - x0

    def px(ym: YearMonth) -> float:
        return left + (ym - x0) / span_x * (right - left)

    def py(v: float) -> float:
        return bottom - (v - y0) / (y1 - y0) * (bottom - top)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" '
        'font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
    ]
    if spec.title:
        out.append(f'<text x="{_f(w / 2)}" y="14" text-anchor="middle">{escape(spec.title)}</text>')

    out.append('<g class="axes" stroke="black" stroke-width="1">')
    out.append(f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/>')
    out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}"/>')
    out.append("</g>")

    labels = ['<g class="ticks" stroke="black">']
    texts = ['<g class="tick-labels" fill="black">']
    first_year = x0.year if x0.month == 1 else x0.year + 1
    for year in range(first_year, x1.year + 1):
        x = px(YearMonth(year, 1))
        major = year % 5 == 0
        labels.append(f'<line x1="{_f(x)}" y1="{bottom}" x2="{_f(x)}" y2="{bottom + (6 if major else 3)}"/>')
        if major:
            texts.append(f'<text x="{_f(x)}" y="{bottom + 18}" text-anchor="middle">{year}</text>')
    step = _nice_step(y1 - y0)
    k = math.ceil(y0 / step - 1e-9)
    while k * step <= y1 + 1e-9 * step:
        v = k * step
        y = py(v)
        labels.append(f'<line x1="{left - 5}" y1="{_f(y)}" x2="{left}" y2="{_f(y)}"/>')
        texts.append(f'<text x="{left - 8}" y="{_f(y + 4)}" text-anchor="end">{_num_label(v)}</text>')
        k += 1
    out += labels + ["</g>"] + texts + ["</g>"]
    out.append(f'<text x="{_f((left + right) / 2)}" y="{h - 8}" text-anchor="middle">{escape(spec.x_label)}</text>')
    out.append(
        f'<text x="14" y="{_f((top + bottom) / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 14 {_f((top + bottom) / 2)})">{escape(spec.y_label)}</text>'
    )

    for t in spec.traces:
        s = t.series
        pts = " ".join(f"{_f(px(d))},{_f(py(v))}" for d, v in zip(s.dates(), s.values) if x0 <= d <= x1)
        out.append(
            f'<polyline class="trend" data-label={quoteattr(s.label)} fill="none" '
            f'stroke="{t.color}" stroke-width="1.5" points="{pts}"/>'
        )
    for t in spec.traces:
        for m in t.markers:
            x, y = px(m.date), py(m.amplitude)
            out.append(
                f'<line class="rule-v" data-date="{m.date}" x1="{_f(x)}" y1="{top}" x2="{_f(x)}" y2="{bottom}" '
                f'stroke="{t.color}" stroke-width="0.75" stroke-dasharray="4 3"/>'
            )
            out.append(
                f'<line class="rule-h" data-amplitude="{m.amplitude:.4f}" x1="{left}" y1="{_f(y)}" x2="{right}" '
                f'y2="{_f(y)}" stroke="{t.color}" stroke-width="0.75" stroke-dasharray="4 3"/>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
