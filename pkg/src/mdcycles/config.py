"""INI-style analysis configuration.

A config file has up to three sections, ``[decompose]``, ``[peaks]`` and
``[cycle]``. A section named ``[peaks:LABEL]`` or ``[cycle:LABEL]`` (or
``[decompose:LABEL]``) overrides the plain one for column ``LABEL`` only::

    [decompose]
    period = 12
    seasonal = true
    method = refined

    [peaks:X510kcPMAa]
    minpeakheight = 430

    [cycle:X510kcPMAa]
    mode = window_max
    windows = 1990-01..1995-12, 2015-01..2020-12

Unknown keys are rejected so that typos do not silently fall back to defaults.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .cycle import SelectionStrategy
from .errors import ConfigError, ParseError
from .peaks import PeakOptions
from .series import YearMonth

REPRODUCE_CONFIG = "reproduce_paper.ini"

_DECOMPOSE_KEYS = {"period", "seasonal", "method", "centering", "half_width"}
_PEAK_KEYS = {"nups", "ndowns", "minpeakheight", "threshold", "minpeakdistance", "npeaks", "sort_desc"}
_CYCLE_KEYS = {"mode", "windows", "explicit", "force"}


@dataclass(frozen=True)
class DecomposeSettings:
    period: int = 12
    seasonal: bool = True
    method: str = "refined"
    centering: str = "indices"
    half_width: int | None = None


@dataclass(frozen=True)
class AnalysisConfig:
    """Everything needed to run one column through the pipeline."""

    input: str
    column: str
    decompose: DecomposeSettings = DecomposeSettings()
    peaks: PeakOptions = PeakOptions()
    strategy: SelectionStrategy = SelectionStrategy()
    report: str | None = None
    decomp: str | None = None

    def __post_init__(self):
        if not self.input:
            raise ConfigError("input path is empty")
        if not self.column:
            raise ConfigError("column label is empty")
        for name in ("report", "decomp"):
            v = getattr(self, name)
            if v is not None and not v:
                raise ConfigError(f"{name} path is empty")


def parse_windows(text: str) -> tuple[tuple[YearMonth, YearMonth], ...]:
    """``"1990-01..1995-12, 2015-01..2020-12"`` to a tuple of month pairs."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("..")
        if not sep:
            raise ConfigError(f"window {part!r} is not of the form YYYY-MM..YYYY-MM")
        try:
            out.append((YearMonth.parse(lo), YearMonth.parse(hi)))
        except ParseError as exc:
            raise ConfigError(f"window {part!r}: {exc}") from None
    return tuple(out)


def parse_indices(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.replace(" ", "").split(",") if p)
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _merged(cp: configparser.ConfigParser, section: str, column: str, allowed: set[str]) -> dict[str, str]:
    vals: dict[str, str] = {}
    for name in (section, f"{section}:{column}"):
        if cp.has_section(name):
            unknown = set(cp[name]) - allowed
            if unknown:
                raise ConfigError(f"[{name}]: unknown key(s) {', '.join(sorted(unknown))}")
            vals.update(cp[name])
    return vals


def decompose_settings(vals: dict[str, str], base: DecomposeSettings | None = None) -> DecomposeSettings:
    s = base or DecomposeSettings()
    try:
        if "period" in vals:
            s = replace(s, period=int(vals["period"]))
        if "half_width" in vals:
            s = replace(s, half_width=int(vals["half_width"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if "seasonal" in vals:
        s = replace(s, seasonal=_bool(vals["seasonal"]))
    if "method" in vals:
        if vals["method"] not in ("refined", "classical"):
            raise ConfigError(f"unknown method {vals['method']!r}")
        s = replace(s, method=vals["method"])
    if "centering" in vals:
        if vals["centering"] not in ("indices", "observations"):
            raise ConfigError(f"unknown centering {vals['centering']!r}")
        s = replace(s, centering=vals["centering"])
    return s


def peak_options(vals: dict[str, str], base: PeakOptions | None = None) -> PeakOptions:
    kw = {}
    try:
        for key in ("nups", "ndowns", "minpeakdistance", "npeaks"):
            if key in vals:
                kw[key] = int(vals[key])
        for key in ("minpeakheight", "threshold"):
            if key in vals:
                v = float(vals[key])
                if math.isnan(v):
                    raise ValueError(f"{key} is NaN")
                kw[key] = v
        if "sort_desc" in vals:
            kw["sort_desc"] = _bool(vals["sort_desc"])
        return replace(base or PeakOptions(), **kw)
    except ValueError as exc:
        raise ConfigError(f"peak options: {exc}") from None


def selection_strategy(vals: dict[str, str], base: SelectionStrategy | None = None) -> SelectionStrategy:
    base = base or SelectionStrategy()
    mode = vals.get("mode", base.mode)
    windows = parse_windows(vals["windows"]) if "windows" in vals else base.windows
    explicit = parse_indices(vals["explicit"]) if "explicit" in vals else base.explicit
    force = _bool(vals["force"]) if "force" in vals else base.force
    # fields that do not belong to the final mode are dropped, so a flag can switch modes
    try:
        return SelectionStrategy(
            mode=mode,
            windows=windows if mode == "window_max" else None,
            explicit=explicit if mode == "explicit_indices" else None,
            force=force,
        )
    except ValueError as exc:
        raise ConfigError(f"selection: {exc}") from None


def read_config_text(text: str, source: str = "<config>") -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    for name in cp.sections():
        base = name.split(":", 1)[0]
        if base not in ("decompose", "peaks", "cycle"):
            raise ConfigError(f"{source}: unknown section [{name}]")
    return cp


def load_config_file(path: str | Path | None) -> configparser.ConfigParser:
    """Parse ``path``, or the shipped reproduction config when ``path`` is None."""
    if path is None:
        text = resources.files("mdcycles").joinpath("configs").joinpath(REPRODUCE_CONFIG).read_text(encoding="utf-8")
        return read_config_text(text, REPRODUCE_CONFIG)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return read_config_text(text, str(path))


def column_settings(
    cp: configparser.ConfigParser, column: str
) -> tuple[DecomposeSettings, PeakOptions, SelectionStrategy]:
    """Resolve the plain and per-column sections for ``column``."""
    return (
        decompose_settings(_merged(cp, "decompose", column, _DECOMPOSE_KEYS)),
        peak_options(_merged(cp, "peaks", column, _PEAK_KEYS)),
        selection_strategy(_merged(cp, "cycle", column, _CYCLE_KEYS)),
    )


def configured_columns(cp: configparser.ConfigParser) -> list[str]:
    """Columns that have at least one per-column section, in file order."""
    seen: list[str] = []
    for name in cp.sections():
        if ":" in name:
            col = name.split(":", 1)[1]
            if col not in seen:
                seen.append(col)
    return seen
