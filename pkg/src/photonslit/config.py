"""Experiment configuration files.

The format is one ``key = value`` pair per line with ``#`` comments.  Keys
carry their unit as a suffix (``_mm``, ``_nm``, ``_s``, ``_ns``, ``_deg``,
``_rad``, ``_per_s``); a value may repeat the unit (``0.13 mm``) but may not
use a different one.  Omitted keys take the defaults listed by
:func:`defaults_text`, which describe the tabletop double-slit apparatus.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from typing import Optional

from .errors import ValidationError
from .pattern import EraserSetup, PatternParams, SourceModel
from .simulate import ScanConfig

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "defaults_text", "MODES"]

MODES = ("double", "single", "eraser", "g2", "pattern-only")

_UNITS = {"mm": 1e-3, "nm": 1e-9, "s": 1.0, "ns": 1e-9, "deg": math.pi / 180.0,
          "rad": 1.0, "per_s": 1.0}
_SUFFIXES = sorted(_UNITS, key=len, reverse=True)


class ConfigError(ValidationError):
    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.key = key
        self.line = line


@dataclass(frozen=True)
class _Key:
    section: str
    field: str
    default: object
    kind: str = "float"     # float | int | str | optional
    check: Optional[str] = None   # positive | nonneg | unit | open_unit
    comment: str = ""


_KEYS = {
    "mode": _Key("top", "mode", "double", "str", comment="double | single | eraser | g2 | pattern-only"),
    "wavelength_nm": _Key("pattern", "wavelength", 810.0, check="positive"),
    "slit_separation_mm": _Key("pattern", "slit_separation", 0.62, check="positive"),
    "slit_width_mm": _Key("pattern", "slit_width", 0.13, check="positive"),
    "screen_distance_mm": _Key("pattern", "screen_distance", 1520.0, check="positive",
                               comment="lens focal length in the Fourier configuration"),
    "peak_rate_per_s": _Key("pattern", "peak_rate", 7.0, check="nonneg"),
    "visibility": _Key("pattern", "visibility", 0.77, check="unit",
                       comment="Gaussian-source prediction for this apparatus"),
    "phase_rad": _Key("pattern", "phase", 0.0),
    "center_mm": _Key("pattern", "center", 0.0),
    "pump_wavelength_nm": _Key("source", "pump_wavelength", 405.0, check="positive"),
    "pump_waist_mm": _Key("source", "pump_waist", 0.52, check="positive"),
    "focus_length_mm": _Key("source", "focus_length", 250.0, check="positive"),
    "crystal_distance_mm": _Key("source", "crystal_distance", 300.0, check="positive"),
    "input_angle_deg": _Key("eraser", "input_angle", 0.0, comment="0 = vertical"),
    "slit_a_polarizer_deg": _Key("eraser", "slit_a_polarizer", None, "optional"),
    "slit_b_polarizer_deg": _Key("eraser", "slit_b_polarizer", None, "optional"),
    "analyzer_deg": _Key("eraser", "analyzer", None, "optional"),
    "scan_start_mm": _Key("scan", "start", -12.5),
    "scan_stop_mm": _Key("scan", "stop", 12.5),
    "scan_step_mm": _Key("scan", "step", 25.0 / 340, check="positive", comment="341 points"),
    "dwell_s": _Key("scan", "dwell", 10.0, check="positive"),
    "aperture_mm": _Key("scan", "aperture", 0.7, check="nonneg"),
    "herald_rate_per_s": _Key("scan", "herald_rate", 35000.0, check="nonneg"),
    "signal_rate_per_s": _Key("scan", "signal_rate", 3000.0, check="nonneg"),
    "pair_efficiency": _Key("scan", "pair_efficiency", 0.00017, check="unit",
                            comment="assumed: 5.95 pairs/s + 1.05 accidentals/s = 7/s"),
    "coincidence_window_ns": _Key("scan", "coincidence_window", 10.0, check="positive",
                                  comment="assumed; not stated for the apparatus"),
    "background_rate_per_s": _Key("scan", "background_rate", 0.0, check="nonneg"),
    "seed": _Key("scan", "seed", 0, "int"),
    "splitter_ratio": _Key("g2", "splitter_ratio", 0.5, check="open_unit"),
    "g2_duration_s": _Key("g2", "duration", 1.0e6, check="positive"),
}


def _split_suffix(key):
    for suffix in _SUFFIXES:
        if key.endswith("_" + suffix):
            return key[: -len(suffix) - 1], suffix
    return key, None


_BASES = {}
for _name in _KEYS:
    _base, _suffix = _split_suffix(_name)
    if _suffix is not None:
        _BASES[_base] = _name


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "double"
    pattern: PatternParams = PatternParams(peak_rate=7.0, visibility=0.77)
    source: SourceModel = SourceModel()
    eraser: Optional[EraserSetup] = None
    scan: ScanConfig = ScanConfig()
    splitter_ratio: float = 0.5
    g2_duration: float = 1.0e6

    def with_seed(self, seed):
        return replace(self, scan=replace(self.scan, seed=seed))


def _parse_value(raw, key, spec, lineno):
    text = raw.strip()
    _, suffix = _split_suffix(key)
    if spec.kind == "str":
        return text
    if spec.kind == "optional" and text.lower() in ("none", ""):
        return None
    parts = text.split()
    if len(parts) == 2:
        unit = parts[1]
        if suffix is None or unit != suffix.replace("per_s", "/s") and unit != suffix:
            raise ConfigError(f"unit mismatch: value unit '{unit}' vs key unit '{suffix}'",
                              key, lineno)
        text = parts[0]
    elif len(parts) != 1:
        raise ConfigError(f"cannot parse value {raw.strip()!r}", key, lineno)
    try:
        if spec.kind == "int":
            value = int(text, 0)
        else:
            value = float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}", key, lineno) from None
    if spec.kind != "int" and not math.isfinite(value):
        raise ConfigError("value must be finite", key, lineno)
    if spec.check == "positive" and not value > 0:
        raise ConfigError(f"must be > 0, got {value}", key, lineno)
    if spec.check == "nonneg" and value < 0:
        raise ConfigError(f"must be >= 0, got {value}", key, lineno)
    if spec.check == "unit" and not 0 <= value <= 1:
        raise ConfigError(f"out of range [0, 1]: {value}", key, lineno)
    if spec.check == "open_unit" and not 0 < value < 1:
        raise ConfigError(f"out of range (0, 1): {value}", key, lineno)
    return value


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a configuration file's text."""
    values = {}
    lines = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, raw = (s.strip() for s in body.split("=", 1))
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", key):
            raise ConfigError("malformed key", key, lineno)
        if key not in _KEYS:
            base, _ = _split_suffix(key)
            if base in _BASES:
                raise ConfigError(f"unit mismatch: use '{_BASES[base]}'", key, lineno)
            if key in _BASES:
                raise ConfigError(f"unit suffix required: use '{_BASES[key]}'", key, lineno)
            raise ConfigError("unknown key", key, lineno)
        if key in values:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", key, lineno)
        values[key] = _parse_value(raw, key, _KEYS[key], lineno)
        lines[key] = lineno

    if "mode" in values and values["mode"] not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}", "mode", lines["mode"])

    sections = {"top": {}, "pattern": {}, "source": {}, "eraser": {}, "scan": {}, "g2": {}}
    for key, spec in _KEYS.items():
        value = values.get(key, spec.default)
        if value is not None and spec.kind != "str" and spec.kind != "int":
            _, suffix = _split_suffix(key)
            value = float(value) * (_UNITS[suffix] if suffix else 1.0)
        sections[spec.section][spec.field] = value

    def build(section, factory, **extra):
        try:
            return factory(**sections[section], **extra)
        except ValidationError as err:
            message = str(err)
            involved = [k for k, s in _KEYS.items()
                        if s.section == section and k in values and s.field in message]
            if not involved:
                involved = [k for k, s in _KEYS.items() if s.section == section and k in values]
            key = max(involved, key=lambda k: lines[k]) if involved else None
            raise ConfigError(message, key, lines.get(key)) from None

    pattern = build("pattern", PatternParams)
    source = build("source", SourceModel)
    scan = build("scan", ScanConfig)
    er = sections["eraser"]
    eraser = None
    # an input angle alone changes nothing without polarizers
    if any(er[f] is not None for f in ("slit_a_polarizer", "slit_b_polarizer", "analyzer")) \
            or sections["top"]["mode"] == "eraser":
        eraser = build("eraser", EraserSetup)
    return ExperimentConfig(
        mode=sections["top"]["mode"],
        pattern=pattern,
        source=source,
        eraser=eraser,
        scan=scan,
        splitter_ratio=sections["g2"]["splitter_ratio"],
        g2_duration=sections["g2"]["duration"],
    )


def defaults_text():
    """The default configuration as a parseable file."""
    out = ["# photonslit experiment configuration (defaults)"]
    for key, spec in _KEYS.items():
        value = spec.default
        if value is None:
            text = "none"
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        line = f"{key} = {text}"
        if spec.comment:
            line = f"{line:<36}# {spec.comment}"
        out.append(line)
    return "\n".join(out) + "\n"
