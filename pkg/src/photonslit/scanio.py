"""CSV scan files, pattern curves and fit reports.

Scan files carry the header ``position_mm,dwell_s,coincidences,
singles_signal,singles_herald``.  Positions are written as the shortest
decimal that round-trips the SI value, shifted to millimetres, so
``read_scan_csv(write_scan_csv(records)) == records`` exactly.
"""
from __future__ import annotations

import csv
import io
import math
from decimal import Decimal

import numpy as np

from .errors import ValidationError
from .simulate import ScanRecord

__all__ = [
    "SCAN_HEADER",
    "write_scan_csv",
    "read_scan_csv",
    "write_pattern_csv",
    "read_xy_csv",
    "format_fit_report",
    "parse_fit_report",
    "REPORT_UNITS",
]

SCAN_HEADER = ("position_mm", "dwell_s", "coincidences", "singles_signal", "singles_herald")
PATTERN_HEADER = ("position_mm", "rate_per_s")

# parameter -> (report key, SI value per report unit)
REPORT_UNITS = {
    "wavelength": ("wavelength_nm", 1e-9),
    "slit_separation": ("slit_separation_mm", 1e-3),
    "slit_width": ("slit_width_mm", 1e-3),
    "screen_distance": ("screen_distance_mm", 1e-3),
    "peak_rate": ("peak_rate_per_s", 1.0),
    "visibility": ("visibility", 1.0),
    "phase": ("phase_rad", 1.0),
    "center": ("center_mm", 1e-3),
}


def _mm_text(metres):
    # exact decimal shift of repr(); never uses exponent notation
    return format(Decimal(repr(float(metres))).scaleb(3).normalize(), "f")


def _metres(text):
    return float(Decimal(text).scaleb(-3))


def write_scan_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCAN_HEADER)
    for r in records:
        writer.writerow([_mm_text(r.position), repr(float(r.dwell)), r.coincidences,
                         r.singles_signal, r.singles_herald])
    return buf.getvalue()


def _int_field(value, name, lineno):
    try:
        n = int(value)
    except ValueError:
        raise ValidationError(f"line {lineno}: {name} must be an integer, got {value!r}") from None
    if n < 0:
        raise ValidationError(f"line {lineno}: {name} must be non-negative, got {n}")
    return n


def read_scan_csv(text: str):
    """Parse scan CSV text into a list of :class:`ScanRecord`."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(c.strip() for c in rows[0]) != SCAN_HEADER:
        raise ValidationError(f"line 1: expected header {','.join(SCAN_HEADER)}")
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(SCAN_HEADER):
            raise ValidationError(f"line {lineno}: expected {len(SCAN_HEADER)} fields, got {len(row)}")
        pos, dwell, coinc, ss, sh = (c.strip() for c in row)
        try:
            position = _metres(pos)
            dwell_s = float(dwell)
        except Exception:
            raise ValidationError(f"line {lineno}: malformed number in {row!r}") from None
        if not math.isfinite(position):
            raise ValidationError(f"line {lineno}: position must be finite")
        if not (math.isfinite(dwell_s) and dwell_s > 0):
            raise ValidationError(f"line {lineno}: dwell_s must be positive, got {dwell!r}")
        counts = [_int_field(v, n, lineno) for v, n in zip((coinc, ss, sh), SCAN_HEADER[2:])]
        try:
            records.append(ScanRecord(position, dwell_s, *counts))
        except ValidationError as err:
            raise ValidationError(f"line {lineno}: {err}") from None
    return records


def write_pattern_csv(positions, rates) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PATTERN_HEADER)
    for x, y in zip(positions, rates):
        writer.writerow([_mm_text(x), repr(float(y))])
    return buf.getvalue()


def read_xy_csv(text: str):
    """Positions (m) and y values from a scan or pattern CSV.

    For scan files ``y`` is the coincidence rate (counts / dwell).
    """
    head = text.split("\n", 1)[0].strip()
    if tuple(c.strip() for c in head.split(",")) == SCAN_HEADER:
        records = read_scan_csv(text)
        x = np.array([r.position for r in records])
        y = np.array([r.coincidences / r.dwell for r in records])
        return x, y
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(c.strip() for c in rows[0]) != PATTERN_HEADER:
        raise ValidationError("line 1: expected a scan or pattern CSV header")
    xs, ys = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            xs.append(_metres(row[0].strip()))
            ys.append(float(row[1]))
        except Exception:
            raise ValidationError(f"line {lineno}: malformed row {row!r}") from None
    return np.array(xs), np.array(ys)


def _fmt(v):
    return f"{v:.10g}"


def format_fit_report(result, extra=None) -> str:
    """Key/value fit report with a trailing ``[covariance]`` block (report units)."""
    lines = [f"model = {result.model}"]
    for name in result.names:
        key, unit = REPORT_UNITS[name]
        lines.append(f"{key} = {_fmt(result.estimates[name] / unit)} ± {_fmt(result.errors[name] / unit)}")
    for name, value in sorted(result.fixed.items()):
        key, unit = REPORT_UNITS[name]
        lines.append(f"{key} = {_fmt(value / unit)}  # fixed")
    lines += [
        f"reduced_chi_square = {_fmt(result.reduced_chi_square)}",
        f"cost = {_fmt(result.cost)}",
        f"n_data = {result.n_data}",
        f"iterations = {result.iterations}",
        f"converged = {'true' if result.converged else 'false'}",
        f"guess_fallback = {'true' if result.guess_fallback else 'false'}",
    ]
    if result.message:
        lines.append(f"message = {result.message}")
    for note in result.notes:
        lines.append(f"note = {note}")
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {value}")
    lines.append("[covariance]")
    keys = [REPORT_UNITS[n][0] for n in result.names]
    units = np.array([REPORT_UNITS[n][1] for n in result.names])
    cov = result.covariance / np.outer(units, units)
    lines.append("names = " + ",".join(keys))
    for key, row in zip(keys, cov):
        lines.append(f"{key} = " + ",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_fit_report(text: str):
    """Read a report back into ``{"values": ..., "errors": ..., "covariance": ...}``."""
    values, errors, meta = {}, {}, {}
    cov_rows, names = {}, None
    in_cov = False
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line == "[covariance]":
            in_cov = True
            continue
        key, _, rest = line.partition("=")
        key, rest = key.strip(), rest.split("#", 1)[0].strip()
        if in_cov:
            if key == "names":
                names = rest.split(",")
            else:
                cov_rows[key] = [float(v) for v in rest.split(",")]
            continue
        if "±" in rest:
            v, e = rest.split("±")
            values[key], errors[key] = float(v), float(e)
        else:
            try:
                values[key] = float(rest)
            except ValueError:
                meta[key] = rest
    cov = np.array([cov_rows[n] for n in names]) if names else np.zeros((0, 0))
    return {"values": values, "errors": errors, "meta": meta, "names": names or [], "covariance": cov}
