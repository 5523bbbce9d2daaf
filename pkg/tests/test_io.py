import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonslit.config import ConfigError, defaults_text, parse_config
from photonslit.errors import ValidationError
from photonslit.experiments import fit_records
from photonslit.pattern import PatternParams
from photonslit.plotting import COLUMNS, GLYPHS, ROWS, ascii_plot, svg_plot
from photonslit.scanio import (
    SCAN_HEADER,
    format_fit_report,
    parse_fit_report,
    read_scan_csv,
    read_xy_csv,
    write_pattern_csv,
    write_scan_csv,
)
from photonslit.simulate import ScanConfig, ScanRecord, run_scan

MM = 1e-3


# -- configuration -------------------------------------------------------------------


def test_empty_config_gives_apparatus_defaults():
    conf = parse_config("")
    p = conf.pattern
    assert p.wavelength == pytest.approx(810e-9, rel=1e-15)
    assert p.slit_separation == pytest.approx(0.62 * MM, rel=1e-15)
    assert p.slit_width == pytest.approx(0.13 * MM, rel=1e-15)
    assert p.screen_distance == pytest.approx(1.52, rel=1e-15)
    assert conf.scan.aperture == pytest.approx(0.7 * MM, rel=1e-15)
    assert conf.scan.n_points == 341
    assert conf.mode == "double" and conf.eraser is None


def test_defaults_text_round_trips():
    text = defaults_text()
    assert parse_config(text) == parse_config("")
    for line in text.splitlines()[1:]:
        assert "=" in line


def test_values_with_units_and_comments():
    conf = parse_config("""
        # single-slit run
        mode = single
        slit_width_mm = 0.285 mm   # measured
        slit_separation_mm = 0.285
        dwell_s = 3 s
        analyzer_deg = 45
        slit_a_polarizer_deg = 45
        slit_b_polarizer_deg = -45
    """)
    assert conf.mode == "single"
    assert conf.pattern.slit_width == pytest.approx(0.285 * MM)
    assert conf.scan.dwell == 3.0
    assert conf.eraser.analyzer == pytest.approx(math.pi / 4)


@pytest.mark.parametrize("text, key, line", [
    ("slit_separation_mm = 0.05", "slit_separation_mm", 1),
    ("\nvisibility = 1.2", "visibility", 2),
    ("colour = blue", "colour", 1),
    ("slit_width_nm = 130000", "slit_width_nm", 1),
    ("slit_width = 0.13", "slit_width", 1),
    ("slit_width_mm = 0.13 nm", "slit_width_mm", 1),
    ("dwell_s = 10\ndwell_s = 3", "dwell_s", 2),
    ("dwell_s = -1", "dwell_s", 1),
    ("dwell_s = ten", "dwell_s", 1),
    ("mode = triple", "mode", 1),
    ("scan_start_mm = 5\nscan_stop_mm = 1", "scan_stop_mm", 2),
    ("slit_a_polarizer_deg = 45", "slit_a_polarizer_deg", 1),
    ("splitter_ratio = 1", "splitter_ratio", 1),
    ("seed = -2", "seed", 1),
])
def test_config_errors_name_key_and_line(text, key, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    err = info.value
    assert err.key == key and err.line == line
    assert f"key '{key}'" in str(err) and f"line {line}" in str(err)


def test_visibility_range_message():
    with pytest.raises(ValidationError, match=r"out of range \[0, 1\]"):
        parse_config("visibility = 1.2")


def test_line_without_equals():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("dwell_s = 1\n\njust words\n")


# -- scan CSV --------------------------------------------------------------------------


def test_scan_round_trip_341_records():
    records = run_scan(ScanConfig(seed=3), PatternParams(visibility=0.77))
    text = write_scan_csv(records)
    assert text.splitlines()[0] == ",".join(SCAN_HEADER)
    assert read_scan_csv(text) == records
    assert len(records) == 341


def test_positions_carry_nine_significant_digits():
    records = run_scan(ScanConfig(seed=3, dwell=1.0), PatternParams())
    rows = write_scan_csv(records).splitlines()[1:]
    first = rows[1].split(",")[0]
    digits = first.lstrip("-").replace(".", "").lstrip("0")
    assert len(digits) >= 9


@settings(max_examples=200, deadline=None)
@given(st.floats(-1.0, 1.0, allow_subnormal=False), st.floats(1e-3, 1e4),
       st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10**6))
def test_any_record_round_trips(x, dwell, a, b, c):
    coinc = min(a, b, c)
    rec = ScanRecord(x, dwell, coinc, b, c)
    assert read_scan_csv(write_scan_csv([rec])) == [rec]


def test_hand_written_file():
    text = ("position_mm,dwell_s,coincidences,singles_signal,singles_herald\n"
            "-1.5,10,12,30001,350123\n"
            "0,10,70,30000,350000\n"
            "1.25,3.5,0,2,99\n")
    records = read_scan_csv(text)
    assert records == [
        ScanRecord(-1.5e-3, 10.0, 12, 30001, 350123),
        ScanRecord(0.0, 10.0, 70, 30000, 350000),
        ScanRecord(1.25e-3, 3.5, 0, 2, 99),
    ]


@pytest.mark.parametrize("row, message", [
    ("0.1,10,-3,5,5", "line 3: coincidences must be non-negative"),
    ("0.1,10,2.5,5,5", "line 3: coincidences must be an integer"),
    ("0.1,10,3,5", "line 3: expected 5 fields"),
    ("abc,10,3,5,5", "line 3: malformed number"),
    ("0.1,0,3,5,5", "line 3: dwell_s must be positive"),
    ("0.1,10,9,5,50", "line 3: coincidences exceed"),
])
def test_malformed_rows_report_line(row, message):
    text = ",".join(SCAN_HEADER) + "\n0,1,0,0,0\n" + row + "\n"
    with pytest.raises(ValidationError, match=message):
        read_scan_csv(text)


def test_wrong_header():
    with pytest.raises(ValidationError, match="line 1"):
        read_scan_csv("x,y\n1,2\n")


def test_pattern_csv_and_xy_reader():
    x = np.linspace(-2, 2, 11) * MM
    y = np.cos(x * 1e3) ** 2
    xr, yr = read_xy_csv(write_pattern_csv(x, y))
    assert np.array_equal(xr, x) and np.array_equal(yr, y)
    records = [ScanRecord(0.0, 4.0, 8, 10, 10), ScanRecord(1e-3, 2.0, 1, 10, 10)]
    xs, rates = read_xy_csv(write_scan_csv(records))
    assert xs.tolist() == [0.0, 1e-3] and rates.tolist() == [2.0, 0.5]


# -- fit report ------------------------------------------------------------------------


def test_report_round_trip():
    records = run_scan(ScanConfig(seed=2), PatternParams(visibility=0.77))
    fit = fit_records(records, aperture=0.7 * MM)
    text = format_fit_report(fit, extra={"source": "scan.csv"})
    parsed = parse_fit_report(text)
    assert parsed["values"]["slit_separation_mm"] == pytest.approx(fit.estimates["slit_separation"] / MM, rel=1e-9)
    assert parsed["errors"]["slit_width_mm"] == pytest.approx(fit.errors["slit_width"] / MM, rel=1e-9)
    assert parsed["values"]["wavelength_nm"] == pytest.approx(810.0)
    assert parsed["meta"]["source"] == "scan.csv"
    assert parsed["meta"]["converged"] == "true"
    assert parsed["names"][0] == "peak_rate_per_s"
    k = fit.names.index("slit_separation")
    assert parsed["covariance"][k, k] == pytest.approx(fit.covariance[k, k] / MM**2, rel=1e-9)
    assert "note = phase and centre both free" in text
    assert "slit_separation_mm = " in text and " ± " in text


# -- plots -------------------------------------------------------------------------------


def test_ascii_plot_shape():
    x = np.linspace(-10, 10, 341) * MM
    y = 1 + np.cos(x * 3e3)
    lines = ascii_plot(x, y).splitlines()
    grid = lines[:ROWS]
    assert all(len(row) == COLUMNS for row in grid)
    assert set("".join(grid)) <= set(GLYPHS)
    assert lines[ROWS] == "-" * COLUMNS
    assert "-10" in lines[ROWS + 1] and "10" in lines[ROWS + 1]


def test_ascii_plot_degenerate_inputs():
    assert ascii_plot([], []) == "(no data)\n"
    out = ascii_plot([1e-3, 1e-3], [0.0, 0.0], title="flat")
    assert out.startswith("flat\n")


def test_svg_is_wellformed():
    x = np.linspace(-5, 5, 50) * MM
    y = np.exp(-(x / 2e-3) ** 2)
    doc = svg_plot(x, y, model=(x, y), title="a < b & c")
    root = ET.fromstring(doc.split("\n", 1)[1])
    ns = "{http://www.w3.org/2000/svg}"
    assert root.tag == ns + "svg" and root.get("version") == "1.1"
    assert len(root.findall(f".//{ns}circle")) == 50
    assert len(root.findall(f".//{ns}polyline")) == 1
