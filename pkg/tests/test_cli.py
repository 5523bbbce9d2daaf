import subprocess
import sys

import numpy as np
import pytest

from photonslit.cli import main
from photonslit.config import parse_config
from photonslit.scanio import parse_fit_report, read_scan_csv, read_xy_csv


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def tabletop_cfg(tmp_path):
    path = tmp_path / "tabletop.cfg"
    path.write_text("# tabletop double slit\nslit_separation_mm = 0.62\nslit_width_mm = 0.13\nvisibility = 0.77\n")
    return str(path)


def test_print_defaults(capsys):
    code, out, _ = run(["--print-defaults"], capsys)
    assert code == 0
    assert parse_config(out) == parse_config("")


def test_simulate_then_fit(tmp_path, tabletop_cfg, capsys):
    csv_path = tmp_path / "scan.csv"
    code, _, _ = run(["simulate", "--config", tabletop_cfg, "--seed", "7", "--out", str(csv_path)], capsys)
    assert code == 0
    assert len(read_scan_csv(csv_path.read_text())) == 341
    code, out, _ = run(["fit", str(csv_path), "--config", tabletop_cfg], capsys)
    assert code == 0
    report = parse_fit_report(out)
    d, err = report["values"]["slit_separation_mm"], report["errors"]["slit_separation_mm"]
    assert 0 < err < 0.02
    assert abs(d - 0.62) <= 3 * err


def test_simulate_is_byte_identical(tmp_path, tabletop_cfg, capsys):
    outs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        assert run(["simulate", "--config", tabletop_cfg, "--seed", "11", "--out", str(path)], capsys)[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    other = tmp_path / "c.csv"
    run(["simulate", "--config", tabletop_cfg, "--seed", "12", "--out", str(other)], capsys)
    assert other.read_bytes() != outs[0]


def test_pattern_single_slit_secondary_maxima(capsys):
    code, out, _ = run(["pattern", "--model", "single", "--b-mm", "0.285"], capsys)
    assert code == 0
    x, y = read_xy_csv(out)
    peaks = np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])) + 1
    right = peaks[x[peaks] > 0]
    ratios = y[right[:2]] / y.max()
    assert abs(ratios[0] - 0.047) <= 0.001
    assert abs(ratios[1] - 0.016) <= 0.001


def test_pattern_is_byte_identical(capsys):
    a = run(["pattern", "--model", "partial", "--aperture-mm", "0.7"], capsys)[1]
    b = run(["pattern", "--model", "partial", "--aperture-mm", "0.7"], capsys)[1]
    assert a == b and a.startswith("position_mm,rate_per_s\n")


def test_g2_poissonian(capsys):
    code, out, _ = run(["g2", "--poissonian", "--seed", "3"], capsys)
    assert code == 0
    report = parse_fit_report(out)
    assert report["values"]["g2"] == pytest.approx(1.0, abs=0.1)
    assert report["meta"]["preset"] == "poissonian"


def test_eraser_command(capsys):
    code, out, _ = run(["eraser", "--seed", "1"], capsys)
    assert code == 0
    report = parse_fit_report(out)
    assert report["values"]["marked.predicted_visibility"] == 0.0
    assert report["values"]["erased.predicted_visibility"] == pytest.approx(0.77)
    assert report["values"]["one-slit.predicted_visibility"] == 0.0
    assert report["values"]["erased.visibility"] > 0.5


def test_plot_ascii_and_svg(tmp_path, capsys):
    csv_path = tmp_path / "scan.csv"
    run(["simulate", "--seed", "1", "--out", str(csv_path)], capsys)
    svg = tmp_path / "scan.svg"
    code, out, _ = run(["plot", str(csv_path), "--svg", str(svg), "--title", "run 1"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "run 1"
    assert svg.read_text().lstrip().startswith("<?xml")


def test_output_directory_override(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("PHOTONSLIT_OUTPUT_DIR", str(tmp_path))
    assert run(["pattern", "--points", "5", "--out", "curve.csv"], capsys)[0] == 0
    assert (tmp_path / "curve.csv").read_text().startswith("position_mm")


@pytest.mark.parametrize("argv, needle", [
    (["simulate", "--seed", "-4"], "--seed"),
    (["pattern", "--points", "1"], "--points"),
    (["pattern", "--aperture-mm", "-1"], "--aperture-mm"),
    (["pattern", "--model", "quad"], "--model"),
    (["fit", "/no/such/file.csv"], "/no/such/file.csv"),
    (["frobnicate"], "frobnicate"),
    ([], "subcommand"),
    (["g2", "--splitter-ratio", "1.5"], "splitter_ratio"),
])
def test_validation_errors_exit_one(argv, needle, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1
    assert needle in err


def test_config_error_names_key_and_line(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("dwell_s = 3\nvisibility = 1.2\n")
    code, _, err = run(["simulate", "--config", str(path)], capsys)
    assert code == 1
    assert "key 'visibility'" in err and "line 2" in err


def test_bad_csv_exit_one(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("position_mm,dwell_s,coincidences,singles_signal,singles_herald\n0,1,-1,0,0\n")
    code, _, err = run(["fit", str(path)], capsys)
    assert code == 1 and "line 2" in err


def test_numeric_failure_exit_two(tmp_path, capsys):
    path = tmp_path / "dark.cfg"
    path.write_text("pair_efficiency = 0\nsignal_rate_per_s = 0\ng2_duration_s = 10\n")
    code, _, err = run(["g2", "--config", str(path)], capsys)
    assert code == 2 and "insufficient counts" in err


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "photonslit", "g2", "--heralded", "--duration-s", "1e5"],
                          capture_output=True, text=True, check=False)
    assert done.returncode == 0
    assert "g2 = " in done.stdout
