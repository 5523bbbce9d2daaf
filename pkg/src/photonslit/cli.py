"""Command line entry point.

Subcommands: ``pattern``, ``simulate``, ``fit``, ``eraser``, ``g2``, ``plot``.
Exit status is 0 on success, 1 for invalid input and 2 when a numerical
procedure fails.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import config as cfgmod
from .errors import NumericalError, ValidationError
from .experiments import ERASER_CONFIGURATIONS, eraser_series, fit_records
from .pattern import (
    EraserSetup,
    aperture_averaged_density,
    double_slit_density,
    eraser_density,
    partial_coherence_density,
    single_slit_density,
)
from .plotting import ascii_plot, svg_plot
from .scanio import format_fit_report, read_scan_csv, read_xy_csv, write_pattern_csv, write_scan_csv
from .simulate import g2_preset, run_g2, run_scan

OUTPUT_DIR_ENV = "PHOTONSLIT_OUTPUT_DIR"

_MODE_MODEL = {"double": "partial", "single": "single", "eraser": "eraser"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def _common(p):
    p.add_argument("--config", metavar="PATH", help="experiment configuration file")
    p.add_argument("--seed", type=int, help="master RNG seed (overrides the config)")
    p.add_argument("--out", metavar="PATH", help="write the result here instead of stdout")


def build_parser():
    parser = _Parser(prog="photonslit", description="Single-photon slit interference toolkit")
    parser.add_argument("--print-defaults", action="store_true",
                        help="print the default configuration file and exit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("pattern", help="theoretical count-rate curve as CSV")
    _common(p)
    p.add_argument("--model", choices=("double", "partial", "single", "eraser"))
    p.add_argument("--d-mm", type=float, help="slit separation")
    p.add_argument("--b-mm", type=float, help="slit width")
    p.add_argument("--visibility", type=float)
    p.add_argument("--aperture-mm", type=float, default=0.0)
    p.add_argument("--points", type=int, default=2001)

    p = sub.add_parser("simulate", help="simulate a scan and write scan CSV")
    _common(p)

    p = sub.add_parser("fit", help="fit a pattern model to scan CSV")
    _common(p)
    p.add_argument("csv", help="scan CSV file ('-' for stdin)")
    p.add_argument("--model", choices=("double", "partial", "single"))

    p = sub.add_parser("eraser", help="simulate and fit the three eraser arrangements")
    _common(p)

    p = sub.add_parser("g2", help="simulate the three-detector g2(0) measurement")
    _common(p)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--preset", choices=("tabletop", "heralded", "poissonian"))
    group.add_argument("--poissonian", action="store_const", dest="preset", const="poissonian")
    group.add_argument("--heralded", action="store_const", dest="preset", const="heralded")
    p.add_argument("--duration-s", type=float, help="total acquisition time")
    p.add_argument("--splitter-ratio", type=float)

    p = sub.add_parser("plot", help="ASCII chart of a scan or pattern CSV, optional SVG")
    _common(p)
    p.add_argument("csv", help="scan or pattern CSV file ('-' for stdin)")
    p.add_argument("--svg", metavar="PATH", help="also write an SVG plot")
    p.add_argument("--title", default="")
    return parser


def _read_text(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise ValidationError(f"cannot read {path}: {err.strerror}") from None


def _output_path(path):
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    path = _output_path(out)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as err:
        raise ValidationError(f"--out: cannot write {path}: {err.strerror}") from None


def _load_config(args):
    if args.config:
        conf = cfgmod.parse_config(_read_text(args.config))
    else:
        conf = cfgmod.parse_config("")
    if args.seed is not None:
        if args.seed < 0:
            raise ValidationError("--seed must be non-negative")
        conf = conf.with_seed(args.seed)
    return conf


def _cmd_pattern(args, conf):
    p = conf.pattern
    if args.d_mm is not None:
        p = replace(p, slit_separation=args.d_mm * 1e-3)
    if args.b_mm is not None:
        # a single slit may be wider than the (unused) separation
        d = max(p.slit_separation, args.b_mm * 1e-3)
        p = replace(p, slit_width=args.b_mm * 1e-3, slit_separation=d)
    if args.visibility is not None:
        p = replace(p, visibility=args.visibility)
    if args.points < 2:
        raise ValidationError("--points must be >= 2")
    if args.aperture_mm < 0:
        raise ValidationError("--aperture-mm must be >= 0")
    model = args.model or _MODE_MODEL.get(conf.mode, "partial")
    setup = conf.eraser or EraserSetup()
    base = {
        "double": double_slit_density,
        "partial": partial_coherence_density,
        "single": single_slit_density,
        "eraser": lambda x, q: eraser_density(x, q, setup),
    }[model]
    x = np.linspace(conf.scan.start, conf.scan.stop, args.points)
    y = aperture_averaged_density(x, p, args.aperture_mm * 1e-3, base)
    _emit(write_pattern_csv(x, y), args.out)


def _scan_model(conf):
    if conf.mode == "single":
        return "single", None
    if conf.mode == "eraser":
        return "eraser", conf.eraser or EraserSetup()
    return "partial", None


def _cmd_simulate(args, conf):
    model, setup = _scan_model(conf)
    records = run_scan(conf.scan, conf.pattern, setup, model=model)
    _emit(write_scan_csv(records), args.out)


def _cmd_fit(args, conf):
    records = read_scan_csv(_read_text(args.csv))
    if not records:
        raise ValidationError(f"{args.csv}: no data rows")
    model = args.model or ("single" if conf.mode == "single" else "partial")
    result = fit_records(records, model, wavelength=conf.pattern.wavelength,
                         screen_distance=conf.pattern.screen_distance,
                         aperture=conf.scan.aperture)
    _emit(format_fit_report(result, extra={"source": args.csv}), args.out)


def _cmd_eraser(args, conf):
    points = eraser_series(conf.pattern, conf.scan, ERASER_CONFIGURATIONS)
    lines = ["# quantum eraser: fitted fringe visibility per polarizer arrangement"]
    for pt in points:
        analyzer = "none" if pt.setup.analyzer is None else f"{math.degrees(pt.setup.analyzer):g}"
        lines.append(f"{pt.label}.analyzer_deg = {analyzer}")
        lines.append(f"{pt.label}.predicted_visibility = {pt.predicted:.6g}")
        lines.append(f"{pt.label}.visibility = {pt.visibility:.6g} ± {pt.error:.3g}")
    _emit("\n".join(lines) + "\n", args.out)


def _cmd_g2(args, conf):
    if args.preset:
        scan = g2_preset(args.preset, seed=conf.scan.seed)
        label = args.preset
    elif args.config:
        scan, label = conf.scan, "config"
    else:
        scan, label = g2_preset("tabletop", seed=conf.scan.seed), "tabletop"
    duration = args.duration_s if args.duration_s is not None else conf.g2_duration
    ratio = args.splitter_ratio if args.splitter_ratio is not None else conf.splitter_ratio
    res = run_g2(scan, ratio, duration)
    lines = [
        f"preset = {label}",
        f"duration_s = {duration:g}",
        f"splitter_ratio = {ratio:g}",
        f"coincidence_window_ns = {scan.coincidence_window * 1e9:g}",
        f"n_gate = {res.n_gate}",
        f"n_gt = {res.n_gt}",
        f"n_gr = {res.n_gr}",
        f"n_gtr = {res.n_gtr}",
        f"g2 = {res.g2:.6g} ± {res.std_error:.3g}",
    ]
    _emit("\n".join(lines) + "\n", args.out)


def _cmd_plot(args, conf):
    x, y = read_xy_csv(_read_text(args.csv))
    if len(x) == 0:
        raise ValidationError(f"{args.csv}: no data rows")
    text = ascii_plot(x, y, title=args.title or None)
    _emit(text, args.out)
    if args.svg:
        path = _output_path(args.svg)
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(svg_plot(x, y, title=args.title))
        except OSError as err:
            raise ValidationError(f"--svg: cannot write {path}: {err.strerror}") from None


_COMMANDS = {
    "pattern": _cmd_pattern,
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "eraser": _cmd_eraser,
    "g2": _cmd_g2,
    "plot": _cmd_plot,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.print_defaults:
            sys.stdout.write(cfgmod.defaults_text())
            return 0
        if not args.command:
            raise ValidationError("a subcommand is required: " + ", ".join(_COMMANDS))
        conf = _load_config(args)
        _COMMANDS[args.command](args, conf)
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
