"""Acceptance criteria 1-9.

Each test measures one criterion at its stated tolerance and runtime budget
and prints a single ``PASS``/``FAIL`` line, repeated in the run summary.
Run ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""
import contextlib
import io
import math
import sys
import time
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate, stats

from photonslit import streams
from photonslit.cli import main as cli_main
from photonslit.experiments import eraser_series, fit_records
from photonslit.fitting import FitProblem, analytic_jacobian, fit_scan, jacobian
from photonslit.pattern import (
    EraserSetup,
    PatternParams,
    SourceModel,
    aperture_average,
    double_slit_density,
    envelope_width,
    fringe_spacing,
    visibility_gaussian_source,
)
from photonslit.scanio import read_xy_csv
from photonslit.simulate import ScanConfig, build_sampler, g2_preset, run_g2, run_scan

MM = 1e-3
DEG = math.pi / 180


def verdict(emit, number, title, ok, detail, elapsed, budget):
    ok = bool(ok) and elapsed < budget
    emit(f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}: {detail} "
         f"[{elapsed:.2f} s of {budget:g} s]")
    return ok


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_1_geometry(announce):
    with Timer() as t:
        p = PatternParams(wavelength=810e-9, slit_separation=0.62 * MM, slit_width=0.13 * MM,
                          screen_distance=1.52)
        dx, env = fringe_spacing(p) / MM, envelope_width(p) / MM
    ok = 1.9 <= dx <= 2.1 and 18.5 <= env <= 19.5
    assert verdict(announce, 1, "geometry", ok, f"fringe spacing {dx:.3f} mm, envelope width {env:.2f} mm",
                   t.elapsed, 1.0)


def test_criterion_2_visibility(announce):
    with Timer() as t:
        v = visibility_gaussian_source(0.62 * MM, SourceModel(crystal_distance=0.30), 810e-9,
                                       waist=0.064 * MM)
    assert verdict(announce, 2, "source visibility", abs(v - 0.77) <= 0.01, f"V = {v:.4f} (target 0.77 ± 0.01)",
                   t.elapsed, 1.0)


def test_criterion_3_single_slit_maxima(announce):
    with Timer() as t:
        out = io.StringIO()
        with contextlib.redirect_stdout(out):
            code = cli_main(["pattern", "--model", "single", "--b-mm", "0.285"])
        x, y = read_xy_csv(out.getvalue())
        peaks = np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])) + 1
        right = peaks[x[peaks] > 0][:2]
        r1, r2 = (y[right] / y.max()).tolist() + [math.nan] * (2 - len(right))
    ok = code == 0 and abs(r1 - 0.047) <= 0.001 and abs(r2 - 0.016) <= 0.001
    assert verdict(announce, 3, "single-slit secondary maxima", ok,
                   f"{100 * r1:.2f}% and {100 * r2:.2f}% of the central peak", t.elapsed, 1.0)


def test_criterion_4_double_slit_fit_recovery(announce):
    truth = PatternParams(visibility=0.77)
    hits = 0
    with Timer() as t:
        for seed in range(100):
            cfg = ScanConfig(seed=seed)
            fit = fit_records(run_scan(cfg, truth), aperture=cfg.aperture)
            d, b = fit.estimates["slit_separation"], fit.estimates["slit_width"]
            hits += abs(d - 0.62 * MM) <= 0.02 * MM and abs(b - 0.13 * MM) <= 0.02 * MM
    assert verdict(announce, 4, "double-slit fit recovery", hits >= 90,
                   f"d and b within ±0.02 mm in {hits}/100 seeds", t.elapsed, 120.0)


def test_criterion_5_single_slit_fit_recovery(announce):
    truth = PatternParams(slit_width=0.285 * MM, slit_separation=0.62 * MM)
    hits = 0
    with Timer() as t:
        for seed in range(100):
            cfg = ScanConfig(seed=seed)
            fit = fit_records(run_scan(cfg, truth, model="single"), "single", aperture=cfg.aperture)
            hits += abs(fit.estimates["slit_width"] - 0.285 * MM) <= 0.01 * MM
    assert verdict(announce, 5, "single-slit fit recovery", hits >= 90,
                   f"b within ±0.01 mm in {hits}/100 seeds", t.elapsed, 60.0)


def test_criterion_6_eraser_law(announce):
    angles = (0.0, 22.5, -22.5, 45.0, -45.0)
    setups = {f"{a:+g} deg": EraserSetup(0.0, 45 * DEG, -45 * DEG, a * DEG) for a in angles}
    with Timer() as t:
        points = eraser_series(PatternParams(visibility=1.0), ScanConfig(dwell=30.0, seed=60), setups)
    worst, parts = 0.0, []
    for a, pt in zip(angles, points):
        law = abs(math.cos(2 * a * DEG))
        worst = max(worst, abs(pt.visibility - law))
        parts.append(f"{a:+g}°: {pt.visibility:.3f} vs {law:.3f}")
    assert verdict(announce, 6, "eraser visibility law", worst <= 0.05,
                   "; ".join(parts) + f" (max deviation {worst:.3f})", t.elapsed, 120.0)


def test_criterion_7_g2(announce):
    with Timer() as t:
        got = {name: run_g2(g2_preset(name, seed=7), 0.5, 1e6) for name in
               ("heralded", "poissonian", "tabletop")}
    h, p, a = (got[n].g2 for n in ("heralded", "poissonian", "tabletop"))
    ok = h < 0.1 and abs(p - 1.0) <= 0.1 and 0.6 <= a <= 0.9
    assert verdict(announce, 7, "g2 ordering", ok,
                   f"heralded {h:.1e}, poissonian {p:.3f}, accidental-heavy {a:.3f}", t.elapsed, 60.0)


def test_criterion_8_sampler_chi_square(announce):
    n, bins = 1_000_000, 200
    p = PatternParams()
    lo, hi = -12.5 * MM, 12.5 * MM
    with Timer() as t:
        sampler = build_sampler(lambda x: double_slit_density(x, p), lo, hi)
        draws = sampler.sample(streams.stream(2024, streams.SAMPLER), n)
        edges = np.linspace(lo, hi, bins + 1)
        observed, _ = np.histogram(draws, edges)
        f = lambda u: float(double_slit_density(u, p))  # noqa: E731
        mass = np.array([integrate.quad(f, a, b, epsabs=0, epsrel=1e-10)[0]
                         for a, b in zip(edges[:-1], edges[1:])])
        expected = n * mass / mass.sum()
        big = expected >= 5
        obs = np.append(observed[big], observed[~big].sum())
        exp = np.append(expected[big], expected[~big].sum())
        pvalue = stats.chisquare(obs, exp).pvalue
    assert verdict(announce, 8, "sampler chi-square", pvalue > 1e-3,
                   f"p = {pvalue:.3f} for {n} draws in {big.sum()} bins", t.elapsed, 10.0)


def _jacobian_gap(rng, x, n, t):
    names = ("peak_rate", "slit_separation", "slit_width", "visibility", "phase", "center",
             "wavelength", "screen_distance")
    b = rng.uniform(0.08, 0.3) * MM
    values = dict(peak_rate=rng.uniform(1, 50), slit_separation=b * rng.uniform(1.5, 8), slit_width=b,
                  visibility=rng.uniform(0, 1), phase=rng.uniform(-3, 3), center=rng.uniform(-2, 2) * MM,
                  wavelength=rng.uniform(600, 1000) * 1e-9, screen_distance=rng.uniform(0.5, 3))
    prob = FitProblem(x, n, t, "partial", {k: (-1e3, 1e3) for k in names}, {}, aperture=0.7 * MM)
    params = [values[k] for k in names]
    a, f = analytic_jacobian(prob, params), jacobian(prob, params)
    scale = np.max(np.abs(a), axis=0)
    return float(np.max(np.max(np.abs(a - f), axis=0) / np.where(scale > 0, scale, 1.0)))


def test_criterion_9_numeric_hygiene(announce):
    rng = np.random.default_rng(9)
    with Timer() as t:
        cfg = ScanConfig(seed=9)
        records = run_scan(cfg, PatternParams(visibility=0.77))
        x = np.array([r.position for r in records])
        n = np.array([r.coincidences for r in records], dtype=float)
        jac_gap = max(_jacobian_gap(rng, x, n, cfg.dwell) for _ in range(30))

        monotone = True
        for seed in range(5):
            rec = run_scan(replace(cfg, seed=900 + seed), PatternParams(visibility=0.77))
            fit = fit_scan(x, np.array([r.coincidences for r in rec], float), cfg.dwell, aperture=0.7 * MM)
            monotone &= bool(np.all(np.diff(fit.cost_history) <= 0))

        # a cosine averaged over width a is attenuated by sinc(a / period)
        quad_gap = 0.0
        u = np.linspace(-10, 10, 401) * MM
        period = 2 * MM
        for a in (0.1, 0.35, 0.7, 1.7):
            got = aperture_average(lambda v: np.cos(2 * np.pi * v / period), u, a * MM)
            quad_gap = max(quad_gap, float(np.max(np.abs(got - np.sinc(a * MM / period)
                                                         * np.cos(2 * np.pi * u / period)))))
    ok = jac_gap < 1e-6 and monotone and quad_gap < 1e-9
    assert verdict(announce, 9, "numeric hygiene", ok,
                   f"Jacobian gap {jac_gap:.1e}, monotone steps {monotone}, quadrature gap {quad_gap:.1e}",
                   t.elapsed, 10.0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
