"""Monte Carlo model of a heralded photon-counting scan.

A scan steps a collection aperture across the pattern and, at every stage
position, records three numbers over the dwell time: herald singles, scan
detector singles and herald/scan coincidences.  Counts are drawn per dwell
bin as Poisson variates:

* true coincidences at rate ``herald_rate * pair_efficiency * g(x)``, where
  ``g`` is the aperture-averaged pattern normalized to a peak of one;
* accidental coincidences at rate ``R_herald * R_signal(x) * tau``;
* the remaining singles on each detector, so that coincidences can never
  exceed either singles count.

The three-detector variant (:func:`run_g2`) splits the scan arm with a beam
splitter and estimates ``g2(0) = N_G N_GTR / (N_GT N_GR)``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import streams
from .errors import InsufficientCountsError, ValidationError
from .pattern import (
    EraserSetup,
    PatternParams,
    aperture_average,
    double_slit_density,
    eraser_density,
    partial_coherence_density,
    single_slit_density,
)

__all__ = [
    "ScanConfig",
    "ScanRecord",
    "G2Result",
    "PositionSampler",
    "build_sampler",
    "simulate_point",
    "scan_density",
    "run_scan",
    "run_g2",
    "g2_preset",
]

MODELS = ("partial", "double", "single", "eraser")


@dataclass(frozen=True)
class ScanConfig:
    """Stage motion, detector rates and coincidence electronics.

    Defaults reproduce the double-slit run of the tabletop apparatus: 341
    points over 25 mm, 10 s per point, a 0.7 mm collection slit, 35,000 herald
    singles/s, 3,000 scan singles/s at the pattern peak and 7 coincidences/s.
    The coincidence window is not known for that apparatus; 10 ns is assumed,
    which makes 1.05 accidentals/s at the peak, and ``pair_efficiency`` is set
    so that true pairs supply the remaining 5.95/s.
    """

    start: float = -12.5e-3
    stop: float = 12.5e-3
    step: float = 25e-3 / 340
    dwell: float = 10.0
    aperture: float = 0.7e-3
    herald_rate: float = 35_000.0
    signal_rate: float = 3_000.0
    pair_efficiency: float = 5.95 / 35_000.0
    coincidence_window: float = 10e-9
    background_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.start) and np.isfinite(self.stop) and self.start < self.stop):
            raise ValidationError(f"scan start must be < stop (got {self.start!r}, {self.stop!r})")
        if not (np.isfinite(self.step) and self.step > 0):
            raise ValidationError(f"step must be > 0, got {self.step!r}")
        if not (np.isfinite(self.dwell) and self.dwell > 0):
            raise ValidationError(f"dwell must be > 0, got {self.dwell!r}")
        if not (np.isfinite(self.aperture) and self.aperture >= 0):
            raise ValidationError(f"aperture must be >= 0, got {self.aperture!r}")
        for name in ("herald_rate", "signal_rate", "background_rate"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise ValidationError(f"{name} must be >= 0, got {value!r}")
        if not 0.0 <= self.pair_efficiency <= 1.0:
            raise ValidationError(f"pair_efficiency must lie in [0, 1], got {self.pair_efficiency!r}")
        if not (np.isfinite(self.coincidence_window) and self.coincidence_window > 0):
            raise ValidationError(f"coincidence_window must be > 0, got {self.coincidence_window!r}")
        object.__setattr__(self, "seed", streams.check_seed(self.seed))

    @property
    def n_points(self):
        # tolerate step values rounded in the last digits
        return int(math.floor((self.stop - self.start) / self.step + 1e-6)) + 1

    @property
    def positions(self):
        return self.start + self.step * np.arange(self.n_points)

    @property
    def peak_coincidence_rate(self):
        """Mean coincidence rate (true plus accidental) at the pattern maximum."""
        signal = self.signal_rate + self.background_rate
        return self.herald_rate * (self.pair_efficiency + signal * self.coincidence_window)


@dataclass(frozen=True)
class ScanRecord:
    position: float
    dwell: float
    coincidences: int
    singles_signal: int
    singles_herald: int

    def __post_init__(self):
        counts = (self.coincidences, self.singles_signal, self.singles_herald)
        if min(counts) < 0:
            raise ValidationError(f"counts must be >= 0, got {counts}")
        if self.coincidences > min(self.singles_signal, self.singles_herald):
            raise ValidationError("coincidences exceed a singles count")
        if not self.dwell > 0:
            raise ValidationError(f"dwell must be > 0, got {self.dwell!r}")


@dataclass(frozen=True)
class G2Result:
    n_gate: int
    n_gt: int
    n_gr: int
    n_gtr: int
    g2: float
    std_error: float


class PositionSampler:
    """Inverse-CDF sampler for a density tabulated on a regular grid.

    The density is treated as piecewise linear between grid nodes; a draw
    picks a cell from the cumulative cell masses and then inverts the linear
    density inside the cell exactly.
    """

    def __init__(self, edges, values):
        self.edges = np.asarray(edges, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != self.edges.shape or self.edges.ndim != 1:
            raise ValidationError("edges and values must be 1-D arrays of equal length")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise ValidationError("density must be finite and non-negative")
        widths = np.diff(self.edges)
        mass = 0.5 * (self.values[:-1] + self.values[1:]) * widths
        total = mass.sum()
        if not total > 0:
            raise ValidationError("degenerate density: zero everywhere on the range")
        self.cdf = np.concatenate([[0.0], np.cumsum(mass) / total])
        self._mass = mass

    def sample(self, rng, size):
        u = rng.random(size)
        cell = np.searchsorted(self.cdf, u, side="right") - 1
        # u landing in a zero-mass cell cannot happen: searchsorted skips them
        cell = np.clip(cell, 0, len(self._mass) - 1)
        lo, hi = self.cdf[cell], self.cdf[cell + 1]
        frac = np.where(hi > lo, (u - lo) / np.where(hi > lo, hi - lo, 1.0), 0.5)
        f0, f1 = self.values[cell], self.values[cell + 1]
        # solve f0 t + (f1 - f0) t^2 / 2 = frac (f0 + f1) / 2 for t in [0, 1]
        root = np.sqrt(f0 * f0 + frac * (f1 * f1 - f0 * f0))
        denom = f0 + root
        t = np.where(denom > 0, frac * (f0 + f1) / np.where(denom > 0, denom, 1.0), frac)
        left = self.edges[cell]
        return left + np.clip(t, 0.0, 1.0) * (self.edges[cell + 1] - left)

    def pdf(self, x):
        """Normalized tabulated density (linear interpolation)."""
        norm = self._mass.sum()
        return np.interp(x, self.edges, self.values, left=0.0, right=0.0) / norm


def build_sampler(density: Callable, lo, hi, cells=8192):
    """Tabulate ``density`` on ``[lo, hi]`` and return a :class:`PositionSampler`."""
    if not lo < hi:
        raise ValidationError(f"sampling range must satisfy lo < hi, got [{lo!r}, {hi!r}]")
    if cells < 4096:
        raise ValidationError("at least 4096 cells are required")
    edges = np.linspace(lo, hi, cells + 1)
    values = np.asarray(density(edges), dtype=float)
    return PositionSampler(edges, values)


def simulate_point(position, cfg: ScanConfig, density: Callable, index=0):
    """Simulate one stage position.

    ``density`` maps positions to the relative rate (1 at the pattern
    peak); it is averaged over the collection aperture here.  Draws come from
    streams keyed on ``(cfg.seed, index, channel)``.
    """
    g = float(aperture_average(density, position, cfg.aperture))
    g = max(g, 0.0)
    T = cfg.dwell
    true_rate = cfg.herald_rate * cfg.pair_efficiency * g
    signal_rate = cfg.signal_rate * g + cfg.background_rate
    accidental_rate = cfg.herald_rate * signal_rate * cfg.coincidence_window

    seed = cfg.seed
    n_true = int(streams.stream(seed, index, streams.TRUE_PAIRS).poisson(true_rate * T))
    n_acc = int(streams.stream(seed, index, streams.ACCIDENTALS).poisson(accidental_rate * T))
    coincidences = n_true + n_acc
    rest_signal = max(signal_rate - true_rate - accidental_rate, 0.0)
    rest_herald = max(cfg.herald_rate - true_rate - accidental_rate, 0.0)
    singles_signal = coincidences + int(
        streams.stream(seed, index, streams.SIGNAL_SINGLES).poisson(rest_signal * T))
    singles_herald = coincidences + int(
        streams.stream(seed, index, streams.HERALD_SINGLES).poisson(rest_herald * T))
    return ScanRecord(float(position), float(T), coincidences, singles_signal, singles_herald)


def _base_density(p, e, model):
    if e is not None or model == "eraser":
        setup = e if e is not None else EraserSetup()
        return lambda x: eraser_density(x, p, setup)
    if model == "partial":
        return lambda x: partial_coherence_density(x, p)
    if model == "double":
        return lambda x: double_slit_density(x, p)
    if model == "single":
        return lambda x: single_slit_density(x, p)
    raise ValidationError(f"unknown model {model!r}; expected one of {MODELS}")


def scan_density(cfg: ScanConfig, p: PatternParams, e: Optional[EraserSetup] = None,
                 model="partial"):
    """Relative-rate function used by :func:`run_scan` (aperture-averaged peak = 1)."""
    base = _base_density(p, e, model)
    grid = np.union1d(np.linspace(cfg.start, cfg.stop, 4097), cfg.positions)
    if p.center not in grid and cfg.start <= p.center <= cfg.stop:
        grid = np.append(grid, p.center)
    peak = float(np.max(aperture_average(base, grid, cfg.aperture)))
    if not peak > 0:
        raise ValidationError("degenerate density: pattern is zero over the scan range")
    return lambda x: base(x) / peak


def run_scan(cfg: ScanConfig, p: PatternParams, e: Optional[EraserSetup] = None,
             model="partial", max_workers=None):
    """Simulate a full stage scan, one :class:`ScanRecord` per position.

    ``model`` selects the pattern (``partial``, ``double``, ``single``);
    passing an :class:`EraserSetup` selects the eraser pattern.  The output
    depends only on the arguments, never on ``max_workers``.
    """
    density = scan_density(cfg, p, e, model)
    positions = cfg.positions

    def one(i):
        return simulate_point(positions[i], cfg, density, index=i)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(one, range(len(positions))))
    return [one(i) for i in range(len(positions))]


def run_g2(cfg: ScanConfig, splitter_ratio, dwell_total):
    """Three-detector second-order coherence measurement.

    Each herald (gate) event opens a coincidence window.  With probability
    ``pair_efficiency`` its partner reaches the beam splitter and goes to
    detector T with probability ``splitter_ratio``, otherwise to R.  The rest
    of the scan-arm singles (unpaired photons plus background) are split the
    same way and fire independently inside the window.  The aperture sits at
    the pattern peak.
    """
    if not 0.0 < splitter_ratio < 1.0:
        raise ValidationError(f"splitter_ratio must lie in (0, 1), got {splitter_ratio!r}")
    if not (np.isfinite(dwell_total) and dwell_total > 0):
        raise ValidationError(f"dwell_total must be > 0, got {dwell_total!r}")

    eta = cfg.pair_efficiency
    uncorrelated = max(cfg.signal_rate - cfg.herald_rate * eta, 0.0) + cfg.background_rate
    tau = cfg.coincidence_window
    p_t = -math.expm1(-splitter_ratio * uncorrelated * tau)
    p_r = -math.expm1(-(1.0 - splitter_ratio) * uncorrelated * tau)
    a = eta * splitter_ratio
    b = eta * (1.0 - splitter_ratio)
    none = 1.0 - a - b
    # per-gate outcome: (T and R, T only, R only, neither)
    both = a * p_r + b * p_t + none * p_t * p_r
    t_only = a * (1.0 - p_r) + none * p_t * (1.0 - p_r)
    r_only = b * (1.0 - p_t) + none * (1.0 - p_t) * p_r
    probs = np.array([both, t_only, r_only, max(1.0 - both - t_only - r_only, 0.0)])
    probs /= probs.sum()

    rng = streams.stream(cfg.seed, streams.G2_EVENTS)
    n_gate = int(rng.poisson(cfg.herald_rate * dwell_total))
    n_both, n_t, n_r, _ = (int(v) for v in rng.multinomial(n_gate, probs))
    n_gt, n_gr, n_gtr = n_both + n_t, n_both + n_r, n_both
    if n_gate == 0 or n_gt == 0 or n_gr == 0:
        raise InsufficientCountsError(
            f"insufficient counts for g2: N_G={n_gate}, N_GT={n_gt}, N_GR={n_gr}")
    scale = n_gate / (n_gt * n_gr)
    g2 = n_gtr * scale
    if n_gtr > 0:
        err = g2 * math.sqrt(1.0 / n_gtr + 1.0 / n_gt + 1.0 / n_gr + 1.0 / n_gate)
    else:
        # one-count scale when no triples were seen
        err = scale
    return G2Result(n_gate, n_gt, n_gr, n_gtr, g2, err)


def g2_preset(name, seed=0):
    """Scan configurations for the three reference g2 experiments.

    ``heralded``
        efficient pairs, 5 ns window, only dark counts as uncorrelated light.
    ``poissonian``
        no pairs at all: the scan arm sees 20,000/s of uncorrelated light,
        an attenuated laser standing in for the pair source.
    ``tabletop``
        the default scan rates (3,000 and 35,000 singles/s, 5.95 true
        pairs/s) with a long 60 ns window, so accidentals rival the pairs.
    """
    if name == "heralded":
        return ScanConfig(herald_rate=35_000.0, signal_rate=1_750.0, pair_efficiency=0.05,
                          coincidence_window=5e-9, background_rate=100.0, seed=seed)
    if name == "poissonian":
        return ScanConfig(herald_rate=35_000.0, signal_rate=20_000.0, pair_efficiency=0.0,
                          coincidence_window=60e-9, seed=seed)
    if name == "tabletop":
        return ScanConfig(coincidence_window=60e-9, seed=seed)
    raise ValidationError(f"unknown g2 preset {name!r}; expected heralded, poissonian or tabletop")
