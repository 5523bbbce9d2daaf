"""Weighted Levenberg-Marquardt fits of slit patterns to scan data.

The residual of bin ``i`` is ``(n_i - t_i * rate(x_i)) / sqrt(max(n_i, 1))``,
Poisson weights with a floor for empty bins.  ``rate`` is one of the pattern
models averaged over the collection aperture.  Uncertainties come from the
inverse normal matrix at the solution scaled by the reduced chi-square.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np

from .errors import DegenerateFitError, ValidationError
from .pattern import (
    EraserSetup,
    PatternParams,
    _GL_NODES,
    _GL_WEIGHTS,
    _sinc_sq_prime,
    double_form,
    eraser_amplitudes,
    eraser_form,
    partial_form,
    partial_form_gradient,
    sinc_sq,
    single_form,
    wrap_phase,
)

__all__ = [
    "MODEL_PARAMS",
    "FitProblem",
    "FitResult",
    "InitialGuess",
    "residuals",
    "jacobian",
    "analytic_jacobian",
    "levenberg_marquardt",
    "minimize_lm",
    "LMSolution",
    "initial_guess",
    "fit_scan",
    "default_bounds",
]

_ALL = ("wavelength", "slit_separation", "slit_width", "screen_distance",
        "peak_rate", "visibility", "phase", "center")

MODEL_PARAMS = {
    "partial": _ALL,
    "eraser": _ALL,
    "double": ("wavelength", "slit_separation", "slit_width", "screen_distance",
               "peak_rate", "center"),
    "single": ("wavelength", "slit_width", "screen_distance", "peak_rate", "center"),
}

DEFAULT_FREE = {
    "partial": ("peak_rate", "slit_separation", "slit_width", "visibility", "phase", "center"),
    "eraser": ("peak_rate", "slit_separation", "slit_width", "visibility", "phase", "center"),
    "double": ("peak_rate", "slit_separation", "slit_width", "center"),
    "single": ("peak_rate", "slit_width", "center"),
}

FD_RELATIVE_STEP = 1e-6
FD_ABSOLUTE_STEP = 1e-12


@dataclass
class FitProblem:
    """Scan data, a pattern model and the split into free and fixed parameters.

    ``free`` maps each free parameter name to its ``(lower, upper)`` bounds, in
    the order used for parameter vectors.  ``fixed`` holds values for every
    other parameter of the model.
    """

    positions: np.ndarray
    counts: np.ndarray
    dwell: np.ndarray
    model: str
    free: Dict[str, Tuple[float, float]]
    fixed: Dict[str, float]
    aperture: float = 0.0
    eraser: Optional[EraserSetup] = None

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        self.counts = np.asarray(self.counts, dtype=float)
        self.dwell = np.broadcast_to(np.asarray(self.dwell, dtype=float), self.positions.shape).copy()
        if self.model not in MODEL_PARAMS:
            raise ValidationError(f"unknown model {self.model!r}; expected one of {tuple(MODEL_PARAMS)}")
        if self.positions.ndim != 1 or self.counts.shape != self.positions.shape:
            raise ValidationError("positions and counts must be 1-D arrays of equal length")
        if np.any(self.counts < 0) or not np.all(np.isfinite(self.counts)):
            raise ValidationError("counts must be finite and non-negative")
        if np.any(self.dwell <= 0):
            raise ValidationError("dwell times must be positive")
        if self.aperture < 0:
            raise ValidationError("aperture must be >= 0")
        wanted = set(MODEL_PARAMS[self.model])
        given = set(self.free) | set(self.fixed)
        if set(self.free) & set(self.fixed):
            raise ValidationError(f"parameters both free and fixed: {sorted(set(self.free) & set(self.fixed))}")
        if given != wanted:
            missing, extra = sorted(wanted - given), sorted(given - wanted)
            raise ValidationError(f"model {self.model!r}: missing {missing}, unexpected {extra}")
        for name, (lo, hi) in self.free.items():
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValidationError(f"bounds for {name} must be finite and ordered, got ({lo}, {hi})")
        if len(self.positions) < 2 * len(self.free):
            raise ValidationError(
                f"{len(self.positions)} data points for {len(self.free)} free parameters; "
                "need at least twice as many points")
        if self.model == "eraser":
            self._amps = eraser_amplitudes(self.eraser if self.eraser is not None else EraserSetup())
        self.sigma = np.sqrt(np.maximum(self.counts, 1.0))

    @property
    def free_names(self):
        return tuple(self.free)

    @property
    def lower(self):
        return np.array([lo for lo, _ in self.free.values()])

    @property
    def upper(self):
        return np.array([hi for _, hi in self.free.values()])

    def values(self, params):
        out = dict(self.fixed)
        out.update(zip(self.free_names, np.asarray(params, dtype=float)))
        return out

    def _pointwise(self, x, v):
        if self.model == "partial":
            return partial_form(x, **v)
        if self.model == "double":
            return double_form(x, **v)
        if self.model == "single":
            return single_form(x, **v)
        return eraser_form(x, self._amps, **v)

    def rate(self, params, x=None):
        """Model count rate at ``x`` (default: the data positions)."""
        v = self.values(params)
        x = self.positions if x is None else np.asarray(x, dtype=float)
        if self.aperture == 0:
            return self._pointwise(x, v)
        nodes = x[:, None] + 0.5 * self.aperture * _GL_NODES
        return 0.5 * (self._pointwise(nodes, v) @ _GL_WEIGHTS)

    def project(self, params):
        """Canonical form of a parameter vector, clamped into the bounds.

        A negative visibility is traded for a half-turn of the phase when
        both are free; the phase is wrapped into (-pi, pi].
        """
        params = np.array(params, dtype=float)
        names = self.free_names
        if "phase" in names:
            k = names.index("phase")
            if "visibility" in names:
                j = names.index("visibility")
                if params[j] < 0:
                    params[j] = -params[j]
                    params[k] += math.pi
            params[k] = wrap_phase(params[k])
        return np.clip(params, self.lower, self.upper)


def residuals(problem: FitProblem, params):
    """Poisson-weighted residual vector."""
    return (problem.counts - problem.dwell * problem.rate(params)) / problem.sigma


def jacobian(problem: FitProblem, params):
    """Central finite-difference Jacobian of :func:`residuals`."""
    params = np.asarray(params, dtype=float)
    J = np.empty((len(problem.positions), len(params)))
    for j in range(len(params)):
        h = max(FD_RELATIVE_STEP * abs(params[j]), FD_ABSOLUTE_STEP)
        up, down = params.copy(), params.copy()
        up[j] += h
        down[j] -= h
        J[:, j] = (residuals(problem, up) - residuals(problem, down)) / (2.0 * h)
    return J


def _single_gradient(x, wavelength, slit_width, screen_distance, peak_rate, center):
    scale = np.pi / (wavelength * screen_distance)
    u = x - center
    b = slit_width * scale * u
    d_beta = peak_rate * _sinc_sq_prime(b)
    return {
        "peak_rate": sinc_sq(b) * np.ones_like(u),
        "slit_width": d_beta * scale * u,
        "center": -d_beta * slit_width * scale,
        "wavelength": -d_beta * b / wavelength,
        "screen_distance": -d_beta * b / screen_distance,
    }


def _pointwise_gradient(model, x, v):
    if model == "single":
        return _single_gradient(x, **v)
    if model == "double":
        return partial_form_gradient(x, visibility=1.0, phase=0.0, **v)
    return partial_form_gradient(x, **v)


def analytic_jacobian(problem: FitProblem, params):
    """Closed-form Jacobian of :func:`residuals` for the partial, double and single models."""
    if problem.model == "eraser":
        raise ValidationError("no closed-form Jacobian for the eraser model")
    v = problem.values(params)
    x = problem.positions
    if problem.aperture == 0:
        grad = _pointwise_gradient(problem.model, x, v)
        cols = [grad[name] for name in problem.free_names]
    else:
        nodes = x[:, None] + 0.5 * problem.aperture * _GL_NODES
        grad = _pointwise_gradient(problem.model, nodes, v)
        cols = [0.5 * (grad[name] @ _GL_WEIGHTS) for name in problem.free_names]
    J = np.column_stack(cols)
    return -(problem.dwell / problem.sigma)[:, None] * J


@dataclass
class FitResult:
    model: str
    names: Tuple[str, ...]
    estimates: Dict[str, float]
    errors: Dict[str, float]
    covariance: np.ndarray
    reduced_chi_square: float
    iterations: int
    converged: bool
    cost: float
    n_data: int
    message: str = ""
    fixed: Dict[str, float] = field(default_factory=dict)
    cost_history: list = field(default_factory=list)
    guess_fallback: bool = False
    notes: list = field(default_factory=list)

    @property
    def params(self):
        return np.array([self.estimates[n] for n in self.names])

    def value(self, name):
        return self.estimates[name] if name in self.estimates else self.fixed[name]

    def pattern_params(self):
        """Fitted values as :class:`PatternParams` (fields the model lacks take defaults)."""
        merged = dict(self.fixed)
        merged.update(self.estimates)
        keys = set(PatternParams.__dataclass_fields__)
        return PatternParams(**{k: v for k, v in merged.items() if k in keys})


def _column_scale(J):
    c = np.linalg.norm(J, axis=0)
    return np.where(c > 0, c, 1.0)


def _covariance(problem, params, jac_fn, reduced_chi2):
    J = jac_fn(problem, params)
    c = _column_scale(J)
    Js = J / c
    A = Js.T @ Js
    w, vecs = np.linalg.eigh(A)
    zero_col = np.linalg.norm(J, axis=0) == 0
    if np.any(zero_col) or w[0] <= 1e-13 * w[-1]:
        null = vecs[:, 0]
        combo = {n: float(round(x, 6)) for n, x in zip(problem.free_names, null) if abs(x) > 0.05}
        raise DegenerateFitError(
            "degenerate fit: normal equations are singular along "
            + " ".join(f"{x:+.3f}*{n}" for n, x in combo.items()),
            combination=combo,
        )
    inv = (vecs / w) @ vecs.T
    return inv / np.outer(c, c) * reduced_chi2


class LMSolution(NamedTuple):
    x: np.ndarray
    cost: float
    iterations: int
    converged: bool
    message: str
    cost_history: list


def minimize_lm(fun, jac, x0, project=None, max_iter=200, ftol=1e-10, gtol=1e-10):
    """Minimize ``0.5 * sum(fun(x)**2)`` by damped Gauss-Newton steps.

    Steps are solved in column-scaled form with a Marquardt damping term and
    passed through ``project`` (bounds, canonical forms) before evaluation.
    Only steps that lower the cost are accepted, so ``cost_history`` is
    non-increasing.  Stops when the relative cost decrease or the scaled
    gradient drops below its tolerance, or after ``max_iter`` Jacobian
    evaluations.
    """
    if project is None:
        project = lambda v: np.asarray(v, dtype=float)  # noqa: E731
    x = project(np.asarray(x0, dtype=float))
    r = fun(x)
    cost = 0.5 * float(r @ r)
    history = [cost]
    mu, nu = 1e-3, 2.0
    converged, message = False, "maximum iterations reached"
    iterations = 0

    while iterations < max_iter:
        iterations += 1
        J = jac(x)
        c = _column_scale(J)
        Js = J / c
        g = Js.T @ r
        rnorm = math.sqrt(2.0 * cost)
        if rnorm == 0 or np.max(np.abs(g)) <= gtol * rnorm:
            converged, message = True, "gradient below tolerance"
            break
        A = Js.T @ Js
        accepted = False
        while not accepted:
            try:
                ds = np.linalg.solve(A + mu * np.eye(len(x)), -g)
            except np.linalg.LinAlgError:
                ds = None
            if ds is None or not np.all(np.isfinite(ds)):
                mu *= nu
                nu *= 2.0
                if mu > 1e20:
                    break
                continue
            trial = project(x + ds / c)
            r_trial = fun(trial)
            cost_trial = 0.5 * float(r_trial @ r_trial)
            predicted = 0.5 * ds @ (A @ ds) + mu * ds @ ds
            if np.isfinite(cost_trial) and cost_trial < cost:
                rho = (cost - cost_trial) / predicted if predicted > 0 else 0.0
                mu *= max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0) ** 3)
                nu = 2.0
                accepted = True
            else:
                mu *= nu
                nu *= 2.0
                if mu > 1e20:
                    break
        if not accepted:
            converged, message = True, "no further decrease possible"
            break
        relative = (cost - cost_trial) / cost
        x, r, cost = trial, r_trial, cost_trial
        history.append(cost)
        if relative < ftol:
            converged, message = True, "relative cost change below tolerance"
            break
    return LMSolution(x, cost, iterations, converged, message, history)


def levenberg_marquardt(problem: FitProblem, initial, max_iter=200, ftol=1e-10, gtol=1e-10,
                        jac="auto"):
    """Fit ``problem`` from ``initial`` with :func:`minimize_lm`.

    ``jac`` is ``"analytic"``, ``"numeric"`` or ``"auto"`` (analytic where a
    closed form exists).  Raises :class:`DegenerateFitError` when the normal
    matrix at the solution is singular.
    """
    if jac == "auto":
        jac = "analytic" if problem.model != "eraser" else "numeric"
    jac_fn = analytic_jacobian if jac == "analytic" else jacobian
    x0 = np.asarray(initial, dtype=float)
    if x0.shape != (len(problem.free),):
        raise ValidationError(f"initial vector must have {len(problem.free)} entries")
    if np.any(x0 < problem.lower) or np.any(x0 > problem.upper):
        raise ValidationError("initial parameters lie outside their bounds")

    sol = minimize_lm(lambda v: residuals(problem, v), lambda v: jac_fn(problem, v), x0,
                      project=problem.project, max_iter=max_iter, ftol=ftol, gtol=gtol)
    x, cost = sol.x, sol.cost
    dof = len(problem.positions) - len(x)
    reduced = 2.0 * cost / dof
    try:
        cov = _covariance(problem, x, jac_fn, reduced)
    except DegenerateFitError as err:
        err.estimates = dict(zip(problem.free_names, map(float, x)))
        raise
    errs = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    names = problem.free_names
    return FitResult(
        model=problem.model,
        names=names,
        estimates={n: float(v) for n, v in zip(names, x)},
        errors={n: float(e) for n, e in zip(names, errs)},
        covariance=0.5 * (cov + cov.T),
        reduced_chi_square=reduced,
        iterations=sol.iterations,
        converged=sol.converged,
        cost=cost,
        n_data=len(problem.positions),
        message=sol.message,
        fixed=dict(problem.fixed),
        cost_history=sol.cost_history,
    )


# -- initial guesses ---------------------------------------------------------


class InitialGuess(NamedTuple):
    values: Dict[str, float]
    fallback_used: bool
    notes: list


def _boxcar(y, width):
    width = max(int(width), 1)
    if width == 1:
        return y.copy()
    kernel = np.ones(width) / width
    padded = np.pad(y, width, mode="edge")
    return np.convolve(padded, kernel, mode="same")[width:-width]


# peak periodogram power, in units of the expected Poisson noise power, above
# which a fringe period is accepted; pure noise rarely exceeds 8
FRINGE_SIGNIFICANCE = 15.0
MIN_PERIODOGRAM_POINTS = 128
# an envelope minimum needs a rise of this fraction of the peak (plus 3 sigma)
ENVELOPE_RISE = 0.005


def _fringe_period(x, rate, variance, x0, step):
    """Dominant period of the central region and its significance."""
    span = x[-1] - x[0]
    region = np.abs(x - x0) <= span / 4
    if region.sum() < MIN_PERIODOGRAM_POINTS:
        # short scans: the central half may not hold a full fringe
        region = np.ones_like(x, dtype=bool)
    xs, ys = x[region], rate[region]
    trend = np.polyval(np.polyfit(xs - x0, ys, 4), xs - x0)
    window = np.hanning(len(ys))
    resid = (ys - trend) * window
    nfft = 16 * int(2 ** math.ceil(math.log2(len(ys))))
    power = np.abs(np.fft.rfft(resid, nfft)) ** 2
    freqs = np.fft.rfftfreq(nfft, step)
    width = xs[-1] - xs[0]
    usable = freqs >= 2.0 / width
    if not np.any(usable) or not np.any(power[usable] > 0):
        return None, 0.0
    k = np.argmax(power[usable])
    noise = float(np.sum(window**2 * variance[region]))
    significance = float(power[usable][k] / noise) if noise > 0 else math.inf
    return 1.0 / freqs[usable][k], significance


def _first_minimum(xs, smooth, start, direction, floor, noise):
    # walk outward until the profile rises clearly above its running minimum
    i = start
    best_i, best = i, smooth[i]
    while 0 <= i < len(smooth):
        if smooth[i] < best:
            best_i, best = i, smooth[i]
        elif smooth[i] > best + floor + 3.0 * noise(best, smooth[i]):
            return xs[best_i]
        i += direction
    return None


def initial_guess(positions, counts, dwell, model, wavelength, screen_distance, fallback=None):
    """Data-driven starting point for :func:`levenberg_marquardt`.

    * centre: rate-weighted centroid;
    * fringe period: peak of a periodogram of the detrended central region,
      converted with ``d = lambda L / period``; a peak that does not stand
      ``FRINGE_SIGNIFICANCE`` times above the Poisson noise power counts as
      no fringes, and the visibility guess is then zero;
    * slit width: distance between the first minima of the smoothed profile
      either side of the centre, converted with ``b = 2 lambda L / width``;
    * visibility: ``(max - min) / (max + min)`` of the central maximum and its
      neighbouring minima;
    * amplitude: from the maximum rate; phase starts at zero.

    If the envelope minima cannot be located the entries of ``fallback`` are
    used instead (or a half-maximum width estimate if none is given) and
    ``fallback_used`` is set.
    """
    if model not in MODEL_PARAMS:
        raise ValidationError(f"unknown model {model!r}")
    x = np.asarray(positions, dtype=float)
    order = np.argsort(x)
    x = x[order]
    n = np.asarray(counts, dtype=float)[order]
    t = np.broadcast_to(np.asarray(dwell, dtype=float), np.shape(positions))[order]
    rate = n / t
    lam_L = wavelength * screen_distance
    fallback = dict(fallback or {})
    notes = []
    used_fallback = False
    step = float(np.median(np.diff(x))) if len(x) > 1 else 1.0

    total = rate.sum()
    x0 = float((rate * x).sum() / total) if total > 0 else float(np.mean(x))
    guess = {"wavelength": wavelength, "screen_distance": screen_distance,
             "center": x0, "phase": 0.0}

    two_slit = model != "single"
    period = None
    if two_slit:
        variance = np.maximum(n, 1.0) / t**2
        candidate, significance = _fringe_period(x, rate, variance, x0, step)
        if candidate is not None and significance >= FRINGE_SIGNIFICANCE:
            period = candidate
            d = lam_L / period
        else:
            used_fallback = True
            notes.append("no significant fringe period")
            d = fallback.get("slit_separation")
            if d is None and candidate is not None:
                d = lam_L / candidate
        if d is not None:
            guess["slit_separation"] = float(d)

    window = round(period / step) if period else max(3, len(x) // 25)
    smooth = _boxcar(rate, window)
    peak_i = int(np.argmin(np.abs(x - x0)))
    # climb to the local maximum of the smoothed profile near the centroid
    lo, hi = max(peak_i - window, 0), min(peak_i + window + 1, len(x))
    peak_i = lo + int(np.argmax(smooth[lo:hi]))
    peak = smooth[peak_i]
    t_typ = float(np.median(t))

    def noise(a, b):
        # standard deviation of the difference of two smoothed rates
        counts = (max(a, 0.0) + max(b, 0.0)) * t_typ * window
        return math.sqrt(max(counts, 1.0)) / (t_typ * window)

    left = _first_minimum(x, smooth, peak_i, -1, ENVELOPE_RISE * peak, noise)
    right = _first_minimum(x, smooth, peak_i, +1, ENVELOPE_RISE * peak, noise)
    if left is not None and right is not None:
        width = right - left
    elif left is not None or right is not None:
        width = 2.0 * abs((left if left is not None else right) - x[peak_i])
        notes.append("only one envelope minimum found")
    else:
        width = None
    if width is not None and width > 0:
        guess["slit_width"] = 2.0 * lam_L / width
    else:
        used_fallback = True
        notes.append("envelope minima not found")
        if "slit_width" in fallback:
            guess["slit_width"] = float(fallback["slit_width"])
        else:
            above = x[smooth >= 0.5 * peak]
            fwhm = max(above[-1] - above[0], step) if len(above) else x[-1] - x[0]
            # sinc^2 falls to 1/2 at beta = 1.3916
            guess["slit_width"] = 2.0 * 1.3916 * lam_L / (np.pi * fwhm)

    if two_slit and period:
        fine = _boxcar(rate, max(round(period / (8 * step)), 1))
        centre = np.abs(x - x0) <= period / 4
        sides = np.abs(np.abs(x - x0) - period / 2) <= period / 4
        top = float(np.max(fine[centre])) if centre.any() else float(np.max(fine))
        bottom = float(np.mean([np.min(fine[sides & (x < x0)]) if np.any(sides & (x < x0)) else top,
                                np.min(fine[sides & (x > x0)]) if np.any(sides & (x > x0)) else top]))
        vis = (top - bottom) / (top + bottom) if top + bottom > 0 else 0.0
        vis = float(np.clip(vis, 0.0, 1.0))
    else:
        top = float(np.max(_boxcar(rate, 3)))
        vis = 0.0
    guess["visibility"] = vis
    if model in ("partial", "eraser"):
        guess["peak_rate"] = 2.0 * top / (1.0 + vis)
    else:
        guess["peak_rate"] = top
    if model == "single":
        guess.pop("slit_separation", None)
    for k, v in fallback.items():
        guess.setdefault(k, v)
    keep = MODEL_PARAMS[model]
    return InitialGuess({k: float(v) for k, v in guess.items() if k in keep}, used_fallback, notes)


def default_bounds(name, positions, counts, dwell):
    x = np.asarray(positions, dtype=float)
    rate = np.asarray(counts, dtype=float) / np.asarray(dwell, dtype=float)
    table = {
        "slit_separation": (1e-6, 1e-2),
        "slit_width": (1e-6, 5e-3),
        "peak_rate": (0.0, 100.0 * float(np.max(rate)) + 10.0),
        "visibility": (0.0, 1.0),
        "phase": (-math.pi, math.pi),
        "center": (float(np.min(x)), float(np.max(x))),
        "wavelength": (100e-9, 5e-6),
        "screen_distance": (1e-2, 100.0),
    }
    return table[name]


def fit_scan(positions, counts, dwell, model="partial", *, wavelength=810e-9,
             screen_distance=1.52, aperture=0.0, free=None, fixed=None, bounds=None,
             initial=None, eraser=None, fallback=None, jac="auto", max_iter=200):
    """Fit a pattern model to scan data in one call.

    Parameters not listed in ``free`` are held at ``fixed`` values (wavelength
    and screen distance default to the apparatus values).  Starting values
    come from :func:`initial_guess`, overridden by ``initial``.
    """
    if model not in MODEL_PARAMS:
        raise ValidationError(f"unknown model {model!r}; expected one of {tuple(MODEL_PARAMS)}")
    free = tuple(free) if free is not None else DEFAULT_FREE[model]
    fixed = dict(fixed or {})
    unknown = (set(free) | set(fixed)) - set(MODEL_PARAMS[model])
    if unknown:
        raise ValidationError(f"model {model!r} has no parameters {sorted(unknown)}")
    guess = initial_guess(positions, counts, dwell, model, fixed.get("wavelength", wavelength),
                          fixed.get("screen_distance", screen_distance), fallback=fallback)
    start = dict(guess.values)
    start.update(initial or {})
    fixed_all = {}
    for name in MODEL_PARAMS[model]:
        if name in free:
            continue
        if name in fixed:
            fixed_all[name] = float(fixed[name])
        elif name == "wavelength":
            fixed_all[name] = wavelength
        elif name == "screen_distance":
            fixed_all[name] = screen_distance
        elif name in start:
            fixed_all[name] = float(start[name])
        else:
            raise ValidationError(f"no value for fixed parameter {name!r}")
    bounds = dict(bounds or {})
    free_bounds = {n: tuple(bounds.get(n, default_bounds(n, positions, counts, dwell))) for n in free}
    problem = FitProblem(positions, counts, dwell, model, free_bounds, fixed_all,
                         aperture=aperture, eraser=eraser)
    x0 = np.clip([start[n] for n in free], problem.lower, problem.upper)
    result = levenberg_marquardt(problem, x0, jac=jac, max_iter=max_iter)
    result.guess_fallback = guess.fallback_used
    result.notes = list(guess.notes)
    if "phase" in free and "center" in free:
        result.notes.append("phase and centre both free")
    return result
