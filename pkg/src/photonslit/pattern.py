"""Far-field (Fraunhofer) single-photon slit patterns.

Closed-form count-rate densities for one and two slits, spatial coherence of
a Gaussian SPDC source, pump focusing, and the polarization quantum eraser.

All lengths are SI metres and all angles radians.  Positions ``x`` are
measured on the detection plane, which sits at the focal plane of a lens of
focal length ``L`` behind the slits, so the small-angle relation
``sin(theta) ~ x / L`` holds throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import ValidationError

__all__ = [
    "PatternParams",
    "SourceModel",
    "EraserSetup",
    "EraserAmplitudes",
    "wrap_phase",
    "alpha",
    "beta",
    "sinc_sq",
    "double_slit_density",
    "partial_coherence_density",
    "single_slit_density",
    "envelope_width",
    "fringe_spacing",
    "focused_waist",
    "source_angular_size",
    "visibility_gaussian_source",
    "eraser_amplitudes",
    "eraser_density",
    "aperture_average",
    "aperture_averaged_density",
    "QUADRATURE_ORDER",
]

# Fixed Gauss-Legendre order used for every aperture average.
QUADRATURE_ORDER = 33
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(QUADRATURE_ORDER)

_SINC_SERIES_CUTOFF = 1e-8


def wrap_phase(phase):
    """Map an angle onto the half-open interval (-pi, pi]."""
    wrapped = math.remainder(float(phase), 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def _require_positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise ValidationError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class PatternParams:
    """Geometry and amplitude of a slit pattern.

    Defaults are the double-slit reticle and lens of the tabletop apparatus
    (810 nm photons, d = 0.62 mm, b = 0.13 mm, L = 1.52 m).  ``peak_rate``
    is the prefactor of the density in counts per second; ``phase`` is
    wrapped into (-pi, pi] on construction.
    """

    wavelength: float = 810e-9
    slit_separation: float = 0.62e-3
    slit_width: float = 0.13e-3
    screen_distance: float = 1.52
    peak_rate: float = 1.0
    visibility: float = 1.0
    phase: float = 0.0
    center: float = 0.0

    def __post_init__(self):
        _require_positive("wavelength", self.wavelength)
        _require_positive("slit_width", self.slit_width)
        _require_positive("screen_distance", self.screen_distance)
        if not np.isfinite(self.slit_separation) or self.slit_separation < self.slit_width:
            raise ValidationError(
                "slit_separation must be >= slit_width "
                f"(got d={self.slit_separation!r}, b={self.slit_width!r})"
            )
        if not (np.isfinite(self.peak_rate) and self.peak_rate >= 0):
            raise ValidationError(f"peak_rate must be >= 0, got {self.peak_rate!r}")
        if not (0.0 <= self.visibility <= 1.0):
            raise ValidationError(f"visibility must lie in [0, 1], got {self.visibility!r}")
        if not np.isfinite(self.phase):
            raise ValidationError(f"phase must be finite, got {self.phase!r}")
        if not np.isfinite(self.center):
            raise ValidationError(f"center must be finite, got {self.center!r}")
        object.__setattr__(self, "phase", wrap_phase(self.phase))


@dataclass(frozen=True)
class SourceModel:
    """Pump beam feeding the down-conversion crystal."""

    pump_wavelength: float = 405e-9
    pump_waist: float = 0.52e-3
    focus_length: float = 0.25
    crystal_distance: float = 0.30

    def __post_init__(self):
        for name in ("pump_wavelength", "pump_waist", "focus_length", "crystal_distance"):
            _require_positive(name, getattr(self, name))


@dataclass(frozen=True)
class EraserSetup:
    """Polarizers of the quantum-eraser configuration.

    Angles are transmission axes measured from the vertical.  ``None``
    means the element is absent.  Slit polarizers come in pairs.
    """

    input_angle: float = 0.0
    slit_a_polarizer: Optional[float] = None
    slit_b_polarizer: Optional[float] = None
    analyzer: Optional[float] = None

    def __post_init__(self):
        if (self.slit_a_polarizer is None) != (self.slit_b_polarizer is None):
            raise ValidationError(
                "slit polarizers must be both present or both absent"
            )

    @property
    def has_slit_polarizers(self):
        return self.slit_a_polarizer is not None


class EraserAmplitudes(NamedTuple):
    amp_a: float
    amp_b: float
    coherent: bool
    # signed weight of the cross term between the two slit paths
    overlap: float

    @property
    def visibility(self):
        """Fringe visibility produced by these amplitudes for a coherent source."""
        total = self.amp_a**2 + self.amp_b**2
        if total == 0.0:
            return 0.0
        return abs(2.0 * self.amp_a * self.amp_b * self.overlap) / total


# -- elementary phases -------------------------------------------------------


def _phase(width, x, x0, wavelength, L):
    return np.pi * width * (np.asarray(x, dtype=float) - x0) / (wavelength * L)


def alpha(x, p):
    """Two-slit half phase difference ``pi d (x - x0) / (lambda L)``."""
    return _phase(p.slit_separation, x, p.center, p.wavelength, p.screen_distance)


def beta(x, p):
    """Single-slit half phase ``pi b (x - x0) / (lambda L)``."""
    return _phase(p.slit_width, x, p.center, p.wavelength, p.screen_distance)


def sinc_sq(b):
    """``(sin b / b)**2`` with the removable singularity filled in.

    Below ``|b| < 1e-8`` the series ``1 - b**2 / 3`` is used.
    """
    b = np.asarray(b, dtype=float)
    small = np.abs(b) < _SINC_SERIES_CUTOFF
    safe = np.where(small, 1.0, b)
    out = np.where(small, 1.0 - b * b / 3.0, (np.sin(safe) / safe) ** 2)
    return out if out.ndim else float(out)


def _sinc_sq_prime(b):
    # d/db (sin b / b)^2; series below 1e-4 avoids cancellation
    b = np.asarray(b, dtype=float)
    small = np.abs(b) < 1e-4
    safe = np.where(small, 1.0, b)
    s = np.sin(safe) / safe
    exact = 2.0 * s * (safe * np.cos(safe) - np.sin(safe)) / (safe * safe)
    return np.where(small, -2.0 * b / 3.0 + 8.0 * b**3 / 45.0, exact)


# -- functional forms (plain arrays in, arrays out) -------------------------
# The fitting code evaluates these with trial parameters that need not form a
# valid PatternParams, so they take bare numbers.


def partial_form(x, wavelength, slit_separation, slit_width, screen_distance,
                 peak_rate, visibility, phase, center):
    a = _phase(slit_separation, x, center, wavelength, screen_distance)
    b = _phase(slit_width, x, center, wavelength, screen_distance)
    return peak_rate * sinc_sq(b) * 0.5 * (1.0 + visibility * np.cos(2.0 * a + phase))


def double_form(x, wavelength, slit_separation, slit_width, screen_distance,
                peak_rate, center):
    a = _phase(slit_separation, x, center, wavelength, screen_distance)
    b = _phase(slit_width, x, center, wavelength, screen_distance)
    return peak_rate * sinc_sq(b) * np.cos(a) ** 2


def single_form(x, wavelength, slit_width, screen_distance, peak_rate, center):
    b = _phase(slit_width, x, center, wavelength, screen_distance)
    return peak_rate * sinc_sq(b)


def partial_form_gradient(x, wavelength, slit_separation, slit_width, screen_distance,
                          peak_rate, visibility, phase, center):
    """Partial derivatives of :func:`partial_form` with respect to each argument.

    Returns a dict keyed by parameter name, each an array shaped like ``x``.
    """
    x = np.asarray(x, dtype=float)
    scale = np.pi / (wavelength * screen_distance)
    u = x - center
    a = slit_separation * scale * u
    b = slit_width * scale * u
    S = sinc_sq(b)
    dS = _sinc_sq_prime(b)
    arg = 2.0 * a + phase
    c, s = np.cos(arg), np.sin(arg)
    C = 0.5 * (1.0 + visibility * c)
    # dN/dalpha and dN/dbeta
    d_alpha = -peak_rate * S * visibility * s
    d_beta = peak_rate * dS * C
    return {
        "peak_rate": S * C,
        "visibility": peak_rate * S * 0.5 * c,
        "phase": 0.5 * d_alpha,
        "slit_separation": d_alpha * scale * u,
        "slit_width": d_beta * scale * u,
        "center": -(d_alpha * slit_separation + d_beta * slit_width) * scale,
        "wavelength": -(d_alpha * a + d_beta * b) / wavelength,
        "screen_distance": -(d_alpha * a + d_beta * b) / screen_distance,
    }


# -- densities on PatternParams ---------------------------------------------


def double_slit_density(x, p):
    """Ideal two-slit count rate ``N_m sinc^2(beta) cos^2(alpha)``."""
    return double_form(x, p.wavelength, p.slit_separation, p.slit_width,
                       p.screen_distance, p.peak_rate, p.center)


def partial_coherence_density(x, p):
    """Two-slit rate for a partially coherent source.

    ``N0 sinc^2(beta) [1 + |V| cos(2 alpha + delta)] / 2`` with ``N0`` taken
    from ``p.peak_rate``.  With ``|V| = 1`` and ``delta = 0`` this is the ideal
    pattern; with ``|V| = 0`` it is half the single-slit envelope.
    """
    return partial_form(x, p.wavelength, p.slit_separation, p.slit_width,
                        p.screen_distance, p.peak_rate, p.visibility, p.phase, p.center)


def single_slit_density(x, p):
    """Single-slit diffraction ``N_m sinc^2(beta)``; ``slit_separation`` is ignored."""
    return single_form(x, p.wavelength, p.slit_width, p.screen_distance,
                       p.peak_rate, p.center)


# -- geometry ---------------------------------------------------------------


def envelope_width(p):
    """Distance between the two first minima of the single-slit envelope."""
    return 2.0 * p.wavelength * p.screen_distance / p.slit_width


def fringe_spacing(p):
    """Distance between neighbouring interference maxima."""
    return p.wavelength * p.screen_distance / p.slit_separation


# -- source coherence -------------------------------------------------------


def focused_waist(s):
    """Waist of the pump after the focusing lens.

    Equates the lens convergence angle ``w / f0`` with the Gaussian far-field
    divergence ``lambda0 / (pi w0)``.
    """
    return s.pump_wavelength * s.focus_length / (np.pi * s.pump_waist)


def source_angular_size(s, waist=None):
    """Full angular size ``2 w0 / z`` of the source as seen from the slits.

    ``waist`` overrides the focused waist, e.g. to evaluate an unfocused beam.
    """
    w0 = focused_waist(s) if waist is None else waist
    return 2.0 * w0 / s.crystal_distance


def visibility_gaussian_source(slit_separation, s, wavelength, waist=None):
    """Fringe visibility from a Gaussian source (van Cittert-Zernike).

    ``|V| = exp(-(pi d w0)^2 / (lambda z)^2)`` where ``w0`` is the focused
    pump waist unless given explicitly and ``z`` is the crystal distance.
    """
    w0 = focused_waist(s) if waist is None else waist
    if slit_separation < 0 or w0 < 0 or wavelength <= 0:
        raise ValidationError("slit_separation and waist must be >= 0, wavelength > 0")
    ratio = np.pi * slit_separation * w0 / (wavelength * s.crystal_distance)
    return float(np.exp(-ratio * ratio))


# -- quantum eraser ---------------------------------------------------------


def _trig(v):
    # cos(pi/2) and friends come out as 6e-17; snap them to zero
    return 0.0 if abs(v) < 1e-12 else v


def eraser_amplitudes(e):
    """Path amplitudes behind the polarizers (Malus-law projections).

    Amplitudes are relative to an unobstructed slit.  ``overlap`` is the
    signed weight of the interference term: the polarization overlap
    ``cos(pol_a - pol_b)`` when no analyzer follows the slits, and the sign
    of the amplitude product when one does (the analyzer leaves both paths
    in the same polarization state).
    """
    if (e.slit_a_polarizer is None) != (e.slit_b_polarizer is None):
        raise ValidationError("slit polarizers must be both present or both absent")
    if not e.has_slit_polarizers:
        if e.analyzer is None:
            return EraserAmplitudes(1.0, 1.0, True, 1.0)
        amp = abs(_trig(math.cos(e.analyzer - e.input_angle)))
        return EraserAmplitudes(amp, amp, True, 1.0)

    pa, pb = e.slit_a_polarizer, e.slit_b_polarizer
    sa = _trig(math.cos(pa - e.input_angle))
    sb = _trig(math.cos(pb - e.input_angle))
    if e.analyzer is None:
        overlap = _trig(math.cos(pa - pb)) * math.copysign(1.0, sa * sb)
        return EraserAmplitudes(abs(sa), abs(sb), False, overlap)
    sa *= _trig(math.cos(e.analyzer - pa))
    sb *= _trig(math.cos(e.analyzer - pb))
    return EraserAmplitudes(abs(sa), abs(sb), True, math.copysign(1.0, sa * sb))


def eraser_form(x, amps, wavelength, slit_separation, slit_width, screen_distance,
                peak_rate, visibility, phase, center):
    a = _phase(slit_separation, x, center, wavelength, screen_distance)
    b = _phase(slit_width, x, center, wavelength, screen_distance)
    aa, ab = amps.amp_a, amps.amp_b
    cross = 2.0 * aa * ab * amps.overlap * visibility * np.cos(2.0 * a + phase)
    return 0.25 * peak_rate * sinc_sq(b) * (aa * aa + ab * ab + cross)


def eraser_density(x, p, e):
    """Two-slit rate behind the eraser polarizers.

    ``N_m sinc^2(beta) [A_a^2 + A_b^2 + 2 A_a A_b w |V| cos(2 alpha + delta)] / 4``
    with ``w`` the path overlap from :func:`eraser_amplitudes`.  Without
    polarizers this equals :func:`partial_coherence_density`.
    """
    amps = eraser_amplitudes(e)
    return eraser_form(x, amps, p.wavelength, p.slit_separation, p.slit_width,
                       p.screen_distance, p.peak_rate, p.visibility, p.phase, p.center)


# -- collection aperture ----------------------------------------------------


def aperture_average(f: Callable, x, aperture):
    """Mean of ``f`` over ``[x - a/2, x + a/2]`` by fixed-order Gauss-Legendre."""
    if aperture < 0:
        raise ValidationError(f"aperture must be >= 0, got {aperture!r}")
    x = np.asarray(x, dtype=float)
    if aperture == 0:
        return f(x)
    nodes = x[..., None] + 0.5 * aperture * _GL_NODES
    return 0.5 * np.sum(f(nodes) * _GL_WEIGHTS, axis=-1)


def aperture_averaged_density(x, p, aperture, base=partial_coherence_density):
    """Rate collected through a slit aperture of width ``aperture`` centred at ``x``."""
    return aperture_average(lambda u: base(u, p), x, aperture)
