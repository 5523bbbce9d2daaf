"""Ready-made recipes: simulate a configured run and analyse it."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .fitting import fit_scan
from .pattern import EraserSetup, PatternParams, eraser_amplitudes
from .simulate import ScanConfig, run_scan

__all__ = ["records_to_arrays", "fit_records", "EraserPoint", "eraser_series", "ERASER_CONFIGURATIONS"]

# the three polarizer arrangements of the eraser demonstration (degrees)
ERASER_CONFIGURATIONS = {
    "marked": EraserSetup(0.0, math.radians(45), math.radians(-45), None),
    "erased": EraserSetup(0.0, math.radians(45), math.radians(-45), 0.0),
    "one-slit": EraserSetup(0.0, math.radians(45), math.radians(-45), math.radians(45)),
}


def records_to_arrays(records):
    x = np.array([r.position for r in records], dtype=float)
    n = np.array([r.coincidences for r in records], dtype=float)
    t = np.array([r.dwell for r in records], dtype=float)
    return x, n, t


def fit_records(records, model="partial", *, wavelength=810e-9, screen_distance=1.52,
                aperture=0.0, **kwargs):
    """:func:`photonslit.fitting.fit_scan` applied to a list of scan records."""
    x, n, t = records_to_arrays(records)
    return fit_scan(x, n, t, model, wavelength=wavelength, screen_distance=screen_distance,
                    aperture=aperture, **kwargs)


@dataclass(frozen=True)
class EraserPoint:
    label: str
    setup: EraserSetup
    predicted: float
    visibility: float
    error: float


def eraser_series(p: PatternParams, cfg: ScanConfig, setups, seed_offset=0):
    """Simulate and fit one scan per eraser arrangement.

    ``setups`` maps labels to :class:`EraserSetup`.  The slit geometry is
    known from the plain double-slit run, so the fits hold ``d``, ``b`` and
    the phase fixed and free only amplitude, visibility and centre.
    ``predicted`` is the source visibility times the polarizer visibility.
    """
    out = []
    for k, (label, setup) in enumerate(setups.items()):
        run_cfg = replace(cfg, seed=cfg.seed + seed_offset + k)
        records = run_scan(run_cfg, p, setup)
        fit = fit_records(
            records, "partial", wavelength=p.wavelength, screen_distance=p.screen_distance,
            aperture=cfg.aperture, free=("peak_rate", "visibility", "center"),
            fixed={"slit_separation": p.slit_separation, "slit_width": p.slit_width,
                   "phase": 0.0},
        )
        predicted = p.visibility * eraser_amplitudes(setup).visibility
        out.append(EraserPoint(label, setup, predicted, fit.estimates["visibility"],
                               fit.errors["visibility"]))
    return out
