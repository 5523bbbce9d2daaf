"""Simulation and analysis of single-photon Young double-slit experiments.

Modules
-------
pattern      closed-form densities, source coherence and eraser amplitudes
simulate     Monte Carlo heralded scans and the g2(0) measurement
fitting      Levenberg-Marquardt fits with covariance-based uncertainties
config       key = value experiment files
scanio       scan CSV files and fit reports
plotting     ASCII and SVG plots
experiments  simulate-and-fit recipes
"""
from .errors import DegenerateFitError, InsufficientCountsError, NumericalError, ValidationError
from .pattern import (
    EraserSetup,
    PatternParams,
    SourceModel,
    alpha,
    aperture_averaged_density,
    beta,
    double_slit_density,
    envelope_width,
    eraser_amplitudes,
    eraser_density,
    focused_waist,
    fringe_spacing,
    partial_coherence_density,
    single_slit_density,
    sinc_sq,
    source_angular_size,
    visibility_gaussian_source,
)
from .simulate import G2Result, ScanConfig, ScanRecord, build_sampler, run_g2, run_scan, simulate_point
from .fitting import FitProblem, FitResult, fit_scan, initial_guess, levenberg_marquardt
from .config import ExperimentConfig, parse_config
from .scanio import read_scan_csv, write_scan_csv

__version__ = "0.1.0"
