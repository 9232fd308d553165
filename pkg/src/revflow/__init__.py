"""Reverse-flow tubular reactor dynamics: simulation and chaos diagnostics."""
from revflow.analysis import (EntropyResult, OrbitClass, Spectrum, amplitude_spectrum,
                              classify_orbit, expected_entropy, poincare_points,
                              shannon_entropy)
from revflow.core import (GridSpec, ModelParams, NumericalFailure, ReactorState, mirror,
                          phi1, phi2, spatial_rhs)
from revflow.integrator import RunSchedule, StroboSeries, run_cycle, simulate, step
from revflow.sweep import (IcMapSpec, SweepResult, SweepSpec, bifurcation_sweep,
                           entropy_sweep, ic_map, spectral_sweep)

__version__ = "0.1.0"

__all__ = [
    "EntropyResult", "GridSpec", "IcMapSpec", "ModelParams", "NumericalFailure",
    "OrbitClass", "ReactorState", "RunSchedule", "Spectrum", "StroboSeries",
    "SweepResult", "SweepSpec", "amplitude_spectrum", "bifurcation_sweep",
    "classify_orbit", "entropy_sweep", "expected_entropy", "ic_map", "mirror", "phi1",
    "phi2", "poincare_points", "run_cycle", "shannon_entropy", "simulate",
    "spatial_rhs", "spectral_sweep", "step",
]
