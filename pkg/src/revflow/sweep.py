"""Families of simulations behind the bifurcation, spectral, entropy and
initial-condition diagrams.

Every row starts cold from the requested initial condition, so rows are
independent of one another and of the worker count.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from revflow.analysis import (DEFAULT_MAX_PERIOD, DEFAULT_N_BINS, DEFAULT_REL_TOL,
                              OrbitClass, amplitude_spectrum, classify_orbit,
                              shannon_entropy)
from revflow.core import GridSpec, ModelParams, NumericalFailure
from revflow.integrator import RunSchedule, simulate

log = logging.getLogger(__name__)

AXES = ("tau_r", "da")
WORKERS_ENV = "REVFLOW_WORKERS"


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"{WORKERS_ENV} must be >= 1")
        return n
    return os.cpu_count() or 1


def evenly_spaced(start: float, stop: float, n: int) -> np.ndarray:
    """start + j (stop - start) / (n - 1); a single point is ``start``."""
    if n == 1:
        return np.array([float(start)])
    j = np.arange(n)
    return start + j * ((stop - start) / (n - 1))


@dataclass(frozen=True)
class Diagnostics:
    """Settings shared by every row's classification and entropy."""

    rel_tol: float = DEFAULT_REL_TOL
    max_period: int = DEFAULT_MAX_PERIOD
    n_bins: int = DEFAULT_N_BINS


@dataclass(frozen=True)
class SweepSpec:
    axis: str = "tau_r"
    start: float = 3.0
    stop: float = 14.0
    n_points: int = 400
    base: ModelParams = field(default_factory=ModelParams)
    ic: tuple[float, float] = (0.9, 0.2)
    schedule: RunSchedule = field(default_factory=RunSchedule)
    grid: GridSpec = field(default_factory=GridSpec)
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.start < self.stop:
            raise ValueError("start must be < stop")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError("n_points must be an integer >= 2")

    def values(self) -> np.ndarray:
        return evenly_spaced(self.start, self.stop, self.n_points)

    def jobs(self) -> list:
        return [(self.base.with_(**{self.axis: float(v)}), self.ic) for v in self.values()]


@dataclass(frozen=True)
class IcMapSpec:
    alpha0_range: tuple[float, float] = (0.0, 1.0)
    theta0_range: tuple[float, float] = (0.0, 0.5)
    n_alpha: int = 51
    n_theta: int = 51
    base: ModelParams = field(default_factory=lambda: ModelParams(tau_r=6.5))
    schedule: RunSchedule = field(default_factory=RunSchedule)
    grid: GridSpec = field(default_factory=GridSpec)
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def __post_init__(self):
        for name in ("alpha0_range", "theta0_range"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ValueError(f"{name} must satisfy low <= high")
        for name in ("n_alpha", "n_theta"):
            n = getattr(self, name)
            if int(n) != n or n < 1:
                raise ValueError(f"{name} must be an integer >= 1")

    def points(self) -> list[tuple[float, float]]:
        """Grid points, alpha0 varying slowest."""
        a = evenly_spaced(*self.alpha0_range, self.n_alpha)
        t = evenly_spaced(*self.theta0_range, self.n_theta)
        return [(float(x), float(y)) for x in a for y in t]

    def jobs(self) -> list:
        return [(self.base, ic) for ic in self.points()]


@dataclass(frozen=True, eq=False)
class SweepRow:
    param: float | tuple[float, float]
    alpha_out: np.ndarray | None
    theta_out: np.ndarray | None
    orbit: OrbitClass | None
    entropy: float
    amplitudes: np.ndarray | None
    failed: bool = False
    fail_cycle: int | None = None
    error: str = ""


@dataclass(frozen=True, eq=False)
class SweepResult:
    rows: tuple[SweepRow, ...]
    spec: SweepSpec | IcMapSpec

    def params(self) -> list:
        return [r.param for r in self.rows]

    def ok_rows(self) -> list[SweepRow]:
        return [r for r in self.rows if not r.failed]

    @property
    def n_failed(self) -> int:
        return sum(r.failed for r in self.rows)


def _row(param, p: ModelParams, ic, grid, schedule, diag: Diagnostics) -> SweepRow:
    try:
        s = simulate(ic[0], ic[1], p, grid, schedule)
    except NumericalFailure as exc:
        log.warning("row %r failed at cycle %s: %s", param, exc.cycle, exc)
        return SweepRow(param, None, None, None, float("nan"), None,
                        failed=True, fail_cycle=exc.cycle, error=str(exc))
    orbit = classify_orbit(s.alpha_out, diag.rel_tol, diag.max_period)
    entropy = shannon_entropy(s.alpha_out, diag.n_bins).entropy
    amps = amplitude_spectrum(s.alpha_out).amplitudes
    return SweepRow(param, s.alpha_out, s.theta_out, orbit, entropy, amps)


def _run_chunk(payload):
    indices, params, jobs, grid, schedule, diag = payload
    return [(i, _row(params[i], *jobs[i], grid, schedule, diag)) for i in indices]


def _execute(params: list, jobs: list, spec, workers: int | None) -> SweepResult:
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    n = len(jobs)
    workers = min(workers, n)
    # strided static partition: rows of similar cost land on different workers
    chunks = [list(range(w, n, workers)) for w in range(workers)]
    payloads = [(c, params, jobs, spec.grid, spec.schedule, spec.diagnostics) for c in chunks]
    if workers == 1:
        parts = [_run_chunk(payloads[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, payloads))
    rows: list = [None] * n
    for part in parts:
        for i, row in part:
            rows[i] = row
    return SweepResult(tuple(rows), spec)


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Simulate every axis value once; rows carry samples, class, entropy and spectrum."""
    params = [float(v) for v in spec.values()]
    return _execute(params, spec.jobs(), spec, workers)


def bifurcation_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    return run_sweep(spec, workers)


def spectral_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    return run_sweep(spec, workers)


def entropy_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    return run_sweep(spec, workers)


def ic_map(spec: IcMapSpec, workers: int | None = None) -> SweepResult:
    """Classify the long-run orbit reached from each uniform initial profile."""
    points = spec.points()
    return _execute(points, spec.jobs(), spec, workers)
