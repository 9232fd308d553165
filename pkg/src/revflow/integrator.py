"""Time integration across flow reversals and stroboscopic sampling."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from revflow import _kernels
from revflow.core import (GridSpec, ModelParams, NumericalFailure, ReactorState,
                          check_finite_state, mirror)


# Ignition fronts have reaction Jacobians of order 1e3; RK4 loses stability
# above roughly this step whatever the grid.
REACTION_DT_CAP = 0.002


def stable_dt(p: ModelParams, g: GridSpec) -> float:
    """Largest step the explicit scheme is run with on this grid.

    0.8 * min(dxi, Pe_min dxi^2 / 2) with Pe_min = min(Pe_M, Pe_H / Le),
    further capped at REACTION_DT_CAP for coarse grids.
    """
    pe_min = min(p.pe_m, p.pe_h / p.le)
    return min(0.8 * min(g.dxi, pe_min * g.dxi ** 2 / 2.0), REACTION_DT_CAP)


def steps_per_cycle(tau_r: float, dt_target: float) -> int:
    # shave the ratio so that 5.5 / 0.002 = 2750.0000000000005 gives 2750
    return max(1, math.ceil(tau_r / dt_target * (1.0 - 1e-12)))


@dataclass(frozen=True)
class RunSchedule:
    """How many cycles to discard and record, and the target time step.

    ``dt_target=None`` means "use :func:`stable_dt` for the grid in use".
    """

    n_transient: int = 500
    n_record: int = 512
    dt_target: float | None = None

    def __post_init__(self):
        if int(self.n_transient) != self.n_transient or self.n_transient < 0:
            raise ValueError("n_transient must be an integer >= 0")
        if int(self.n_record) != self.n_record or self.n_record < 1:
            raise ValueError("n_record must be an integer >= 1")
        if self.dt_target is not None and not self.dt_target > 0:
            raise ValueError("dt_target must be > 0")

    def resolve_dt(self, p: ModelParams, g: GridSpec) -> float:
        """Actual step: tau_r divided into a whole number of steps <= dt_target."""
        target = stable_dt(p, g) if self.dt_target is None else self.dt_target
        return p.tau_r / steps_per_cycle(p.tau_r, target)


@dataclass(frozen=True, eq=False)
class StroboSeries:
    alpha_out: np.ndarray
    theta_out: np.ndarray
    params: ModelParams
    ic: tuple[float, float]
    schedule: RunSchedule
    grid: GridSpec
    final_state: ReactorState | None = None

    def __post_init__(self):
        a = np.array(self.alpha_out, dtype=float)
        t = np.array(self.theta_out, dtype=float)
        if a.shape != t.shape:
            raise ValueError("alpha_out and theta_out lengths differ")
        a.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "alpha_out", a)
        object.__setattr__(self, "theta_out", t)

    def __len__(self):
        return self.alpha_out.size

    @property
    def tau(self) -> np.ndarray:
        """Sampling instants: the end of each recorded switching interval."""
        first = self.schedule.n_transient + 1
        return (first + np.arange(len(self))) * self.params.tau_r


def step(s: ReactorState, dt: float, p: ModelParams, g: GridSpec) -> ReactorState:
    """One classical RK4 step of the semi-discrete balances."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if dt > stable_dt(p, g) * (1.0 + 1e-9):
        raise ValueError(f"dt={dt!r} exceeds the stability bound {stable_dt(p, g)!r}")
    if s.n_nodes != g.n_nodes:
        raise ValueError(f"state has {s.n_nodes} nodes, grid has {g.n_nodes}")
    a = np.array(s.alpha)
    t = np.array(s.theta)
    _kernels.rk4_advance(a, t, 1, dt, p.packed(), g.dxi)
    out = ReactorState(a, t, io=s.io, tau=s.tau + dt)
    check_finite_state(out, p.beta)
    return out


def run_cycle(s: ReactorState, p: ModelParams, g: GridSpec, dt: float):
    """Integrate one switching interval, sample the outlet, then reverse.

    Returns ``(new_state, alpha_out, theta_out)``. The sample is taken at the
    end of the interval, just before the reversal; in the computational frame
    the outlet is the last node whatever ``io`` is.
    """
    nsteps = round(p.tau_r / dt)
    if nsteps < 1 or abs(nsteps * dt - p.tau_r) > 1e-9 * p.tau_r:
        raise ValueError(f"tau_r={p.tau_r!r} is not a whole number of steps dt={dt!r}")
    if dt > stable_dt(p, g) * (1.0 + 1e-9):
        raise ValueError(f"dt={dt!r} exceeds the stability bound {stable_dt(p, g)!r}")
    a = np.array(s.alpha)
    t = np.array(s.theta)
    _kernels.rk4_advance(a, t, nsteps, dt, p.packed(), g.dxi)
    end = ReactorState(a, t, io=s.io, tau=s.tau + p.tau_r)
    check_finite_state(end, p.beta)
    alpha_out, theta_out = end.outlet()
    return mirror(end), alpha_out, theta_out


def simulate(alpha0: float, theta0: float, p: ModelParams, g: GridSpec | None = None,
             sched: RunSchedule | None = None) -> StroboSeries:
    """Run from uniform initial profiles and record the stroboscopic series.

    Raises
    ------
    NumericalFailure
        With ``cycle`` set to the index of the offending switching cycle.
    """
    g = g or GridSpec()
    sched = sched or RunSchedule()
    dt = sched.resolve_dt(p, g)
    state = ReactorState.uniform(alpha0, theta0, g, io=0)
    total = sched.n_transient + sched.n_record
    alpha_out = np.empty(sched.n_record)
    theta_out = np.empty(sched.n_record)
    for cycle in range(total):
        try:
            state, a_out, t_out = run_cycle(state, p, g, dt)
        except NumericalFailure as exc:
            raise NumericalFailure(str(exc), cycle) from exc
        j = cycle - sched.n_transient
        if j >= 0:
            alpha_out[j] = a_out
            theta_out[j] = t_out
    return StroboSeries(alpha_out, theta_out, p, (float(alpha0), float(theta0)),
                        sched, g, final_state=state)
