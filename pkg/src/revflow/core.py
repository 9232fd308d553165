"""Reactor model: kinetics, discretized balances and the flow-reversal mirror.

The balances are always integrated with the feed entering at xi = 0. A flow
reversal is a reflection of the profiles (see :func:`mirror`), so the upwind
direction and the boundary closures never change.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np

from revflow import _kernels

EPS_PHYS = 1e-6


class NumericalFailure(RuntimeError):
    """A simulation produced non-finite or unphysical values.

    ``cycle`` holds the switching-cycle index at which the failure was
    detected, when known.
    """

    def __init__(self, message: str, cycle: int | None = None):
        super().__init__(message)
        self.cycle = cycle


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless model constants. Defaults are the reference scenario (Da = 0.13)."""

    gamma: float = 15.0
    beta: float = 2.0
    m: float = 1.5
    delta: float = 3.0
    theta_h: float = 0.0
    pe_m: float = 50.0
    pe_h: float = 50.0
    le: float = 1.0
    da: float = 0.13
    tau_r: float = 5.5

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not np.isfinite(value):
                raise ValueError(f"{f.name} must be finite, got {value!r}")
        for name in ("pe_m", "pe_h", "le", "tau_r"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")
        for name in ("da", "m"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    def packed(self) -> np.ndarray:
        """Kernel parameter vector (everything except tau_r)."""
        return np.array([self.gamma, self.beta, self.m, self.delta, self.theta_h,
                         self.pe_m, self.pe_h, self.le, self.da], dtype=float)

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class GridSpec:
    n_nodes: int = 101

    def __post_init__(self):
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 3:
            raise ValueError(f"n_nodes must be an integer >= 3, got {self.n_nodes!r}")

    @property
    def dxi(self) -> float:
        return 1.0 / (self.n_nodes - 1)

    @property
    def xi(self) -> np.ndarray:
        x = np.arange(self.n_nodes) * self.dxi
        x[-1] = 1.0
        return x


@dataclass(frozen=True, eq=False)
class ReactorState:
    """Profiles on the grid plus flow direction and time.

    ``io`` follows the outlet-selection convention: with io = 0 the physical
    outlet is the xi = 1 end, with io = 1 it is xi = 0. The arrays are stored
    in the computational frame, in which the feed always enters at index 0.
    """

    alpha: np.ndarray
    theta: np.ndarray
    io: int = 0
    tau: float = 0.0

    def __post_init__(self):
        a = np.array(self.alpha, dtype=float)
        t = np.array(self.theta, dtype=float)
        if a.ndim != 1 or a.shape != t.shape or a.size < 3:
            raise ValueError("alpha and theta must be 1-D arrays of equal length >= 3")
        if self.io not in (0, 1):
            raise ValueError(f"io must be 0 or 1, got {self.io!r}")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        a.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "theta", t)

    @classmethod
    def uniform(cls, alpha0: float, theta0: float, grid: GridSpec, io: int = 0):
        n = grid.n_nodes
        return cls(np.full(n, float(alpha0)), np.full(n, float(theta0)), io=io)

    @property
    def n_nodes(self) -> int:
        return self.alpha.size

    def __eq__(self, other):
        if not isinstance(other, ReactorState):
            return NotImplemented
        return (self.io == other.io and self.tau == other.tau
                and np.array_equal(self.alpha, other.alpha)
                and np.array_equal(self.theta, other.theta))

    def outlet(self) -> tuple[float, float]:
        """Physical outlet values selected by ``io``.

        In the computational frame the outlet is always the last node; the
        physical position it corresponds to is xi = 1 - io.
        """
        return float(self.alpha[-1]), float(self.theta[-1])

    def physical(self) -> tuple[np.ndarray, np.ndarray]:
        """Profiles indexed by physical position xi."""
        if self.io == 0:
            return self.alpha, self.theta
        return self.alpha[::-1], self.theta[::-1]


def check_finite_state(state: ReactorState, beta: float, cycle: int | None = None):
    a, t = state.alpha, state.theta
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(t))):
        raise NumericalFailure("non-finite value in reactor state", cycle)
    if a.min() < -EPS_PHYS or a.max() > 1.0 + EPS_PHYS:
        raise NumericalFailure(
            f"conversion left [0, 1]: range [{a.min():.3g}, {a.max():.3g}]", cycle)
    if np.any(1.0 + beta * t <= 0):
        raise NumericalFailure("1 + beta*theta <= 0 in reactor state", cycle)


def phi1(alpha, theta, p: ModelParams):
    """Reaction rate Da (1 - alpha)^m exp(gamma beta theta / (1 + beta theta)).

    The base ``1 - alpha`` is clamped at zero so that an overshoot above full
    conversion gives zero rate instead of NaN. Works on scalars and arrays.
    """
    alpha = np.asarray(alpha, dtype=float)
    theta = np.asarray(theta, dtype=float)
    den = 1.0 + p.beta * theta
    if np.any(den <= 0):
        raise ValueError("1 + beta*theta must be > 0")
    base = np.maximum(1.0 - alpha, 0.0)
    out = p.da * base ** p.m * np.exp(p.gamma * p.beta * theta / den)
    return out[()] if out.ndim == 0 else out


def phi2(alpha, theta, p: ModelParams):
    """Heat source: reaction heat plus exchange with the coolant."""
    theta_arr = np.asarray(theta, dtype=float)
    out = phi1(alpha, theta, p) + p.delta * (p.theta_h - theta_arr)
    return out[()] if np.ndim(out) == 0 else out


def discrete_dispersion(u: np.ndarray, pe: float, g: GridSpec) -> np.ndarray:
    """(1/Pe) d2u/dxi2 at interior nodes, boundary values from the closures."""
    w = _closed(u, pe)
    return (w[2:] - 2.0 * w[1:-1] + w[:-2]) / (pe * g.dxi ** 2)


def discrete_convection(u: np.ndarray, pe: float, g: GridSpec) -> np.ndarray:
    """Backward (upwind) du/dxi at interior nodes."""
    w = _closed(u, pe)
    return (w[1:-1] - w[:-2]) / g.dxi


def _closed(u, pe):
    w = np.array(u, dtype=float)
    h = 1.0 / (w.size - 1)
    w[0] = _kernels.inlet_closure(w[1], w[2], pe, h)
    w[-1] = _kernels.outlet_closure(w[-2], w[-3])
    return w


def spatial_rhs(s: ReactorState, p: ModelParams, g: GridSpec):
    """Time derivatives of the discretized balances for every node.

    Interior nodes carry the semi-discrete PDE; boundary entries are the
    derivatives of the algebraic closure values, so that integrating a state
    that satisfies the boundary conditions keeps satisfying them.
    """
    if s.n_nodes != g.n_nodes:
        raise ValueError(f"state has {s.n_nodes} nodes, grid has {g.n_nodes}")
    if np.any(1.0 + p.beta * s.theta <= 0):
        raise NumericalFailure("1 + beta*theta <= 0 in reactor state")
    fa = np.empty(g.n_nodes)
    ft = np.empty(g.n_nodes)
    _kernels.rhs(np.ascontiguousarray(s.alpha), np.ascontiguousarray(s.theta),
                 fa, ft, p.packed(), g.dxi)
    if not (np.all(np.isfinite(fa)) and np.all(np.isfinite(ft))):
        raise NumericalFailure("non-finite derivative")
    return fa, ft


def with_closure(s: ReactorState, p: ModelParams) -> ReactorState:
    """Replace boundary entries by the values the boundary conditions imply."""
    a = np.array(s.alpha)
    t = np.array(s.theta)
    _kernels.apply_closure(a, t, p.packed(), 1.0 / (a.size - 1))
    return ReactorState(a, t, io=s.io, tau=s.tau)


def mirror(s: ReactorState) -> ReactorState:
    """Reflect the profiles end to end and flip the flow direction."""
    return ReactorState(s.alpha[::-1].copy(), s.theta[::-1].copy(), io=1 - s.io, tau=s.tau)
