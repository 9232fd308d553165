"""Diagnostics of stroboscopic series: spectrum, entropy, orbit class."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

STATIONARY = "stationary"
PERIODIC = "periodic"
APERIODIC = "aperiodic"

DEFAULT_REL_TOL = 1e-4
DEFAULT_MAX_PERIOD = 32
DEFAULT_N_BINS = 100
ABS_TOL_FLOOR = 1e-9


def _as_series(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 1:
        raise ValueError("empty series")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    return x


@dataclass(frozen=True, eq=False)
class Spectrum:
    amplitudes: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.amplitudes.size

    def harmonics_above(self, rel: float = 0.01) -> int:
        """Count harmonics k = 1 .. N//2 with |X[k]| > rel * max non-DC amplitude."""
        half = self.amplitudes[1:self.n_samples // 2 + 1]
        if half.size == 0 or half.max() == 0:
            return 0
        return int(np.count_nonzero(half > rel * half.max()))


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def fft_radix2(x) -> np.ndarray:
    """Unnormalized DFT sum_n x_n exp(-2 pi i k n / N) for N a power of two.

    Iterative decimation in time: bit-reversal permutation, then log2(N)
    butterfly stages, each vectorized over the whole array.
    """
    x = np.asarray(x, dtype=complex)
    n = x.size
    if not _is_power_of_two(n):
        raise ValueError(f"length {n} is not a power of two")
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    a = x[rev].copy()
    size = 2
    while size <= n:
        half = size // 2
        tw = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = a.reshape(-1, size)
        even = blocks[:, :half].copy()
        odd = blocks[:, half:] * tw
        blocks[:, :half] = even + odd
        blocks[:, half:] = even - odd
        size *= 2
    return a


def dft_direct(x) -> np.ndarray:
    """Unnormalized DFT by direct summation, any N."""
    x = np.asarray(x, dtype=complex)
    n = x.size
    k = np.arange(n)
    # reduce k*n mod N before scaling so the phase stays exact for large N
    w = np.exp(-2j * np.pi * (np.outer(k, k) % n) / n)
    return w @ x


def amplitude_spectrum(x) -> Spectrum:
    """|X[k]| with X[k] = (1/N) sum_n x_n exp(-2 pi i k n / N)."""
    x = _as_series(x)
    n = x.size
    coeffs = fft_radix2(x) if _is_power_of_two(n) else dft_direct(x)
    amps = np.abs(coeffs) / n
    amps.flags.writeable = False
    return Spectrum(amps)


@dataclass(frozen=True)
class EntropyResult:
    entropy: float
    n_bins: int
    occupied_bins: int


def shannon_entropy(x, n_bins: int = DEFAULT_N_BINS) -> EntropyResult:
    """Entropy in bits of the histogram of ``x`` over [min(x), max(x)].

    The observed range is cut into ``n_bins`` equal sub-intervals; a
    degenerate range puts every sample into a single bin.
    """
    x = _as_series(x)
    if int(n_bins) != n_bins or n_bins < 1:
        raise ValueError("n_bins must be an integer >= 1")
    lo, hi = x.min(), x.max()
    if hi > lo:
        counts, _ = np.histogram(x, bins=int(n_bins), range=(lo, hi))
    else:
        counts = np.array([x.size])
    counts = counts[counts > 0]
    p = counts / x.size
    e = float(-np.sum(p * np.log2(p))) if counts.size > 1 else 0.0
    return EntropyResult(e, int(n_bins), int(counts.size))


def expected_entropy(m: int) -> float:
    """Entropy of an M-periodic orbit, log2 M."""
    if m < 1:
        raise ValueError("period must be >= 1")
    return math.log2(m)


@dataclass(frozen=True)
class OrbitClass:
    kind: str
    period: int
    distinct_values: int

    def label(self) -> str:
        return f"{self.kind}({self.period})" if self.kind == PERIODIC else self.kind


def _tolerance(x: np.ndarray, rel_tol: float) -> float:
    return max(rel_tol * float(x.max() - x.min()), ABS_TOL_FLOOR)


def cluster_labels(x, rel_tol: float = DEFAULT_REL_TOL) -> tuple[np.ndarray, int, bool]:
    """Group samples whose sorted neighbours lie within the tolerance.

    Returns per-sample labels (input order), the group count, and whether
    every group has spread <= tolerance. Splitting on gaps treats ``x`` and
    ``-x`` identically; a group whose spread exceeds the tolerance is a
    chained continuum of values rather than one recurring value.
    """
    x = _as_series(x)
    tol = _tolerance(x, rel_tol)
    order = np.argsort(x, kind="stable")
    xs = x[order]
    breaks = np.flatnonzero(np.diff(xs) > tol)
    labels_sorted = np.zeros(x.size, dtype=np.int64)
    labels_sorted[breaks + 1] = 1
    labels_sorted = np.cumsum(labels_sorted)
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks, [x.size - 1]])
    tight = bool(np.all(xs[ends] - xs[starts] <= tol))
    labels = np.empty_like(labels_sorted)
    labels[order] = labels_sorted
    return labels, int(starts.size), tight


def _resolved_count(x: np.ndarray, tol: float) -> int:
    """Distinct values when each chained group is cut into tol-wide pieces."""
    xs = np.sort(x)
    count, start = 1, xs[0]
    for v in xs[1:]:
        if v - start > tol:
            count += 1
            start = v
    return count


def classify_orbit(x, rel_tol: float = DEFAULT_REL_TOL,
                   max_period: int = DEFAULT_MAX_PERIOD) -> OrbitClass:
    """Stationary, periodic(M) or aperiodic, from tolerance-distinct values.

    Periodic requires 2 <= M <= max_period clusters visited in a sequence that
    repeats with period M over the whole window.
    """
    if not rel_tol > 0:
        raise ValueError("rel_tol must be > 0")
    x = _as_series(x)
    labels, k, tight = cluster_labels(x, rel_tol)
    if tight and k == 1:
        return OrbitClass(STATIONARY, 1, 1)
    if (tight and k <= max_period and labels.size > k
            and np.array_equal(labels[k:], labels[:-k])):
        return OrbitClass(PERIODIC, k, k)
    distinct = k if tight else _resolved_count(x, _tolerance(x, rel_tol))
    return OrbitClass(APERIODIC, 0, distinct)


def poincare_points(s) -> np.ndarray:
    """Stroboscopic (alpha_out, theta_out) pairs in sampling order, shape (N, 2)."""
    return np.column_stack([np.asarray(s.alpha_out, dtype=float),
                            np.asarray(s.theta_out, dtype=float)])


def distinct_points(points, rel_tol: float = DEFAULT_REL_TOL) -> int:
    """Number of tolerance-distinct points of a planar point set.

    Two points are the same when both coordinates fall into the same
    per-coordinate cluster.
    """
    pts = np.asarray(points, dtype=float)
    la, _, _ = cluster_labels(pts[:, 0], rel_tol)
    lt, _, _ = cluster_labels(pts[:, 1], rel_tol)
    return len(set(zip(la.tolist(), lt.tolist())))
