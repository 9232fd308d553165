"""Figures drawn from the CSV files the command-line tool writes.

This module depends only on numpy, matplotlib and the standard library, so
its source doubles as the standalone plot script placed next to the CSVs:

    python plot_bifurcate.py [output_dir] [command]
"""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# zero harmonic is drawn at most this multiple of the largest other harmonic
DC_CAP = 1.5


def read_csv(path):
    """Columns of a headed CSV file as a dict of arrays (strings kept as str)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    cols = {}
    for j, name in enumerate(header):
        raw = [r[j] for r in rows]
        try:
            cols[name] = np.array([float(v) for v in raw])
        except ValueError:
            cols[name] = np.array(raw)
    return cols


def _finish(fig, ax, path, xlabel, ylabel, title=None):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _param_label(directory):
    cfg = read_config(directory)
    if cfg.get("axis") == "da":
        return "Da"
    return r"$\tau_r$"


def read_config(directory):
    path = os.path.join(directory, "config.txt")
    out = {}
    if not os.path.exists(path):
        return out
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if "=" in line:
                k, v = line.split("=", 1)
                out[k.strip()] = v.strip()
    return out


def cap_dc(amplitudes, k):
    """Copy of the amplitudes with |X[0]| limited to DC_CAP x the largest k > 0 value."""
    amps = np.array(amplitudes, dtype=float)
    rest = amps[k > 0]
    if rest.size and rest.max() > 0:
        amps[k == 0] = np.minimum(amps[k == 0], DC_CAP * rest.max())
    return amps


def plot_series(directory):
    d = read_csv(os.path.join(directory, "series.csv"))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(d["n"], d["alpha_out"], ".", ms=3)
    return _finish(fig, ax, os.path.join(directory, "series.png"),
                   "switching cycle n", r"$\alpha_{out}$")


def plot_bifurcation(directory):
    d = read_csv(os.path.join(directory, "bifurcation.csv"))
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.scatter(d["param"], d["alpha_out"], s=0.5, c="k", lw=0)
    return _finish(fig, ax, os.path.join(directory, "bifurcation.png"),
                   _param_label(directory), r"$\alpha_{out}$", "Bifurcation diagram")


def plot_spectrum(directory):
    d = read_csv(os.path.join(directory, "spectrum.csv"))
    k = d["k"]
    n = k.size
    keep = k <= n // 2
    amps = cap_dc(d["amplitude"], k)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.vlines(k[keep], 0, amps[keep], lw=0.8)
    return _finish(fig, ax, os.path.join(directory, "spectrum.png"),
                   "harmonic k", "|X[k]|", "Amplitude spectrum (k = 0 capped)")


def plot_spectrum_sweep(directory):
    d = read_csv(os.path.join(directory, "spectrum_sweep.csv"))
    fig, ax = plt.subplots(figsize=(7, 5))
    param, k, amp = d["param"], d["k"], d["amplitude"]
    for p in np.unique(param):
        sel = param == p
        amp[sel] = cap_dc(amp[sel], k[sel])
    ax.scatter(param, amp, s=0.3, c="k", lw=0)
    return _finish(fig, ax, os.path.join(directory, "spectrum_sweep.png"),
                   _param_label(directory), "|X[k]|", "Spectral diagram (k = 0 capped)")


def plot_entropy(directory):
    d = read_csv(os.path.join(directory, "entropy.csv"))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(d["param"], d["entropy"], "-k", lw=0.8)
    return _finish(fig, ax, os.path.join(directory, "entropy.png"),
                   _param_label(directory), "E [bits]", "Information entropy")


def plot_icmap(directory):
    d = read_csv(os.path.join(directory, "icmap.csv"))
    periodic = d["class"] != "aperiodic"
    periodic &= d["class"] != "failed"
    fig, ax = plt.subplots(figsize=(5.5, 5))
    ax.plot(d["alpha0"][periodic], d["theta0"][periodic], ".k", ms=3)
    ax.set_xlim(d["alpha0"].min(), d["alpha0"].max())
    ax.set_ylim(d["theta0"].min(), d["theta0"].max())
    return _finish(fig, ax, os.path.join(directory, "icmap.png"),
                   r"$\alpha(\xi, 0)$", r"$\theta(\xi, 0)$",
                   "Initial conditions giving non-chaotic orbits")


def plot_poincare(directory):
    d = read_csv(os.path.join(directory, "poincare.csv"))
    fig, ax = plt.subplots(figsize=(5.5, 5))
    ax.plot(d["alpha_out"], d["theta_out"], ".k", ms=2)
    return _finish(fig, ax, os.path.join(directory, "poincare.png"),
                   r"$\alpha_{out}$", r"$\theta_{out}$", "Poincare section")


PLOTTERS = {
    "simulate": [plot_series],
    "bifurcate": [plot_bifurcation],
    "spectrum": [plot_spectrum, plot_spectrum_sweep],
    "entropy": [plot_entropy],
    "icmap": [plot_icmap],
    "poincare": [plot_poincare],
}

_SOURCES = {
    plot_spectrum: "spectrum.csv",
    plot_spectrum_sweep: "spectrum_sweep.csv",
}


def render(directory, command):
    """Draw every figure for ``command`` whose CSV exists; return PNG paths."""
    paths = []
    for fn in PLOTTERS[command]:
        src = _SOURCES.get(fn)
        if src and not os.path.exists(os.path.join(directory, src)):
            continue
        paths.append(fn(directory))
    return paths


if __name__ == "__main__":
    here = os.path.dirname(os.path.abspath(__file__))
    target = sys.argv[1] if len(sys.argv) > 1 else here
    cmd = sys.argv[2] if len(sys.argv) > 2 else read_config(target).get("command")
    for p in render(target, cmd):
        print(p)
