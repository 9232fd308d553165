"""Command-line front end and result files.

Configuration is a flat ``key = value`` text file; command-line flags of the
same names override it. Every key has a default, so a bare command reproduces
the reference scenario (Da = 0.13, initial profiles alpha = 0.9, theta = 0.2).

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import inspect
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from revflow import plotting
from revflow.analysis import (DEFAULT_MAX_PERIOD, DEFAULT_N_BINS, DEFAULT_REL_TOL,
                              amplitude_spectrum, classify_orbit, poincare_points)
from revflow.core import GridSpec, ModelParams, NumericalFailure
from revflow.integrator import RunSchedule, StroboSeries, simulate, stable_dt
from revflow.sweep import (Diagnostics, IcMapSpec, SweepResult, SweepSpec, ic_map,
                           run_sweep)

log = logging.getLogger("revflow")

COMMANDS = ("simulate", "bifurcate", "spectrum", "entropy", "icmap", "poincare")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
CONFIG_FILE = "config.txt"
SPECTRUM_FLOOR = 1e-12

# axis -> (start, stop, n_points)
AXIS_DEFAULTS = {"tau_r": (3.0, 14.0, 400), "da": (0.05, 0.2, 300)}


class ConfigError(ValueError):
    def __init__(self, key: str, reason: str):
        super().__init__(f"{key}: {reason}")
        self.key = key
        self.reason = reason


@dataclass(frozen=True)
class RunConfig:
    command: str = "simulate"
    # model
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
    # grid and schedule
    n_nodes: int = 101
    n_transient: int = 500
    n_record: int = 512
    dt_target: float = 0.002
    # initial profiles
    alpha0: float = 0.9
    theta0: float = 0.2
    # parameter sweep
    axis: str = "tau_r"
    start: float = 3.0
    stop: float = 14.0
    n_points: int = 400
    # initial-condition map
    alpha0_min: float = 0.0
    alpha0_max: float = 1.0
    theta0_min: float = 0.0
    theta0_max: float = 0.5
    n_alpha: int = 51
    n_theta: int = 51
    # diagnostics
    rel_tol: float = DEFAULT_REL_TOL
    max_period: int = DEFAULT_MAX_PERIOD
    n_bins: int = DEFAULT_N_BINS
    # output
    output_dir: str = "out"
    emit_plots: bool = False

    def params(self) -> ModelParams:
        return ModelParams(self.gamma, self.beta, self.m, self.delta, self.theta_h,
                           self.pe_m, self.pe_h, self.le, self.da, self.tau_r)

    def grid(self) -> GridSpec:
        return GridSpec(self.n_nodes)

    def schedule(self) -> RunSchedule:
        return RunSchedule(self.n_transient, self.n_record, self.dt_target)

    def diagnostics(self) -> Diagnostics:
        return Diagnostics(self.rel_tol, self.max_period, self.n_bins)

    def sweep_spec(self) -> SweepSpec:
        return SweepSpec(self.axis, self.start, self.stop, self.n_points, self.params(),
                         (self.alpha0, self.theta0), self.schedule(), self.grid(),
                         self.diagnostics())

    def icmap_spec(self) -> IcMapSpec:
        return IcMapSpec((self.alpha0_min, self.alpha0_max),
                         (self.theta0_min, self.theta0_max), self.n_alpha, self.n_theta,
                         self.params(), self.schedule(), self.grid(), self.diagnostics())

    def dumps(self) -> str:
        lines = ["# revflow effective configuration"]
        for k, v in asdict(self).items():
            if isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{k} = {v!r}" if isinstance(v, float) else f"{k} = {v}")
        return "\n".join(lines) + "\n"


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_POSITIVE = {"pe_m", "pe_h", "le", "tau_r", "dt_target", "rel_tol"}
_NON_NEGATIVE = {"da", "m"}
_COUNTS = {"n_nodes": 3, "n_transient": 0, "n_record": 1, "n_points": 2,
           "n_alpha": 1, "n_theta": 1, "max_period": 1, "n_bins": 1}
_AXIS_CHOICES = ("tau_r", "da", "none")


def _convert(key: str, raw: str):
    if key not in _TYPES:
        raise ConfigError(key, "unknown key")
    kind = _TYPES[key]
    raw = raw.strip()
    if kind == "bool":
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(key, f"expected a boolean, got {raw!r}")
    if kind == "int":
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(key, f"expected an integer, got {raw!r}") from None
    if kind == "float":
        if raw.lower() == "auto" and key == "dt_target":
            return None
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(key, f"expected a number, got {raw!r}") from None
        if not math.isfinite(value):
            raise ConfigError(key, "must be finite")
        return value
    return raw


def read_config_file(path: str) -> dict[str, str]:
    out = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    with fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError("config", f"line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in text.split("=", 1))
            out[key] = value
    return out


def parse_config(file: str | None = None, flags: dict[str, str] | None = None,
                 command: str | None = None) -> RunConfig:
    """Merge file values, then flag values, over command-dependent defaults.

    ``flags`` maps key names to raw strings. Raises :class:`ConfigError`
    naming the offending key.
    """
    raw: dict[str, str] = {}
    if file:
        raw.update(read_config_file(file))
    raw.update(flags or {})
    if command is not None:
        raw["command"] = command
    values = {k: _convert(k, v) for k, v in raw.items()}
    cmd = values.get("command", "simulate")
    if cmd not in COMMANDS:
        raise ConfigError("command", f"must be one of {', '.join(COMMANDS)}")

    if "tau_r" not in values and cmd == "icmap":
        values["tau_r"] = 6.5
    if "axis" not in values:
        values["axis"] = "tau_r" if cmd in ("bifurcate", "entropy") else "none"
    axis = values["axis"]
    if axis not in _AXIS_CHOICES:
        raise ConfigError("axis", f"must be one of {', '.join(_AXIS_CHOICES)}")
    if axis in ("none",) and cmd in ("bifurcate", "entropy"):
        raise ConfigError("axis", f"{cmd} needs a sweep axis (tau_r or da)")
    if axis != "none" and cmd in ("simulate", "poincare", "icmap"):
        raise ConfigError("axis", f"{cmd} does not sweep; use axis = none")
    start, stop, n_points = AXIS_DEFAULTS.get(axis, AXIS_DEFAULTS["tau_r"])
    values.setdefault("start", start)
    values.setdefault("stop", stop)
    values.setdefault("n_points", n_points)

    for key, value in values.items():
        if key in _POSITIVE and value is not None and not value > 0:
            raise ConfigError(key, f"must be > 0, got {value!r}")
        if key in _NON_NEGATIVE and not value >= 0:
            raise ConfigError(key, f"must be >= 0, got {value!r}")
        if key in _COUNTS and value < _COUNTS[key]:
            raise ConfigError(key, f"must be >= {_COUNTS[key]}, got {value!r}")
    if not values["start"] < values["stop"]:
        raise ConfigError("stop", "must be greater than start")
    for lo, hi in (("alpha0_min", "alpha0_max"), ("theta0_min", "theta0_max")):
        if values.get(lo, getattr(RunConfig, lo)) > values.get(hi, getattr(RunConfig, hi)):
            raise ConfigError(hi, f"must be >= {lo}")

    dt_given = values.pop("dt_target", None)
    cfg = RunConfig(**values)
    try:
        p = cfg.params()
        g = cfg.grid()
    except ValueError as exc:
        raise ConfigError("model", str(exc)) from None
    bound = stable_dt(p, g)
    if dt_given is None:
        dt_given = bound
    elif dt_given > bound * (1 + 1e-9):
        raise ConfigError("dt_target", f"exceeds the stability bound {bound!r}")
    for key in ("theta0", "theta0_min", "theta0_max"):
        if 1 + cfg.beta * getattr(cfg, key) <= 0:
            raise ConfigError(key, "1 + beta*theta must be > 0")
    return _replace(cfg, dt_target=float(dt_given))


def _replace(cfg: RunConfig, **changes) -> RunConfig:
    d = asdict(cfg)
    d.update(changes)
    return RunConfig(**d)


# --- output -----------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return "%.17g" % float(v)


def _write_csv(path: str, header: list[str], rows) -> str:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _class_cells(row):
    if row.failed:
        return "failed", 0, float("nan")
    return row.orbit.kind, row.orbit.period, row.entropy


def write_series(series: StroboSeries, out: str) -> str:
    rows = zip(range(len(series)), series.tau, series.alpha_out, series.theta_out)
    return _write_csv(os.path.join(out, "series.csv"),
                      ["n", "tau", "alpha_out", "theta_out"], rows)


def write_spectrum(series: StroboSeries, out: str) -> str:
    amps = amplitude_spectrum(series.alpha_out).amplitudes
    return _write_csv(os.path.join(out, "spectrum.csv"), ["k", "amplitude"],
                      enumerate(amps))


def write_poincare(series: StroboSeries, out: str) -> str:
    return _write_csv(os.path.join(out, "poincare.csv"), ["alpha_out", "theta_out"],
                      poincare_points(series))


def write_bifurcation(result: SweepResult, out: str) -> list[str]:
    samples = ((r.param, a) for r in result.ok_rows() for a in r.alpha_out)
    classes = ((r.param, *_class_cells(r)) for r in result.rows)
    return [
        _write_csv(os.path.join(out, "bifurcation.csv"), ["param", "alpha_out"], samples),
        _write_csv(os.path.join(out, "classes.csv"),
                   ["param", "class", "period", "entropy"], classes),
    ]


def write_spectrum_sweep(result: SweepResult, out: str) -> str:
    rows = ((r.param, k, a) for r in result.ok_rows()
            for k, a in enumerate(r.amplitudes) if a >= SPECTRUM_FLOOR)
    return _write_csv(os.path.join(out, "spectrum_sweep.csv"),
                      ["param", "k", "amplitude"], rows)


def write_entropy(result: SweepResult, out: str) -> str:
    rows = ((r.param, r.entropy) for r in result.rows)
    return _write_csv(os.path.join(out, "entropy.csv"), ["param", "entropy"], rows)


def write_icmap(result: SweepResult, out: str) -> str:
    rows = ((*r.param, *_class_cells(r)) for r in result.rows)
    return _write_csv(os.path.join(out, "icmap.csv"),
                      ["alpha0", "theta0", "class", "period", "entropy"], rows)


def write_plots(config: RunConfig) -> list[str]:
    """Write the standalone plot script and render its figures."""
    out = config.output_dir
    script = os.path.join(out, f"plot_{config.command}.py")
    with open(script, "w") as fh:
        fh.write(inspect.getsource(plotting))
    return [script, *plotting.render(out, config.command)]


def write_outputs(result, config: RunConfig) -> list[str]:
    """Write the CSV files for ``config.command`` plus the resolved config."""
    out = config.output_dir
    os.makedirs(out, exist_ok=True)
    written = []
    cfg_path = os.path.join(out, CONFIG_FILE)
    with open(cfg_path, "w") as fh:
        fh.write(config.dumps())
    written.append(cfg_path)
    cmd = config.command
    if cmd == "simulate":
        written.append(write_series(result, out))
    elif cmd == "poincare":
        written.append(write_poincare(result, out))
    elif cmd == "spectrum" and isinstance(result, StroboSeries):
        written.append(write_spectrum(result, out))
    elif cmd == "spectrum":
        written.append(write_spectrum_sweep(result, out))
    elif cmd == "bifurcate":
        written.extend(write_bifurcation(result, out))
    elif cmd == "entropy":
        written.append(write_entropy(result, out))
    elif cmd == "icmap":
        written.append(write_icmap(result, out))
    if config.emit_plots:
        written.extend(write_plots(config))
    return written


# --- driver -----------------------------------------------------------------

def compute(config: RunConfig, workers: int | None = None):
    cmd = config.command
    if cmd == "icmap":
        return ic_map(config.icmap_spec(), workers)
    if cmd in ("bifurcate", "entropy") or (cmd == "spectrum" and config.axis != "none"):
        return run_sweep(config.sweep_spec(), workers)
    return simulate(config.alpha0, config.theta0, config.params(), config.grid(),
                    config.schedule())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revflow",
        description="Reverse-flow tubular reactor: simulation, diagrams and diagnostics.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("-c", "--config", help="key = value configuration file")
    parser.add_argument("-o", "--output-dir", dest="output_dir")
    parser.add_argument("--plots", dest="emit_plots", action="store_const", const="true",
                        help="also write a plot script and render its figures")
    parser.add_argument("-w", "--workers", type=int,
                        help="worker processes for sweeps (default: $REVFLOW_WORKERS "
                             "or the CPU count)")
    parser.add_argument("-v", "--verbose", action="store_true")
    for f in fields(RunConfig):
        if f.name in ("command", "output_dir", "emit_plots"):
            continue
        parser.add_argument("--" + f.name.replace("_", "-"), dest=f.name, metavar="V")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    flags = {k: v for k, v in vars(args).items()
             if v is not None and k not in ("command", "config", "workers", "verbose")}
    try:
        config = parse_config(args.config, flags, args.command)
    except ConfigError as exc:
        print(f"revflow: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("running %s", config.command)
    try:
        result = compute(config, args.workers)
    except NumericalFailure as exc:
        print(f"revflow: numerical failure at cycle {exc.cycle}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for path in write_outputs(result, config):
        log.info("wrote %s", path)
    if isinstance(result, SweepResult) and result.n_failed:
        print(f"revflow: {result.n_failed} row(s) failed numerically; "
              "see the 'failed' entries in the output", file=sys.stderr)
        return EXIT_NUMERIC
    if isinstance(result, StroboSeries):
        log.info("orbit: %s", classify_orbit(result.alpha_out, config.rel_tol,
                                             config.max_period).label())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
