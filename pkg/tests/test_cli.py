import csv
import os
import subprocess
import sys

import numpy as np
import pytest

from revflow import plotting
from revflow.cli import ConfigError, RunConfig, main, parse_config

FAST = ["--tau-r", "1.0", "--n-transient", "3", "--n-record", "8"]


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# --- configuration -----------------------------------------------------------

def test_bifurcate_defaults():
    cfg = parse_config(command="bifurcate")
    assert (cfg.axis, cfg.start, cfg.stop, cfg.n_points) == ("tau_r", 3.0, 14.0, 400)
    assert (cfg.da, cfg.alpha0, cfg.theta0) == (0.13, 0.9, 0.2)
    assert (cfg.gamma, cfg.beta, cfg.m, cfg.delta) == (15.0, 2.0, 1.5, 3.0)
    assert (cfg.pe_m, cfg.pe_h, cfg.le, cfg.theta_h) == (50.0, 50.0, 1.0, 0.0)
    assert (cfg.n_nodes, cfg.n_transient, cfg.n_record) == (101, 500, 512)
    assert cfg.dt_target == pytest.approx(0.002)


def test_da_axis_defaults():
    cfg = parse_config(flags={"axis": "da"}, command="bifurcate")
    assert (cfg.start, cfg.stop, cfg.n_points) == (0.05, 0.2, 300)
    assert cfg.tau_r == 5.5


def test_icmap_defaults():
    cfg = parse_config(command="icmap")
    assert cfg.tau_r == 6.5 and cfg.axis == "none"
    spec = cfg.icmap_spec()
    assert spec.alpha0_range == (0.0, 1.0) and spec.theta0_range == (0.0, 0.5)


def test_negative_peclet_names_key():
    with pytest.raises(ConfigError) as info:
        parse_config(flags={"pe_m": "-5"}, command="simulate")
    assert info.value.key == "pe_m"


@pytest.mark.parametrize("key, value", [("n_record", "0"), ("da", "-1"), ("le", "0"),
                                        ("dt_target", "0.01"), ("theta0", "-0.6"),
                                        ("axis", "gamma"), ("n_nodes", "x"),
                                        ("tau_r", "nan")])
def test_invalid_values_name_their_key(key, value):
    with pytest.raises(ConfigError) as info:
        parse_config(flags={key: value}, command="simulate")
    assert info.value.key == key


def test_unknown_key_rejected(tmp_path):
    path = _write(tmp_path, "da = 0.1\nbogus_key = 3\n")
    with pytest.raises(ConfigError) as info:
        parse_config(path, command="simulate")
    assert info.value.key == "bogus_key"


def test_flag_overrides_file(tmp_path):
    path = _write(tmp_path, "# comment\nda = 0.13\ntau_r = 4.0  # trailing\n")
    cfg = parse_config(path, {"da": "0.15"}, command="simulate")
    assert cfg.da == 0.15 and cfg.tau_r == 4.0


def test_dt_target_auto_uses_bound():
    cfg = parse_config(flags={"dt_target": "auto", "n_nodes": "51"}, command="simulate")
    assert cfg.dt_target == pytest.approx(0.002)


def test_effective_config_round_trips(tmp_path):
    out = tmp_path / "out"
    rc = main(["simulate", *FAST, "--da", "0.1", "-o", str(out)])
    assert rc == 0
    again = parse_config(str(out / "config.txt"))
    first = parse_config(flags={"da": "0.1", "tau_r": "1.0", "n_transient": "3",
                                "n_record": "8", "output_dir": str(out)},
                         command="simulate")
    assert again == first


def test_sweep_command_requires_axis():
    with pytest.raises(ConfigError):
        parse_config(flags={"axis": "none"}, command="bifurcate")
    with pytest.raises(ConfigError):
        parse_config(flags={"axis": "da"}, command="simulate")


# --- outputs -----------------------------------------------------------------

def test_simulate_writes_series(tmp_path):
    out = tmp_path / "sim"
    assert main(["simulate", *FAST, "-o", str(out)]) == 0
    rows = _rows(out / "series.csv")
    assert rows[0] == ["n", "tau", "alpha_out", "theta_out"]
    assert len(rows) == 9
    assert [int(r[0]) for r in rows[1:]] == list(range(8))
    assert float(rows[1][1]) == pytest.approx(4.0)
    # full precision for reproducibility
    assert all(len(r[2].replace(".", "").lstrip("0")) >= 15 for r in rows[1:]
               if float(r[2]) not in (0.0, 1.0))


def test_spectrum_of_constant_series(tmp_path):
    out = tmp_path / "spec"
    rc = main(["spectrum", *FAST, "--da", "0", "--n-transient", "60", "-o", str(out)])
    assert rc == 0
    rows = _rows(out / "spectrum.csv")
    assert rows[0] == ["k", "amplitude"] and len(rows) == 9
    amps = np.array([float(r[1]) for r in rows[1:]])
    assert np.all(amps[1:] <= amps[0] + 1e-300)


def test_poincare_csv(tmp_path):
    out = tmp_path / "pc"
    assert main(["poincare", *FAST, "-o", str(out)]) == 0
    rows = _rows(out / "poincare.csv")
    assert rows[0] == ["alpha_out", "theta_out"] and len(rows) == 9


def test_sweep_csv_headers(tmp_path):
    sweep = ["--start", "1.0", "--stop", "1.5", "--n-points", "2",
             "--n-transient", "2", "--n-record", "4", "-w", "1"]
    for cmd, files in [("bifurcate", {"bifurcation.csv": ["param", "alpha_out"],
                                      "classes.csv": ["param", "class", "period",
                                                      "entropy"]}),
                       ("entropy", {"entropy.csv": ["param", "entropy"]}),
                       ("spectrum", {"spectrum_sweep.csv": ["param", "k", "amplitude"]})]:
        out = tmp_path / cmd
        extra = ["--axis", "tau_r"] if cmd == "spectrum" else []
        assert main([cmd, *sweep, *extra, "-o", str(out)]) == 0
        for name, header in files.items():
            rows = _rows(out / name)
            assert rows[0] == header
    bif = _rows(tmp_path / "bifurcate" / "bifurcation.csv")
    assert len(bif) == 1 + 2 * 4
    assert len(_rows(tmp_path / "bifurcate" / "classes.csv")) == 3


def test_icmap_csv(tmp_path):
    out = tmp_path / "ic"
    args = ["icmap", "--tau-r", "1.0", "--n-transient", "2", "--n-record", "4",
            "--n-alpha", "2", "--n-theta", "2", "--theta0-max", "0.1",
            "-w", "1", "-o", str(out)]
    assert main(args) == 0
    rows = _rows(out / "icmap.csv")
    assert rows[0] == ["alpha0", "theta0", "class", "period", "entropy"]
    assert [(float(r[0]), float(r[1])) for r in rows[1:]] == [
        (0.0, 0.0), (0.0, 0.1), (1.0, 0.0), (1.0, 0.1)]


def test_exit_code_config_error(tmp_path, capsys):
    assert main(["simulate", "--pe-m", "-5", "-o", str(tmp_path)]) == 2
    assert "pe_m" in capsys.readouterr().err


def test_exit_code_numerical_failure(tmp_path, capsys):
    rc = main(["simulate", "--da", "1e6", "--tau-r", "0.5", "--n-transient", "2",
               "--n-record", "4", "-o", str(tmp_path)])
    assert rc == 3
    assert "cycle 0" in capsys.readouterr().err


def test_failed_sweep_rows_written_and_reported(tmp_path):
    out = tmp_path / "icf"
    args = ["icmap", "--tau-r", "0.5", "--n-transient", "1", "--n-record", "2",
            "--da", "50", "--n-nodes", "21", "--alpha0-min", "0.5", "--alpha0-max", "0.5",
            "--n-alpha", "1", "--n-theta", "1", "-w", "1", "-o", str(out)]
    assert main(args) == 3
    rows = _rows(out / "icmap.csv")
    assert rows[1][2] == "failed"


def test_plots_rendered(tmp_path):
    out = tmp_path / "plots"
    assert main(["simulate", *FAST, "--plots", "-o", str(out)]) == 0
    assert (out / "plot_simulate.py").exists()
    pngs = [f for f in os.listdir(out) if f.endswith(".png")]
    assert pngs and all((out / f).stat().st_size > 0 for f in pngs)
    for f in pngs:
        os.remove(out / f)
    # the emitted script renders the same figures on its own
    subprocess.run([sys.executable, str(out / "plot_simulate.py"), str(out), "simulate"],
                   check=True)
    assert sorted(f for f in os.listdir(out) if f.endswith(".png")) == sorted(pngs)


def test_cap_dc():
    k = np.arange(4)
    np.testing.assert_allclose(plotting.cap_dc([10.0, 1.0, 2.0, 0.5], k), [3.0, 1, 2, 0.5])


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "revflow", "simulate", *FAST,
                        "-o", str(tmp_path / "m")], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "m" / "series.csv").exists()


def test_run_config_is_frozen():
    with pytest.raises(Exception):
        RunConfig().da = 1.0
