import subprocess
import sys

import numpy as np
import pytest

from cwenonet.cli import emit_snapshot_csv, emit_table_csv, main, parse_args, read_table_csv
from cwenonet.cweno import PARAM_SETS
from cwenonet.fv import BoundaryClosure, EdgeGrid, EdgeState
from cwenonet.harness import ConvergenceTable
from cwenonet.models import EulerModel, ShallowWaterModel


def test_parse_valid():
    cfg = parse_args(["--scenario", "recon-smooth", "--params", "sigma1", "--n-max", "14"])
    assert cfg.is_reconstruction
    assert (cfg.n_min, cfg.n_max) == (1, 14)
    assert cfg.params is PARAM_SETS["sigma1"]
    assert cfg.warnings == ()


def test_parse_custom_warns(capsys):
    cfg = parse_args(["--scenario", "recon-disc-i25", "--params", "custom", "--q", "2",
                      "--gamma0", "1", "--K1", "0.25", "--gamma1", "0"])
    assert cfg.params.q == 2 and cfg.params.gamma0 == 1
    assert "gamma0 >= q" in cfg.warnings
    assert "warning" in capsys.readouterr().err


def test_parse_custom_constant_eps():
    cfg = parse_args(["--scenario", "recon-smooth", "--params", "custom", "--eps", "1e-3",
                      "--gamma0", "2", "--K1", "1", "--gamma1", "1"])
    assert cfg.params.constant_eps and cfg.params.eps_const == 1e-3


@pytest.mark.parametrize("argv", [
    [],
    ["--scenario", "recon-smooth", "--bogus"],
    ["--scenario", "nowhere"],
    ["--scenario", "recon-smooth", "--n-min", "5", "--n-max", "2"],
    ["--scenario", "recon-smooth", "--q", "2"],
    ["--scenario", "recon-smooth", "--params", "custom", "--q", "2"],
    ["--scenario", "recon-smooth", "--emit", "snapshot"],
    ["--scenario", "dam-break-a", "--emit", "snapshot", "--times", "x"],
    ["--scenario", "dam-break-a", "--times", "0.3"],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        parse_args(argv)
    assert exc.value.code != 0
    assert "usage" in capsys.readouterr().err


def test_table_format(tmp_path):
    t = ConvergenceTable([1, 2], [0.125, 0.0625], [0.322, 0.0903])
    path = tmp_path / "t.csv"
    emit_table_csv(t, path)
    lines = path.read_bytes().decode("utf-8").split("\n")
    assert lines[:2] == ["n,h,error,eoc", "1,1.25e-01,3.220000e-01,"]
    assert lines[2] == "2,6.25e-02,9.030000e-02,1.83"
    assert lines[3] == "" and len(lines) == 4


def test_table_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    errs = list(np.sort(rng.uniform(1e-9, 1, 6))[::-1])
    t = ConvergenceTable(list(range(6)), [0.25 * 2.0 ** -n for n in range(6)], errs)
    path = tmp_path / "t.csv"
    emit_table_csv(t, path)
    rows = read_table_csv(path)
    for (n, h, e, r), (n2, h2, e2, r2) in zip(t.rows, rows):
        assert n == n2
        assert h2 == pytest.approx(h, rel=5e-3)
        assert e2 == pytest.approx(e, rel=5e-7)
        assert (r is None and r2 is None) or r2 == pytest.approx(r, abs=5e-3)


def test_snapshot_files(tmp_path):
    g = EdgeGrid(0.0, 0.3, 3)
    sw = EdgeState(g, np.column_stack([np.ones(3), np.zeros(3)]), ShallowWaterModel(),
                   PARAM_SETS["sigma1"], BoundaryClosure("wall", "left"),
                   BoundaryClosure("wall", "right"), name="ch")
    eu = EdgeState(g, EulerModel().conserved(np.ones(3), 0.0, 1.0), EulerModel(),
                   PARAM_SETS["sigma1"], name="gas")
    files = emit_snapshot_csv([sw, eu], tmp_path)
    text = [open(f, encoding="utf-8").read() for f in files]
    assert text[0].splitlines()[0] == "x_center,h,q"
    assert text[1].splitlines()[0] == "x_center,rho,m,E"
    assert len(text[0].splitlines()) == 4
    again = emit_snapshot_csv([sw, eu], tmp_path)
    assert [open(f, "rb").read() for f in again] == [t.encode() for t in text]


def test_main_table_stdout(capsys):
    assert main(["--scenario", "recon-smooth", "--n-max", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "n,h,error,eoc" and out[1].startswith("1,1.25e-01,3.2")


def test_main_snapshot_deterministic(tmp_path):
    argv = ["--scenario", "dam-break-a", "--emit", "snapshot", "--n-min", "0",
            "--times", "0.1,0.2"]
    assert main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert main(argv + ["--out", str(tmp_path / "b")]) == 0
    for name in ("t0.1_channel.csv", "t0.2_channel.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_main_runtime_error_exit_code(capsys):
    assert main(["--scenario", "traffic-jam", "--n-max", "1"]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("cwenonet: error")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "cwenonet"], capture_output=True, text=True)
    assert r.returncode == 2 and "usage" in r.stderr
