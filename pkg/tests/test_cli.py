import json
import subprocess
import sys

import pytest

from s3bell import cli


def test_csv_to_stdout(capsys):
    assert cli.main(["--trials", "5000", "--grid-points", "5", "--seed", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("eta,N_pp")
    assert len(out) == 6


def test_output_and_sidecar(tmp_path):
    path = tmp_path / "r.json"
    assert cli.main(["--trials", "5000", "--grid-points", "5", "--format", "json", "--output", str(path)]) == 0
    assert len(json.loads(path.read_text())) == 5
    assert (tmp_path / "r_plot.py").exists()


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# test manifest\ntrials = 3000\ngrid-points = 3\nkappa = 0\nseed = 9\n")
    assert cli.main(["--config", str(cfg), "--grid-points", "4"]) == 0
    out = capsys.readouterr()
    lines = out.out.splitlines()
    assert len(lines) == 5
    assert "kappa=0" in out.err and "trials=3000" in out.err


def test_bad_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert cli.main(["--config", str(cfg)]) == 1


def test_invalid_values_exit_nonzero():
    assert cli.main(["--trials", "0"]) == 1
    assert cli.main(["--kappa", "-3", "--trials", "10"]) == 1
    with pytest.raises(SystemExit) as info:
        cli.main(["--model", "nope"])
    assert info.value.code != 0


def test_chsh_summary(capsys):
    assert cli.main(["--trials", "20000", "--grid-points", "3", "--chsh"]) == 0
    assert "CHSH_quantum=2.82843" in capsys.readouterr().err


def test_sweep(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert cli.main(["--trials", "20000", "--grid-points", "5", "--sweep-kappa=0,1", "--output", str(out)]) == 0
    assert (tmp_path / "s_kappa0.csv").exists() and (tmp_path / "s_kappa1_plot.py").exists()
    assert "class=linear" in capsys.readouterr().out


def test_oracle_only(capsys):
    assert cli.main(["--oracle-only", "--grid-points", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("eta,p_pm")
    assert len(lines) == 4


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "s3bell", "--trials", "1000", "--grid-points", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("eta,")
