import json
import os
import subprocess
import sys

import pytest

from critmet import cli, presets


def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list(capsys):
    code, out, _ = run_cli(["list"], capsys)
    assert code == 0 and "kerr steady" in out


def test_sweep_to_stdout(capsys):
    code, out, _ = run_cli(["lz", "qfi", "--coupling-grid", "0:2:3"], capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("omega,coupling,qfi")
    assert lines[2].split(",")[2] == "0.25"


def test_equals_syntax_and_lists(capsys):
    code, out, _ = run_cli(["tfim", "qfi", "--n-spins=4,10", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert [r[0] for r in doc["rows"]] == [4, 10]


def test_exit_codes(capsys, tmp_path):
    assert run_cli([], capsys)[0] == 2
    assert run_cli(["ising", "qfi"], capsys)[0] == 2
    assert run_cli(["lz", "qfi", "--coupling-grid", "0:1:0"], capsys)[0] == 2
    assert run_cli(["lz", "qfi", "--coupling", "abc"], capsys)[0] == 2
    assert run_cli(["lz", "qfi", "--coupling"], capsys)[0] == 2
    assert run_cli(["lz", "qfi", "--coupling", "1", "--workers", "0"], capsys)[0] == 2
    assert run_cli(["lz", "qfi", "--coupling", "1", "--fit", "a"], capsys)[0] == 2
    assert run_cli(["preset", "nope"], capsys)[0] == 2
    # domain errors: rows with an error column normally, exit 3 in strict mode
    code, out, _ = run_cli(["oscillator", "qfi", "--coupling", "1.5"], capsys)
    assert code == 0 and "DomainError" in out
    code, _, err = run_cli(["oscillator", "qfi", "--coupling", "1.5", "--strict"], capsys)
    assert code == 3 and "domain error" in err
    code, _, err = run_cli(["lz", "qfi", "--coupling", "1", "--out", str(tmp_path / "no" / "x.csv")], capsys)
    assert code == 4


def test_workers_environment(capsys, monkeypatch):
    monkeypatch.setenv("CRITMET_WORKERS", "2")
    code, par, _ = run_cli(["lz", "qfi", "--coupling-grid", "0:3:20"], capsys)
    monkeypatch.setenv("CRITMET_WORKERS", "1")
    _, ser, _ = run_cli(["lz", "qfi", "--coupling-grid", "0:3:20"], capsys)
    assert code == 0 and par == ser
    monkeypatch.setenv("CRITMET_WORKERS", "many")
    assert run_cli(["lz", "qfi", "--coupling", "1"], capsys)[0] == 2


def test_out_writes_figure(capsys, tmp_path):
    out = tmp_path / "lz.csv"
    code, _, _ = run_cli(["lz", "qfi", "--coupling-grid", "0:3:31", "--out", str(out), "--fit", "coupling:qfi:linear"],
                         capsys)
    assert code == 0
    assert out.exists() and (tmp_path / "lz.png").exists()
    meta = json.loads((tmp_path / "lz.csv.meta.json").read_text())
    assert "qfi~coupling:linear" in meta["fits"]
    code, _, _ = run_cli(["lz", "qfi", "--coupling", "1", "--out", str(tmp_path / "one.json"), "--format", "json"],
                         capsys)
    assert code == 0 and not (tmp_path / "one.png").exists()


def test_preset_runs(capsys, tmp_path):
    code, out, _ = run_cli(["preset", "tfim-closed-form", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert (tmp_path / "tfim_closed_form.csv").exists()
    assert (tmp_path / "tfim_closed_form.png").exists()


def test_every_preset_registered():
    assert len(presets.PRESETS) == 13


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "critmet.cli", "list"], capture_output=True, text=True)
    assert res.returncode == 0 and "mrlm occupation" in res.stdout
