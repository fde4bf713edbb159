import csv
import io
import json
import subprocess
import sys

import pytest

from vibsqueeze import sweep
from vibsqueeze.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main
from vibsqueeze.errors import PositivityError
from vibsqueeze.presets import PRESETS
from vibsqueeze.sweep import COLUMNS, parse_config


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_point_atomic(capsys):
    code, out, _ = run(capsys, "point", "--s", str(1 / 3), "--model", "atomic")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert float(row["min_variance"]) == pytest.approx(-0.125, abs=1e-11)
    assert list(row) == list(COLUMNS)


def test_point_json_and_flags(capsys):
    code, out, _ = run(capsys, "point", "--s", "3", "--detuning-mev", "0.2", "--no-phonons", "--dephasing-rate",
                       "0.001", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    rec = dict(zip(doc["columns"], doc["rows"][0]))
    assert rec["alpha_ps2"] == 0.0 and rec["pure_dephasing_per_ps"] == 0.001
    assert rec["detuning_meV"] == pytest.approx(0.2)


def test_config_errors_exit_1(capsys, tmp_path):
    assert run(capsys, "point", "--s", "-1")[0] == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text('{"system": {"s": 1, "oops": 1}}')
    code, _, err = run(capsys, "point", "--config", str(bad))
    assert code == EXIT_CONFIG and "system.oops" in err
    assert run(capsys, "point", "--config", str(tmp_path / "missing.json"))[0] == EXIT_CONFIG
    assert run(capsys, "preset", "nope")[0] == EXIT_CONFIG


def test_runtime_error_exits_2(capsys, monkeypatch):
    def boom(*a, **k):
        raise PositivityError("synthetic", min_eigenvalue=-1.0)

    monkeypatch.setattr(sweep, "evaluate", boom)
    code, _, err = run(capsys, "point", "--s", "1")
    assert code == EXIT_RUNTIME and "positivity" in err


def test_sweep_with_failures_exits_0(capsys, monkeypatch, tmp_path):
    real = sweep.evaluate

    def flaky(spec, *a):
        if spec.system.s > 5:
            raise PositivityError("synthetic", min_eigenvalue=-1.0)
        return real(spec, *a)

    monkeypatch.setattr(sweep, "evaluate", flaky)
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"model": "atomic", "axes": [{"name": "s", "values": [1, 10]}]}))
    out = tmp_path / "o.csv"
    code, _, err = run(capsys, "sweep", "--config", str(cfg), "--out", str(out), "--threads", "1")
    assert code == EXIT_OK and "1 of 2" in err
    assert [r["error_code"] for r in rows(out.read_text())] == ["", "positivity"]


def test_preset_list_and_emit_round_trip(capsys):
    code, out, _ = run(capsys, "preset", "--list")
    assert code == EXIT_OK and [l.split()[0] for l in out.splitlines()] == list(PRESETS)
    code, out, _ = run(capsys, "preset", "fig2b", "--emit-config", "--count", "5")
    cfg = parse_config(out)
    assert len(cfg.axes[0].values) == 5


def test_wigner_vacuum(capsys):
    code, out, _ = run(capsys, "wigner", "--s", "1", "--vacuum", "--format", "json")
    assert code == EXIT_OK
    grid = json.loads(out)["grids"][0]
    assert grid["label"] == "vacuum" and len(grid["x"]) == 201


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "vibsqueeze", "point", "--s", "1", "--model", "atomic"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.startswith("model,")
