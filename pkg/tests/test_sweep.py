import json
import math
import os

import pytest

from vibsqueeze import sweep
from vibsqueeze.errors import ConfigError, ConvergenceError
from vibsqueeze.presets import PRESETS, preset_columns, preset_config, wigner_preset_states
from vibsqueeze.sweep import (COLUMNS, THREADS_ENV, parse_config, parse_config_dict, resolve_point, resolve_threads,
                              run_point, run_sweep, table_to_csv, table_to_json, wigner_states, wigner_to_csv)

GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "sweep_header.csv")


def small_config(**extra):
    doc = {"model": ["atomic"], "system": {"detuning": {"value": 0.0, "unit": "meV"}},
           "axes": [{"name": "s", "scale": "log10", "min": 0.1, "max": 10, "count": 3}]}
    doc.update(extra)
    return parse_config_dict(doc)


def test_defaults():
    cfg = parse_config('{"system": {"s": 1}}')
    ph = cfg.block("phonons")
    assert ph["alpha"] == {"value": 0.027, "unit": "ps^2"}
    assert ph["cutoff"] == {"value": 2.2, "unit": "ps^-1"}
    assert ph["temperature"] == {"value": 4.0, "unit": "K"}
    spec = resolve_point(cfg)
    assert spec.system.emission_rate == pytest.approx(1 / 700)
    assert spec.system.detuning == 0.0 and spec.system.pure_dephasing_rate == 0.0
    assert cfg.models == ("full_phonon",)
    assert cfg.block("toggles")["polaron_shift_convention"] == "shifted"
    assert cfg.precision == 12


@pytest.mark.parametrize("doc,path", [
    ({"system": {"s": 1}, "phonons": {"temperature": {"value": 0, "unit": "K"}}}, "phonons.temperature"),
    ({"system": {"s": 1, "colour": 2}}, "system.colour"),
    ({"system": {"s": 1}, "phonons": {"alpha": {"value": 0.027, "unit": "meV"}}}, "phonons.alpha"),
    ({"system": {"s": 1, "rabi": {"value": 1, "unit": "ps^-1"}}}, "system"),
    ({"system": {}}, "system"),
    ({"system": {"s": -1}}, "system.s"),
    ({"system": {"s": 1}, "axes": [{"name": "s", "scale": "log10", "min": 0, "max": 1, "count": 3}]}, "axes[0]"),
    ({"system": {"s": 1}, "output": {"precision": 30}}, "output.precision"),
    ({"system": {"s": 1}, "model": ["exact"]}, "model[0]"),
])
def test_rejections_name_the_path(doc, path):
    with pytest.raises(ConfigError) as info:
        parse_config_dict(doc)
    assert info.value.path.startswith(path)


def test_invalid_json():
    with pytest.raises(ConfigError):
        parse_config("{")


def test_round_trip():
    for name in PRESETS:
        cfg = parse_config_dict(preset_config(name, 5))
        again = parse_config(cfg.to_json())
        assert again == cfg and again.to_json() == cfg.to_json()


def test_axis_grid():
    cfg = small_config()
    assert [v[0] for v in cfg.grid()] == pytest.approx([0.1, 1.0, 10.0])
    assert cfg.axes[0].column == "axis_s"


def test_point_at_atomic_optimum():
    cfg = parse_config_dict({"model": ["atomic", "full_phonon"], "system": {"s": 1 / 3},
                             "phonons": {"alpha": {"value": 0, "unit": "ps^2"}}})
    for model in cfg.models:
        rec = run_point(cfg, {}, model)
        assert rec["min_variance"] == pytest.approx(-0.125, abs=1e-10)
        assert rec["error_code"] == ""


def test_phonon_point_residuals():
    cfg = parse_config_dict({"system": {"s": 1e6, "detuning": {"value": 1, "unit": "meV"}}})
    rec = run_point(cfg)
    assert rec["error_code"] == ""
    assert 0 <= rec["steady_residual"] < 1e-10
    assert 0 <= rec["variational_residual"] < 1e-8
    assert rec["min_eigenvalue"] >= -1e-8
    assert rec["detuning_meV"] == pytest.approx(1.0)


def test_sweep_shape_and_header():
    table = run_sweep(small_config(), threads=1)
    assert len(table.rows) == 3
    assert table.columns == ("axis_s",) + COLUMNS
    assert table.column("s") == pytest.approx([0.1, 1.0, 10.0])
    cfg = parse_config_dict({"model": ["atomic"], "axes": [
        {"name": "s", "values": [1.0]}, {"name": "detuning", "values": [0.0], "unit": "meV"}]})
    header = table_to_csv(run_sweep(cfg, threads=1)).splitlines()[0] + "\n"
    with open(GOLDEN) as fh:
        assert header == fh.read()


def test_determinism_and_worker_count():
    cfg = parse_config_dict({"model": ["full_phonon", "atomic"], "axes": [
        {"name": "s", "values": [1.0, 1e6]}, {"name": "detuning", "values": [0.0, 1.0], "unit": "meV"}]})
    a = table_to_csv(run_sweep(cfg, threads=1))
    assert a == table_to_csv(run_sweep(cfg, threads=1))
    assert a == table_to_csv(run_sweep(cfg, threads=2))
    assert json.loads(table_to_json(run_sweep(cfg, threads=1)))["schema"] == sweep.TABLE_SCHEMA


def test_thread_resolution(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert resolve_threads() == 3
    assert resolve_threads(2) == 2
    assert resolve_threads(0) == (os.cpu_count() or 1)
    monkeypatch.delenv(THREADS_ENV)
    assert resolve_threads() == 1
    monkeypatch.setenv(THREADS_ENV, "many")
    with pytest.raises(ConfigError):
        resolve_threads()


def test_failures_land_in_error_column(monkeypatch):
    real = sweep.evaluate

    def flaky(spec, model, settings, comparison):
        if spec.system.s > 5:
            raise ConvergenceError("synthetic", residual=1.0)
        return real(spec, model, settings, comparison)

    monkeypatch.setattr(sweep, "evaluate", flaky)
    table = run_sweep(small_config(), threads=1)
    assert table.column("error_code") == ["", "", "no_convergence"]
    assert math.isnan(table.column("P")[2])
    assert table.column("s")[2] == pytest.approx(10.0)


def test_presets():
    for name in PRESETS:
        doc = preset_config(name, 7)
        cfg = parse_config_dict(doc)
        if name == "wigner":
            assert cfg.axes == ()
            continue
        assert all(c in COLUMNS for c in preset_columns(name))
        assert len(list(cfg.grid())) in (7, 14, 49)
    cfg = parse_config_dict(preset_config("fig2b", 101))
    assert cfg.axes[0].values[0] == pytest.approx(10**5.5) and cfg.axes[0].values[-1] == pytest.approx(10**7.5)
    assert cfg.models == ("full_phonon", "atomic", "thermal_approx")


def test_wigner_states():
    cfg = parse_config_dict(preset_config("wigner"))
    doc = wigner_states(cfg, wigner_preset_states()[:2])
    assert doc["schema"] == sweep.WIGNER_SCHEMA
    vac, weak = doc["grids"]
    assert vac["label"] == "vacuum"
    assert max(max(r) for r in vac["W"]) == pytest.approx(1 / math.pi, rel=1e-12)
    assert weak["observables"]["P"] > 0
    lines = wigner_to_csv(doc).splitlines()
    assert lines[0] == "label,x,p,W" and len(lines) == 1 + 2 * 201 * 201
