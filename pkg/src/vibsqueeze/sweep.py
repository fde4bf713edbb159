"""Configuration, single-point evaluation and deterministic parameter sweeps.

A configuration is a strict JSON document (the README lists every block
and key).  Dimensional quantities are written as
``{"value": x, "unit": u}`` with explicit units; unknown keys are errors.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .atomic import atomic_coherence, atomic_steady
from .core import (HBAR_MEV_PS, DensityOperator2, PhononParams, SystemParams, angular_frequency_to_energy,
                   density_from_bloch, rabi_from_s)
from .errors import ConfigError, VibSqueezeError
from .master import assemble_liouvillian, steady_state
from .metrology import flux_matched_sv_merit, flux_matched_xi, rf_merit, sv_optimal
from .observables import observables, thermal_prediction, wigner
from .spectral import QuadratureSettings
from .variational import DETUNING_SIGNS, FRAMES, solve_variational

CONFIG_SCHEMA = "vibsqueeze.config/1"
TABLE_SCHEMA = "vibsqueeze.table/1"
WIGNER_SCHEMA = "vibsqueeze.wigner/1"
MODELS = ("full_phonon", "atomic", "thermal_approx")
THREADS_ENV = "VIBSQUEEZE_THREADS"

RATE_UNITS = ("ps^-1", "meV")
UNIT_TAGS = {"ps^-1": "per_ps", "meV": "meV", "K": "K", "ps^2": "ps2", "rad": "rad", "ps": "ps", "": ""}

# quantity kinds per parameter name
_KINDS = {
    "rabi": "rate",
    "detuning": "rate",
    "emission_rate": "emission",
    "pure_dephasing_rate": "rate",
    "alpha": "alpha",
    "cutoff": "rate",
    "temperature": "temperature",
    "rabi_phase": "angle",
    "s": "number",
    "p_alpha": "number",
}
_UNITS = {
    "rate": RATE_UNITS,
    "emission": RATE_UNITS + ("ps",),
    "alpha": ("ps^2",),
    "temperature": ("K",),
    "angle": ("rad",),
    "number": ("",),
}
AXIS_NAMES = tuple(_KINDS)

#: column order of the CSV contract; axes columns are prepended
COLUMNS = (
    "model",
    "s", "d", "rabi_per_ps", "rabi_phase", "detuning_per_ps", "detuning_meV", "emission_rate_per_ps",
    "pure_dephasing_per_ps", "alpha_ps2", "cutoff_per_ps", "temperature_K",
    "rabi_r_per_ps", "detuning_r_per_ps", "B", "eta_r_per_ps", "free_energy_meV", "iterations", "variational_start",
    "P", "P_coh", "P_inc", "min_variance", "dipole_phase", "bloch_length", "theta",
    "heisenberg_lhs", "heisenberg_rhs", "g2_zero",
    "p_alpha", "F_rf", "F_sv_matched", "xi_matched", "F_sv_optimal", "F_coherent",
    "steady_residual", "variational_residual", "min_eigenvalue",
    "error_code",
)


def to_internal(name, value, unit):
    """Convert a configured quantity to internal units (ps^-1, ps^2, K, rad)."""
    kind = _KINDS[name]
    if kind == "emission" and unit == "ps":
        return 1.0 / value
    if unit == "meV":
        return value / HBAR_MEV_PS
    return float(value)


# parsing helpers -------------------------------------------------------------

def _obj(v, path, allowed):
    if not isinstance(v, dict):
        raise ConfigError("expected an object", path)
    for k in v:
        if k not in allowed:
            raise ConfigError(f"unknown key {k!r} (allowed: {', '.join(allowed)})", f"{path}.{k}" if path else k)
    return v


def _num(v, path, *, positive=False, nonneg=False, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError("expected a number", path)
    if not math.isfinite(v):
        raise ConfigError("must be finite", path)
    if integer and (not isinstance(v, int)):
        raise ConfigError("expected an integer", path)
    if positive and not v > 0:
        raise ConfigError("must be > 0", path)
    if nonneg and v < 0:
        raise ConfigError("must be >= 0", path)
    return v


def _unit(name, unit, path):
    allowed = _UNITS[_KINDS[name]]
    if unit not in allowed:
        raise ConfigError(f"unit {unit!r} not allowed for {name} (allowed: {', '.join(repr(a) for a in allowed)})", path)
    return unit


def _quantity(name, v, path, *, positive=False, nonneg=False):
    kind = _KINDS[name]
    if kind == "number":
        return {"value": _num(v, path, positive=positive, nonneg=nonneg), "unit": ""}
    _obj(v, path, ("value", "unit"))
    if "value" not in v or "unit" not in v:
        raise ConfigError("quantity needs both 'value' and 'unit'", path)
    unit = _unit(name, v["unit"], f"{path}.unit")
    val = _num(v["value"], f"{path}.value", positive=positive, nonneg=nonneg)
    return {"value": val, "unit": unit}


@dataclass(frozen=True)
class Axis:
    name: str
    unit: str
    values: tuple
    scale: str = "values"
    min: float | None = None
    max: float | None = None
    count: int | None = None

    @property
    def column(self) -> str:
        tag = UNIT_TAGS.get(self.unit, self.unit)
        return f"axis_{self.name}" + (f"_{tag}" if tag else "")

    def to_dict(self):
        d = {"name": self.name}
        if self.unit:
            d["unit"] = self.unit
        if self.scale == "values":
            d["values"] = list(self.values)
        else:
            d.update({"scale": self.scale, "min": self.min, "max": self.max, "count": self.count})
        return d


def _axis(v, path):
    _obj(v, path, ("name", "scale", "min", "max", "count", "unit", "values"))
    name = v.get("name")
    if name not in AXIS_NAMES:
        raise ConfigError(f"unknown axis name {name!r} (allowed: {', '.join(AXIS_NAMES)})", f"{path}.name")
    kind = _KINDS[name]
    if kind == "number" or kind == "angle" and "unit" not in v:
        unit = v.get("unit", "" if kind == "number" else "rad")
    else:
        if "unit" not in v:
            raise ConfigError(f"axis {name!r} needs a unit", f"{path}.unit")
        unit = v["unit"]
    _unit(name, unit, f"{path}.unit")
    if "values" in v:
        if any(k in v for k in ("scale", "min", "max", "count")):
            raise ConfigError("give either 'values' or 'scale/min/max/count'", path)
        vals = v["values"]
        if not isinstance(vals, list) or not vals:
            raise ConfigError("expected a non-empty list", f"{path}.values")
        vals = tuple(_num(x, f"{path}.values[{i}]") for i, x in enumerate(vals))
        return Axis(name, unit, vals)
    for k in ("scale", "min", "max", "count"):
        if k not in v:
            raise ConfigError(f"missing {k!r}", f"{path}.{k}")
    scale = v["scale"]
    if scale not in ("linear", "log10"):
        raise ConfigError("scale must be 'linear' or 'log10'", f"{path}.scale")
    lo = _num(v["min"], f"{path}.min")
    hi = _num(v["max"], f"{path}.max")
    count = _num(v["count"], f"{path}.count", integer=True)
    if count < 1:
        raise ConfigError("axis needs at least one point", f"{path}.count")
    if scale == "log10" and not (lo > 0 and hi > 0):
        raise ConfigError("log10 axes need min > 0 and max > 0", f"{path}.min")
    if count == 1:
        vals = (float(lo),)
    elif scale == "linear":
        vals = tuple(float(x) for x in np.linspace(lo, hi, count))
    else:
        vals = tuple(float(x) for x in np.logspace(math.log10(lo), math.log10(hi), count))
    return Axis(name, unit, vals, scale, lo, hi, count)


DEFAULT_SYSTEM = {
    "detuning": {"value": 0.0, "unit": "meV"},
    "emission_rate": {"value": 700.0, "unit": "ps"},
    "pure_dephasing_rate": {"value": 0.0, "unit": "ps^-1"},
    "rabi_phase": {"value": 0.0, "unit": "rad"},
}
DEFAULT_PHONONS = {
    "alpha": {"value": 0.027, "unit": "ps^2"},
    "cutoff": {"value": 2.2, "unit": "ps^-1"},
    "temperature": {"value": 4.0, "unit": "K"},
}
DEFAULT_TOGGLES = {
    "include_sideband_B2": True,
    "polaron_shift_convention": "shifted",
    "frame": "variational",
    "detuning_sign": "standard",
    "zero_temperature_thermal": False,
}
DEFAULT_METROLOGY = {"p_alpha": 1.0, "comparison": ["squeezed_vacuum", "coherent"]}
DEFAULT_OUTPUT = {"path": None, "format": "csv", "precision": 12}
DEFAULT_QUADRATURE = {"rel_tol": 1e-9, "abs_tol": 1e-12, "cutoff_multiplier": 12.0}


def _freeze(d):
    return json.dumps(d, sort_keys=True)


@dataclass(frozen=True)
class SweepConfig:
    """Validated sweep configuration.  Blocks are stored in canonical form."""

    models: tuple
    system: str
    phonons: str
    axes: tuple
    toggles: str
    metrology: str
    output: str
    quadrature: str
    label: str = ""

    def block(self, name):
        return json.loads(getattr(self, name))

    def to_dict(self):
        return {
            "schema": CONFIG_SCHEMA,
            "label": self.label,
            "model": list(self.models),
            "system": self.block("system"),
            "phonons": self.block("phonons"),
            "axes": [a.to_dict() for a in self.axes],
            "toggles": self.block("toggles"),
            "metrology": self.block("metrology"),
            "output": self.block("output"),
            "quadrature": self.block("quadrature"),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def with_changes(self, *, models=None, system=None, phonons=None, toggles=None, output=None, axes=None):
        d = self.to_dict()
        if models is not None:
            d["model"] = list(models)
        for name, upd in (("system", system), ("phonons", phonons), ("toggles", toggles), ("output", output)):
            if upd:
                d[name].update(upd)
        if axes is not None:
            d["axes"] = axes
        return parse_config_dict(d)

    @property
    def settings(self) -> QuadratureSettings:
        q = self.block("quadrature")
        return QuadratureSettings(rel_tol=q["rel_tol"], abs_tol=q["abs_tol"], cutoff_multiplier=q["cutoff_multiplier"])

    @property
    def precision(self) -> int:
        return self.block("output")["precision"]

    def grid(self):
        """Axis-value tuples in lexicographic order (first axis slowest)."""
        return list(itertools.product(*[a.values for a in self.axes])) if self.axes else [()]


def parse_config(text: str) -> SweepConfig:
    """Parse and validate a JSON configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}") from exc
    return parse_config_dict(doc)


def parse_config_dict(doc) -> SweepConfig:
    _obj(doc, "", ("schema", "label", "model", "system", "phonons", "axes", "toggles", "metrology", "output",
                   "quadrature"))
    if "schema" in doc and doc["schema"] != CONFIG_SCHEMA:
        raise ConfigError(f"unsupported schema {doc['schema']!r}, expected {CONFIG_SCHEMA!r}", "schema")
    label = doc.get("label", "")
    if not isinstance(label, str):
        raise ConfigError("expected a string", "label")

    models = doc.get("model", "full_phonon")
    if isinstance(models, str):
        models = [models]
    if not isinstance(models, list) or not models:
        raise ConfigError("expected a model name or a non-empty list of them", "model")
    for i, m in enumerate(models):
        if m not in MODELS:
            raise ConfigError(f"unknown model {m!r} (allowed: {', '.join(MODELS)})", f"model[{i}]")

    # system
    sysd = _obj(doc.get("system", {}), "system", ("s", "rabi", "rabi_phase", "detuning", "emission_rate",
                                                   "pure_dephasing_rate"))
    system = {}
    if "s" in sysd and "rabi" in sysd:
        raise ConfigError("give either 's' or 'rabi', not both", "system")
    if "s" in sysd:
        system["s"] = _num(sysd["s"], "system.s", nonneg=True)
    if "rabi" in sysd:
        system["rabi"] = _quantity("rabi", sysd["rabi"], "system.rabi", nonneg=True)
    for k, default in DEFAULT_SYSTEM.items():
        if k in sysd:
            system[k] = _quantity(k, sysd[k], f"system.{k}", positive=(k == "emission_rate"),
                                  nonneg=(k == "pure_dephasing_rate"))
        else:
            system[k] = dict(default)

    phd = _obj(doc.get("phonons", {}), "phonons", tuple(DEFAULT_PHONONS))
    phonons = {}
    for k, default in DEFAULT_PHONONS.items():
        if k in phd:
            phonons[k] = _quantity(k, phd[k], f"phonons.{k}", positive=(k != "alpha"), nonneg=True)
        else:
            phonons[k] = dict(default)

    axes_doc = doc.get("axes", [])
    if not isinstance(axes_doc, list):
        raise ConfigError("expected a list", "axes")
    axes = tuple(_axis(a, f"axes[{i}]") for i, a in enumerate(axes_doc))
    names = [a.name for a in axes]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate axis name", "axes")
    if "s" in names and "rabi" in names:
        raise ConfigError("axes 's' and 'rabi' are mutually exclusive", "axes")
    if not ({"s", "rabi"} & set(names)) and "s" not in system and "rabi" not in system:
        raise ConfigError("the drive needs 'system.s', 'system.rabi' or an axis named 's' or 'rabi'", "system")
    for a in axes:
        for i, v in enumerate(a.values):
            bad = ((a.name in ("s", "rabi", "pure_dephasing_rate", "alpha", "p_alpha") and v < 0)
                   or (a.name in ("temperature", "emission_rate", "cutoff") and not v > 0))
            if bad:
                raise ConfigError(f"value {v} out of range for {a.name}", f"axes[{names.index(a.name)}].values[{i}]")

    tog = _obj(doc.get("toggles", {}), "toggles", tuple(DEFAULT_TOGGLES))
    toggles = dict(DEFAULT_TOGGLES)
    for k, v in tog.items():
        if k in ("include_sideband_B2", "zero_temperature_thermal"):
            if not isinstance(v, bool):
                raise ConfigError("expected true or false", f"toggles.{k}")
        elif k == "polaron_shift_convention" and v not in ("shifted", "raw"):
            raise ConfigError("expected 'shifted' or 'raw'", f"toggles.{k}")
        elif k == "frame" and v not in FRAMES:
            raise ConfigError(f"expected one of {', '.join(FRAMES)}", f"toggles.{k}")
        elif k == "detuning_sign" and v not in DETUNING_SIGNS:
            raise ConfigError(f"expected one of {', '.join(DETUNING_SIGNS)}", f"toggles.{k}")
        toggles[k] = v

    met = _obj(doc.get("metrology", {}), "metrology", tuple(DEFAULT_METROLOGY))
    metrology = {"p_alpha": DEFAULT_METROLOGY["p_alpha"], "comparison": list(DEFAULT_METROLOGY["comparison"])}
    if "p_alpha" in met:
        metrology["p_alpha"] = _num(met["p_alpha"], "metrology.p_alpha", positive=True)
    if "comparison" in met:
        comp = met["comparison"]
        if not isinstance(comp, list) or any(c not in ("squeezed_vacuum", "coherent") for c in comp):
            raise ConfigError("expected a list drawn from 'squeezed_vacuum', 'coherent'", "metrology.comparison")
        metrology["comparison"] = list(comp)

    out = _obj(doc.get("output", {}), "output", tuple(DEFAULT_OUTPUT))
    output = dict(DEFAULT_OUTPUT)
    if "path" in out:
        if out["path"] is not None and not isinstance(out["path"], str):
            raise ConfigError("expected a string or null", "output.path")
        output["path"] = out["path"]
    if "format" in out:
        if out["format"] not in ("csv", "json"):
            raise ConfigError("expected 'csv' or 'json'", "output.format")
        output["format"] = out["format"]
    if "precision" in out:
        p = _num(out["precision"], "output.precision", integer=True)
        if not 1 <= p <= 17:
            raise ConfigError("precision must be between 1 and 17", "output.precision")
        output["precision"] = p

    qd = _obj(doc.get("quadrature", {}), "quadrature", tuple(DEFAULT_QUADRATURE))
    quad = dict(DEFAULT_QUADRATURE)
    for k in quad:
        if k in qd:
            quad[k] = float(_num(qd[k], f"quadrature.{k}", positive=True))
    if quad["cutoff_multiplier"] < 6:
        raise ConfigError("must be >= 6", "quadrature.cutoff_multiplier")

    return SweepConfig(tuple(models), _freeze(system), _freeze(phonons), axes, _freeze(toggles),
                       _freeze(metrology), _freeze(output), _freeze(quad), label)


# evaluation -----------------------------------------------------------------

@dataclass(frozen=True)
class PointSpec:
    """Fully resolved parameters of one grid point."""

    system: SystemParams
    phonons: PhononParams
    p_alpha: float
    toggles: dict = field(hash=False)


def resolve_point(cfg: SweepConfig, overrides: dict | None = None) -> PointSpec:
    """Apply overrides and convert to internal units.

    Override values are plain numbers in the unit of the matching axis (or
    the internal unit when no axis has that name), or explicit
    ``{"value", "unit"}`` quantities.
    """
    system = cfg.block("system")
    phon = cfg.block("phonons")
    met = cfg.block("metrology")
    units = {a.name: a.unit for a in cfg.axes}
    overrides = dict(overrides or {})
    for name, v in overrides.items():
        if name not in AXIS_NAMES:
            raise ConfigError(f"unknown parameter {name!r}", name)
        unit = units.get(name)
        if isinstance(v, dict):
            q = _quantity(name, v, name)
            v, unit = q["value"], q["unit"]
        elif unit is None:
            kind = _KINDS[name]
            unit = {"rate": "ps^-1", "emission": "ps^-1", "alpha": "ps^2", "temperature": "K", "angle": "rad"}.get(kind, "")
        if name == "s":
            system.pop("rabi", None)
            system["s"] = v
        elif name == "p_alpha":
            met["p_alpha"] = v
        elif name in phon:
            phon[name] = {"value": v, "unit": unit}
        else:
            if name == "rabi":
                system.pop("s", None)
            system[name] = {"value": v, "unit": unit}

    def q(block, k):
        return to_internal(k, block[k]["value"], block[k]["unit"])

    gamma = q(system, "emission_rate")
    if "s" in system:
        rabi = float(rabi_from_s(system["s"], gamma))
    else:
        rabi = q(system, "rabi")
    sp = SystemParams(rabi, q(system, "detuning"), gamma, q(system, "rabi_phase"), q(system, "pure_dephasing_rate"))
    pp = PhononParams(q(phon, "alpha"), q(phon, "cutoff"), q(phon, "temperature"))
    return PointSpec(sp, pp, float(met["p_alpha"]), cfg.block("toggles"))


def _nan_record():
    return {c: math.nan for c in COLUMNS}


def _fill_obs(rec, obs):
    rec.update(P=obs.P, P_coh=obs.P_coh, P_inc=obs.P_inc, min_variance=obs.min_variance,
               dipole_phase=obs.dipole_phase, bloch_length=obs.bloch_length, theta=obs.theta,
               heisenberg_lhs=obs.heisenberg_lhs, heisenberg_rhs=obs.heisenberg_rhs, g2_zero=obs.g2_zero)


def _fill_metrology(rec, obs, p_alpha, comparison):
    rec["p_alpha"] = p_alpha
    rec["F_rf"] = rf_merit(obs, p_alpha)
    if "squeezed_vacuum" in comparison:
        rec["F_sv_matched"] = flux_matched_sv_merit(obs.P, p_alpha)
        rec["xi_matched"] = flux_matched_xi(obs.P)
        rec["F_sv_optimal"] = sv_optimal(p_alpha)[1]
    if "coherent" in comparison:
        rec["F_coherent"] = 1.0


def _fill_variational(rec, vs):
    rec.update(rabi_r_per_ps=vs.rabi_r, detuning_r_per_ps=vs.detuning_r, B=vs.B, eta_r_per_ps=vs.eta_r,
               free_energy_meV=vs.free_energy_bound, iterations=vs.iterations, variational_start=vs.start,
               variational_residual=vs.residual)


def evaluate(spec: PointSpec, model: str, settings: QuadratureSettings, comparison=("squeezed_vacuum", "coherent")):
    """Compute one record for a resolved point.  Raises on failure."""
    sp, pp, tg = spec.system, spec.phonons, spec.toggles
    rec = _nan_record()
    rec.update(model=model, s=sp.s, d=sp.d, rabi_per_ps=sp.rabi_magnitude, rabi_phase=sp.rabi_phase,
               detuning_per_ps=sp.detuning, detuning_meV=angular_frequency_to_energy(sp.detuning),
               emission_rate_per_ps=sp.emission_rate, pure_dephasing_per_ps=sp.pure_dephasing_rate,
               alpha_ps2=pp.alpha, cutoff_per_ps=pp.cutoff, temperature_K=pp.temperature, error_code="")
    sideband = tg["include_sideband_B2"]
    kw = dict(frame=tg["frame"], detuning_convention=tg["polaron_shift_convention"],
              detuning_sign=tg["detuning_sign"])
    if model == "atomic" and sp.pure_dephasing_rate == 0.0:
        ap = atomic_steady(sp.s, sp.d)
        c = atomic_coherence(sp.rabi, sp.detuning, sp.emission_rate)
        rho = DensityOperator2.from_matrix(np.array([[1 - ap.P, np.conj(c)], [c, ap.P]]))
        obs = observables(rho, 1.0)
        rec.update(rabi_r_per_ps=sp.rabi_magnitude, detuning_r_per_ps=sp.detuning, B=1.0,
                   eta_r_per_ps=math.hypot(sp.rabi_magnitude, sp.detuning), iterations=0,
                   variational_start="closed_form", steady_residual=0.0, variational_residual=0.0,
                   min_eigenvalue=rho.min_eigenvalue)
    elif model in ("full_phonon", "atomic"):
        if model == "atomic":
            pp = pp.replace(alpha=0.0)
        vs = solve_variational(sp, pp, settings, **kw)
        L = assemble_liouvillian(vs, sp, pp, settings)
        st = steady_state(L, return_residual=True)
        obs = observables(st.state, vs.B if sideband else 1.0)
        _fill_variational(rec, vs)
        rec.update(steady_residual=st.residual, min_eigenvalue=st.state.min_eigenvalue, alpha_ps2=pp.alpha)
    elif model == "thermal_approx":
        vs = solve_variational(sp, pp, settings, **kw)
        hb = math.inf if tg["zero_temperature_thermal"] else pp.hbar_beta
        rabi_r = vs.rabi_r * complex(math.cos(sp.rabi_phase), math.sin(sp.rabi_phase))
        th = thermal_prediction(rabi_r, vs.detuning_r, hb, vs.B, sideband=sideband)
        obs = observables(density_from_bloch(th.bloch), vs.B if sideband else 1.0)
        _fill_variational(rec, vs)
        rec.update(steady_residual=0.0, min_eigenvalue=0.5 * (1 - th.bloch.length))
    else:
        raise ConfigError(f"unknown model {model!r}", "model")
    _fill_obs(rec, obs)
    _fill_metrology(rec, obs, spec.p_alpha, comparison)
    return rec


def run_point(cfg: SweepConfig, overrides: dict | None = None, model: str | None = None, *,
              raise_errors: bool = False) -> dict:
    """Evaluate one grid point and return a flat record.

    Solver failures are caught and reported in ``error_code`` unless
    ``raise_errors`` is set; configuration errors always propagate.
    """
    model = model or cfg.models[0]
    spec = resolve_point(cfg, overrides)
    comparison = cfg.block("metrology")["comparison"]
    try:
        return evaluate(spec, model, cfg.settings, comparison)
    except ConfigError:
        raise
    except (VibSqueezeError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        if raise_errors:
            raise
        rec = _nan_record()
        sp = spec.system
        rec.update(model=model, s=sp.s, d=sp.d, rabi_per_ps=sp.rabi_magnitude, rabi_phase=sp.rabi_phase,
                   detuning_per_ps=sp.detuning, detuning_meV=angular_frequency_to_energy(sp.detuning),
                   emission_rate_per_ps=sp.emission_rate, pure_dephasing_per_ps=sp.pure_dephasing_rate,
                   alpha_ps2=spec.phonons.alpha, cutoff_per_ps=spec.phonons.cutoff,
                   temperature_K=spec.phonons.temperature, error_code=getattr(exc, "code", "runtime_error"))
        return rec


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, then the environment variable, then 1; 0 means all CPUs."""
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        if env is not None and env.strip():
            try:
                threads = int(env)
            except ValueError as exc:
                raise ConfigError(f"{THREADS_ENV} must be an integer", THREADS_ENV) from exc
        else:
            threads = 1
    if threads < 0:
        raise ConfigError("thread count must be >= 0", "threads")
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads


def _task(args):
    cfg, overrides, model = args
    return run_point(cfg, overrides, model)


@dataclass(frozen=True)
class SweepTable:
    columns: tuple
    rows: tuple
    config: SweepConfig

    def records(self):
        return [dict(zip(self.columns, r)) for r in self.rows]

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def run_sweep(cfg: SweepConfig, threads: int | None = None) -> SweepTable:
    """Evaluate the cartesian product of the axes for every configured model.

    Rows come out in lexicographic axis order with the model varying
    fastest, independent of the worker count.
    """
    n = resolve_threads(threads)
    tasks = []
    keys = []
    for values in cfg.grid():
        ov = {a.name: v for a, v in zip(cfg.axes, values)}
        for m in cfg.models:
            tasks.append((cfg, ov, m))
            keys.append(values)
    if n <= 1 or len(tasks) <= 1:
        results = [_task(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (4 * n))
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_task, tasks, chunksize=chunk))
    axis_cols = tuple(a.column for a in cfg.axes)
    rows = tuple(tuple(k) + tuple(r[c] for c in COLUMNS) for k, r in zip(keys, results))
    return SweepTable(axis_cols + COLUMNS, rows, cfg)


# output ---------------------------------------------------------------------

def format_value(v, precision=12):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(float(v), f".{precision}g")
    return str(v)


def table_to_csv(table: SweepTable, precision: int | None = None) -> str:
    prec = table.config.precision if precision is None else precision
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for r in table.rows:
        w.writerow([format_value(v, prec) for v in r])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        return None if not math.isfinite(v) else float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def table_to_json(table: SweepTable) -> str:
    doc = {
        "schema": TABLE_SCHEMA,
        "columns": list(table.columns),
        "rows": [[_json_value(v) for v in r] for r in table.rows],
        "config": table.config.to_dict(),
    }
    return json.dumps(doc, indent=1)


def render_table(table: SweepTable, fmt: str | None = None) -> str:
    fmt = fmt or table.config.block("output")["format"]
    return table_to_csv(table) if fmt == "csv" else table_to_json(table)


# wigner ---------------------------------------------------------------------

def wigner_states(cfg: SweepConfig, states: list):
    """Wigner grids for a list of ``{"label", "vacuum"?, overrides...}`` states."""
    grids = []
    for i, st in enumerate(states):
        st = dict(st)
        label = st.pop("label", f"state{i}")
        if st.pop("vacuum", False):
            rho = DensityOperator2.from_matrix(np.diag([1.0, 0.0]))
            rec = None
        else:
            spec = resolve_point(cfg, st)
            vs = solve_variational(spec.system, spec.phonons, cfg.settings)
            rho = steady_state(assemble_liouvillian(vs, spec.system, spec.phonons, cfg.settings))
            rec = observables(rho, vs.B).as_dict()
        g = wigner(rho)
        grids.append({"label": label, "overrides": st, "rho": [[[complex(x).real, complex(x).imag] for x in row]
                                                               for row in rho.matrix()],
                      "observables": rec, "x": g["x"].tolist(), "p": g["p"].tolist(), "W": g["W"].tolist()})
    return {"schema": WIGNER_SCHEMA, "indexing": "W[i][j] = W(x[i], p[j])", "grids": grids}


def wigner_to_csv(doc, precision=12) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "x", "p", "W"])
    for g in doc["grids"]:
        for i, x in enumerate(g["x"]):
            for j, p in enumerate(g["p"]):
                w.writerow([g["label"], format_value(x, precision), format_value(p, precision),
                            format_value(g["W"][i][j], precision)])
    return buf.getvalue()
