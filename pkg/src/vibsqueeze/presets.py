"""Named configurations that reproduce the standard figures of the model.

Each preset is a configuration dictionary accepted by
:func:`vibsqueeze.sweep.parse_config_dict`; ``columns`` lists the record
fields the figure shows.  The ``wigner`` preset is a list of states for
:func:`vibsqueeze.sweep.wigner_states` instead of a sweep.
"""
from __future__ import annotations

import copy

from .errors import ConfigError

DEFAULT_COUNT = 101

_MEV = "meV"


def _s_axis(lo, hi, count):
    return {"name": "s", "scale": "log10", "min": lo, "max": hi, "count": count}


def _detuning(value):
    return {"value": value, "unit": _MEV}


def _map(count):
    return [_s_axis(1e-1, 1e8, count),
            {"name": "detuning", "scale": "linear", "min": -1.5, "max": 1.5, "count": count, "unit": _MEV}]


RESONANT_RANGE = (1e-2, 1e2)
DETUNED_RANGE = (10**5.5, 10**7.5)
SUPP_RESONANT_RANGE = (1e-2, 1e9)

_SPECS = {
    "fig1a": dict(doc="Excited population with phonons over drive strength and detuning.",
                  model=["full_phonon"], axes=lambda n: _map(n), columns=["P"]),
    "fig1b": dict(doc="Excited population without phonons over drive strength and detuning.",
                  model=["atomic"], axes=lambda n: _map(n), columns=["P"]),
    "fig1c": dict(doc="Coherent power with phonons over drive strength and detuning.",
                  model=["full_phonon"], axes=lambda n: _map(n), columns=["P_coh"]),
    "fig1d": dict(doc="Coherent power without phonons over drive strength and detuning.",
                  model=["atomic"], axes=lambda n: _map(n), columns=["P_coh"]),
    "fig2a": dict(doc="Resonant squeezing below saturation, with and without phonons.",
                  model=["full_phonon", "atomic"], system={"detuning": _detuning(0.0)},
                  axes=lambda n: [_s_axis(*RESONANT_RANGE, n)], columns=["min_variance", "bloch_length"]),
    "fig2b": dict(doc="Phonon-enhanced squeezing at +1 meV detuning with the thermal estimate.",
                  model=["full_phonon", "atomic", "thermal_approx"], system={"detuning": _detuning(1.0)},
                  axes=lambda n: [_s_axis(*DETUNED_RANGE, n)], columns=["min_variance", "bloch_length"]),
    "fig2c": dict(doc="Phonon-enhanced squeezing at -1 meV detuning with the thermal estimate.",
                  model=["full_phonon", "atomic", "thermal_approx"], system={"detuning": _detuning(-1.0)},
                  axes=lambda n: [_s_axis(*DETUNED_RANGE, n)], columns=["min_variance", "bloch_length"]),
    "fig3b": dict(doc="Phase-estimation figure of merit on resonance.",
                  model=["full_phonon", "atomic"], system={"detuning": _detuning(0.0)},
                  axes=lambda n: [_s_axis(*RESONANT_RANGE, n)],
                  columns=["F_rf", "F_sv_matched", "F_sv_optimal", "F_coherent"]),
    "fig3c": dict(doc="Phase-estimation figure of merit at +1 meV detuning.",
                  model=["full_phonon", "atomic"], system={"detuning": _detuning(1.0)},
                  axes=lambda n: [_s_axis(*DETUNED_RANGE, n)],
                  columns=["F_rf", "F_sv_matched", "F_sv_optimal", "F_coherent"]),
    "fig3d": dict(doc="Phase-estimation figure of merit at -1 meV detuning.",
                  model=["full_phonon", "atomic"], system={"detuning": _detuning(-1.0)},
                  axes=lambda n: [_s_axis(*DETUNED_RANGE, n)],
                  columns=["F_rf", "F_sv_matched", "F_sv_optimal", "F_coherent"]),
    "supp1": dict(doc="Resonant drive from far below to far above saturation.",
                  model=["full_phonon", "atomic"], system={"detuning": _detuning(0.0)},
                  axes=lambda n: [_s_axis(*SUPP_RESONANT_RANGE, n)],
                  columns=["P", "P_coh", "min_variance", "bloch_length"]),
    "supp2": dict(doc="Squeezing with pure dephasing equal to the emission rate, resonant and at +1 meV.",
                  model=["full_phonon", "atomic"],
                  system={"pure_dephasing_rate": {"value": 1 / 700, "unit": "ps^-1"}},
                  axes=lambda n: [{"name": "detuning", "values": [0.0, 1.0], "unit": _MEV},
                                  _s_axis(RESONANT_RANGE[0], DETUNED_RANGE[1], n)],
                  columns=["min_variance", "bloch_length"]),
}

#: states of the ``wigner`` preset: vacuum, weak resonant drive and strong detuned drive near the best squeezing
WIGNER_STATES = [
    {"label": "vacuum", "vacuum": True},
    {"label": "resonant_s_1/3", "s": 1 / 3, "detuning": _detuning(0.0)},
    {"label": "detuned_+1meV", "s": 10**6.9, "detuning": _detuning(1.0)},
    {"label": "detuned_-1meV", "s": 10**7.0, "detuning": _detuning(-1.0)},
]

PRESETS = tuple(_SPECS) + ("wigner",)


def preset_names():
    return PRESETS


def preset_description(name: str) -> str:
    if name == "wigner":
        return "Wigner functions of the vacuum and three steady states."
    return _get(name)["doc"]


def preset_columns(name: str):
    if name == "wigner":
        return ["W"]
    return list(_get(name)["columns"])


def _get(name):
    if name not in _SPECS:
        raise ConfigError(f"unknown preset {name!r} (available: {', '.join(PRESETS)})", "preset")
    return _SPECS[name]


def preset_config(name: str, count: int = DEFAULT_COUNT) -> dict:
    """Configuration dictionary for a preset with ``count`` points per continuous axis."""
    if count < 1:
        raise ConfigError("count must be >= 1", "count")
    if name == "wigner":
        return {"schema": "vibsqueeze.config/1", "label": "wigner", "model": ["full_phonon"],
                "system": {"s": 1.0, "detuning": _detuning(0.0)}, "axes": []}
    spec = _get(name)
    doc = {"schema": "vibsqueeze.config/1", "label": name, "model": list(spec["model"]),
           "system": copy.deepcopy(spec.get("system", {})), "axes": spec["axes"](count)}
    return doc


def wigner_preset_states():
    return copy.deepcopy(WIGNER_STATES)

