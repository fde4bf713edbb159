"""Wigner functions of emitter steady states mapped onto a single field mode.

Run with ``python3 notebooks/04_wigner_functions.py``.
"""
# %% [markdown]
# The two-level density matrix is embedded in the lowest two Fock states.
# Second moments of x and p only see the populations, so the states differ
# through the excited-state weight and through the coherence, which shifts
# and distorts the distribution.  Strong excitation makes W negative near
# the origin; the vacuum is the Gaussian reference.

# %%
import numpy as np

from vibsqueeze.presets import preset_config, wigner_preset_states
from vibsqueeze.sweep import parse_config_dict, wigner_states

doc = wigner_states(parse_config_dict(preset_config("wigner")), wigner_preset_states())
for grid in doc["grids"]:
    W = np.array(grid["W"])
    x, p = np.array(grid["x"]), np.array(grid["p"])
    dx, dp = x[1] - x[0], p[1] - p[0]
    norm = W.sum() * dx * dp
    var_x = (W.sum(axis=1) * x**2).sum() * dx * dp
    var_p = (W.sum(axis=0) * p**2).sum() * dx * dp
    print(f"{grid['label']:16s} norm {norm:.6f}   <x^2> {var_x:.4f}   <p^2> {var_p:.4f}   "
          f"W min {W.min():+.4f}")
