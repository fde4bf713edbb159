"""Phase estimation with resonance fluorescence in a Mach-Zehnder interferometer.

Run with ``python3 notebooks/03_interferometry.py``.
"""
# %% [markdown]
# The figure of merit F is the output number-difference variance per
# photon.  A coherent state gives 1, the optimal squeezed vacuum with one
# coherent photon gives 1/2, and squeezed fluorescence can do better still
# because its photons are delivered more efficiently.

# %%
import numpy as np

from vibsqueeze import InterferometerInput, atomic_steady, figure_of_merit, sv_optimal
from vibsqueeze.presets import preset_config
from vibsqueeze.sweep import parse_config_dict, run_sweep

print("coherent:", figure_of_merit(InterferometerInput.coherent(1.0)))
print("optimal squeezed vacuum (xi, F):", sv_optimal(1.0))
ap = atomic_steady(1 / 3)
print("fluorescence at S = 1/3:",
      figure_of_merit(InterferometerInput.resonance_fluorescence(ap.P, ap.P_coh, 1.0)))

# %%
table = run_sweep(parse_config_dict(preset_config("fig3c", count=21)))
for model in table.config.models:
    recs = [r for r in table.records() if r["model"] == model]
    print(f"{model:12s} min F_rf {min(r['F_rf'] for r in recs):.4f}"
          f"   min F_sv (same flux) {min(r['F_sv_matched'] for r in recs):.4f}")
