"""Squeezing of an isolated driven two-level emitter.

Run with ``python3 notebooks/01_emitter_without_phonons.py``.
"""
# %% [markdown]
# Without a phonon bath every steady-state quantity depends on the drive
# only through the saturation parameter S = s / (1 + d).  The normally
# ordered quadrature variance is negative (squeezed) below saturation and
# reaches its minimum of -1/8 at S = 1/3.

# %%
import math

import numpy as np

from vibsqueeze import atomic_steady, generic_bloch_minimum, thermal_prediction

for S in (0.01, 0.1, 1 / 3, 1.0, 10.0):
    ap = atomic_steady(S)
    print(f"S = {S:7.4f}   P = {ap.P:.4f}   P_coh = {ap.P_coh:.4f}   variance = {ap.min_variance:+.4f}")

# %% [markdown]
# A pure two-level state can do better.  Minimising over the Bloch sphere
# gives -1/4 on the unit sphere at polar angles pi/3 and 2 pi/3.

# %%
m = generic_bloch_minimum()
print("bound", m.min_variance, "at theta =", [round(t / math.pi, 4) for t in m.thetas], "pi")

# %% [markdown]
# A thermal state of the driven Hamiltonian reaches that bound at low
# temperature when the detuning is |Omega| / sqrt(3), and loses it as the
# temperature rises.

# %%
om = 1.0
for hb in (0.5, 2.0, 10.0, 50.0):
    pred = thermal_prediction(om, om / math.sqrt(3), hb)
    print(f"hbar beta = {hb:5.1f}   variance = {pred.min_variance:+.4f}   length = {pred.bloch.length:.4f}")
print("scan of S:", min(atomic_steady(S).min_variance for S in np.logspace(-3, 2, 2001)))
