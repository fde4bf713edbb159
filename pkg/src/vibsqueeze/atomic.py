"""Closed-form results without phonons.

Resonance fluorescence of a bare two-level emitter depends only on the
saturation parameter S = s/(1 + d), with s = 2 (Omega/Gamma)^2 and
d = 4 (delta/Gamma)^2:

    P = S / (2 (S + 1)),  P_coh = P / (S + 1),  ::dX^2:: = S (S - 1) / (S + 1)^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TWO_PI, BlochVector

BRANCHES = ("gibbs", "printed")


@dataclass(frozen=True)
class AtomicPoint:
    s: float
    d: float
    S: float
    P: float
    P_coh: float
    min_variance: float

    @property
    def heisenberg_ratio(self) -> float:
        """Ratio of the two sides of the uncertainty relation, sqrt(S^2 + 1)."""
        return math.sqrt(self.S * self.S + 1.0)


def atomic_steady(s: float, d: float = 0.0) -> AtomicPoint:
    """Steady state of the driven, radiatively damped two-level emitter."""
    if s < 0 or d < 0:
        raise ValueError("s and d must be non-negative")
    S = s / (1.0 + d)
    P = S / (2.0 * (S + 1.0))
    pc = P / (S + 1.0)
    return AtomicPoint(float(s), float(d), S, P, pc, S * (S - 1.0) / (S + 1.0) ** 2)


def atomic_from_rates(rabi: float, detuning: float, emission_rate: float) -> AtomicPoint:
    return atomic_steady(2.0 * (abs(rabi) / emission_rate) ** 2, 4.0 * (detuning / emission_rate) ** 2)


def atomic_coherence(rabi: complex, detuning: float, emission_rate: float) -> complex:
    """Steady-state <sigma> for H = delta n + (Omega sigma + Omega^* sigma^dag)/2."""
    g = emission_rate
    denom = g * g + 4 * detuning**2 + 2 * abs(rabi) ** 2
    return -(np.conj(rabi)) * (2 * detuning + 1j * g) / denom if denom > 0 else 0j


def bloch_variance(length, theta):
    """Normally ordered minimum variance of the Bloch state (l, theta)."""
    c = np.cos(theta)
    s = np.sin(theta)
    return 1.0 - length * np.abs(c) - length**2 * s * s


@dataclass(frozen=True)
class BlochMinimum:
    length: float
    thetas: tuple
    min_variance: float
    states: tuple
    grid_min_variance: float
    grid_length: float
    grid_theta: float


def generic_bloch_minimum(grid: int = 200) -> BlochMinimum:
    """Global minimum of the squeezing over all two-level states.

    The analytic optimum l = 1, cos(theta) = +-1/2 is returned together with
    a brute-force check over a ``grid x grid`` mesh of (l, theta).
    """
    ls = np.linspace(0.0, 1.0, grid)
    ths = np.linspace(0.0, math.pi, grid)
    L, T = np.meshgrid(ls, ths, indexing="ij")
    v = bloch_variance(L, T)
    i, j = np.unravel_index(np.argmin(v), v.shape)
    thetas = (math.pi / 3, 2 * math.pi / 3)
    states = tuple((0.5 * (1 + math.cos(t)), 0.25 * math.sin(t) ** 2) for t in thetas)
    return BlochMinimum(1.0, thetas, -0.25, states, float(v[i, j]), float(ls[i]), float(ths[j]))


def thermal_bloch(rabi, detuning: float, hbar_beta: float, *, branch: str = "gibbs") -> BlochVector:
    """Bloch vector of the thermal state of H = delta n + (Omega sigma + Omega^* sigma^dag)/2.

    Parameters
    ----------
    hbar_beta : float
        Thermal time in ps; ``math.inf`` for the ground state.
    branch : {"gibbs", "printed"}
        ``"gibbs"`` (default) is the thermal state itself: cos(theta) =
        -delta/eta, so positive detuning gives P < 1/2, and the dipole phase
        is arg(Omega) + pi.  ``"printed"`` uses theta = atan2(|Omega|, delta)
        and phi = arg(Omega), the literal reading of theta = arctan(Omega/delta).
    """
    om = abs(rabi)
    eta = math.hypot(om, detuning)
    if eta == 0:
        raise ValueError("eta = sqrt(delta^2 + |Omega|^2) must be positive")
    if branch not in BRANCHES:
        raise ValueError(f"unknown branch {branch!r}")
    x = 0.5 * hbar_beta * eta
    length = 1.0 if math.isinf(x) else math.tanh(x)
    arg = math.atan2(complex(rabi).imag, complex(rabi).real)
    if branch == "gibbs":
        return BlochVector(length, math.atan2(om, -detuning), (arg + math.pi) % TWO_PI)
    return BlochVector(length, math.atan2(om, detuning), arg % TWO_PI)
