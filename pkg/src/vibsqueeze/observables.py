"""Optical observables of a steady state.

The quadrature X(phi) = exp(i phi) sigma + exp(-i phi) sigma^dag has its
smallest normally ordered variance along the dipole phase, where

    ::dX^2:: = 1 - |2P - 1| - 4 P_coh.

With phonons the coherent power picks up the sideband factor,
P_coh = B^2 |<sigma>_V|^2, while P = <sigma^dag sigma> is unchanged.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import TWO_PI, BlochVector, DensityOperator2, bloch_from_density
from .errors import InvalidStateError

#: sigma^2 = 0 for a two-level emitter, so two photons are never emitted together
G2_ZERO = 0.0


@dataclass(frozen=True)
class ObservableSet:
    """Steady-state powers, squeezing and uncertainty-relation sides.

    ``P_inc = P - P_coh`` so that the sideband weight removed from the
    coherent part is counted as incoherent emission.
    """

    P: float
    P_coh: float
    P_inc: float
    min_variance: float
    dipole_phase: float
    bloch_length: float
    theta: float
    heisenberg_lhs: float
    heisenberg_rhs: float
    coherence_v: complex
    B: float = 1.0
    g2_zero: float = G2_ZERO

    def as_dict(self):
        d = asdict(self)
        c = d.pop("coherence_v")
        d["coherence_v_re"] = c.real
        d["coherence_v_im"] = c.imag
        return d


def dipole_phase(coherence: complex) -> float:
    """phi with <sigma> = |<sigma>| exp(-i phi), in [0, 2 pi); 0 when <sigma> = 0."""
    if coherence == 0:
        return 0.0
    return (-cmath.phase(coherence)) % TWO_PI


def observables(rho, B: float = 1.0) -> ObservableSet:
    """Observables of a steady state in the variational frame.

    Parameters
    ----------
    rho : DensityOperator2 or 2x2 array
    B : float
        Phonon coherence factor in (0, 1]; 1 without phonons.
    """
    if not 0 < B <= 1 + 1e-15:
        raise ValueError("B must lie in (0, 1]")
    if not isinstance(rho, DensityOperator2):
        rho = DensityOperator2.from_matrix(rho)
    p = float(rho.ee.real)
    c = complex(rho.eg)
    pcoh = B * B * abs(c) ** 2
    rhs = abs(2 * p - 1)
    var = 1.0 - rhs - 4.0 * pcoh
    lhs = math.sqrt(max(1.0 - 4.0 * pcoh, 0.0))
    try:
        b = bloch_from_density(rho)
        length, theta = b.length, b.theta
    except InvalidStateError:
        # slightly non-positive Born-Markov states can exceed unit length
        length = math.hypot(2 * p - 1, 2 * abs(c))
        theta = math.atan2(2 * abs(c), 2 * p - 1)
    return ObservableSet(p, pcoh, p - pcoh, var, dipole_phase(c), length, theta, lhs, rhs, c, B)


@dataclass(frozen=True)
class ThermalPrediction:
    bloch: BlochVector
    P: float
    P_coh: float
    min_variance: float
    dipole_phase: float


def thermal_prediction(rabi, detuning: float, hbar_beta: float, B: float = 1.0, *,
                       sideband: bool = False, branch: str = "gibbs") -> ThermalPrediction:
    """Thermal-state estimate of the squeezing in the dressed basis.

    Parameters
    ----------
    rabi : complex or float
        Drive Omega in ps^-1.
    detuning : float
        delta in ps^-1.
    hbar_beta : float
        Thermal time in ps; ``math.inf`` for zero temperature and 0 for
        infinite temperature.
    sideband : bool
        Multiply the coherence term by B^2.

    Returns
    -------
    ThermalPrediction
        ``min_variance = 1 - (|delta|/eta) l - (|Omega|/eta)^2 l^2 [B^2]``
        with l = tanh(hbar beta eta / 2).
    """
    from .atomic import thermal_bloch

    om = abs(rabi)
    eta = math.hypot(om, detuning)
    if eta == 0:
        raise ValueError("eta = sqrt(delta^2 + |Omega|^2) must be positive")
    b = thermal_bloch(rabi, detuning, hbar_beta, branch=branch)
    l = b.length
    fac = B * B if sideband else 1.0
    var = 1.0 - abs(detuning) / eta * l - (om / eta) ** 2 * l * l * fac
    p = 0.5 * (1 + l * math.cos(b.theta))
    pcoh = fac * 0.25 * (l * math.sin(b.theta)) ** 2
    return ThermalPrediction(b, p, pcoh, var, b.phi)


def _as_matrix(rho):
    if isinstance(rho, DensityOperator2):
        return rho.matrix()
    return np.asarray(rho, dtype=complex)


def wigner(rho, x=(-4.0, 4.0), p=(-4.0, 4.0), resolution=(201, 201)):
    """Wigner function of the emitted field in the {|0>, |1>} Fock subspace.

    The emitter state maps onto photon numbers as g -> |0>, e -> |1>; with
    r^2 = x^2 + p^2

        W = exp(-r^2)/pi [rho_gg + rho_ee (2 r^2 - 1) + 2 sqrt(2) Re(rho_ge (x + i p))].

    Returns
    -------
    dict
        ``x``, ``p`` (1-D grids) and ``W`` with ``W[i, j] = W(x[i], p[j])``.
    """
    m = _as_matrix(rho)
    nx, np_ = (resolution, resolution) if np.ndim(resolution) == 0 else resolution
    xs = np.linspace(x[0], x[1], int(nx))
    ps = np.linspace(p[0], p[1], int(np_))
    X, Pm = np.meshgrid(xs, ps, indexing="ij")
    return {"x": xs, "p": ps, "W": wigner_at(m, X, Pm)}


def wigner_at(rho, x, p):
    """Closed-form Wigner function evaluated pointwise."""
    m = _as_matrix(rho)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    r2 = x * x + p * p
    coh = 2.0 * math.sqrt(2.0) * np.real(m[0, 1] * (x + 1j * p))
    return np.exp(-r2) / math.pi * (m[0, 0].real + m[1, 1].real * (2 * r2 - 1) + coh)


def position_density(rho, x):
    """<x| rho_em |x> for the same Fock mapping."""
    m = _as_matrix(rho)
    x = np.asarray(x, dtype=float)
    psi0 = math.pi**-0.25 * np.exp(-0.5 * x * x)
    psi1 = math.sqrt(2.0) * x * psi0
    return np.real(m[0, 0] * psi0 * psi0 + m[1, 1] * psi1 * psi1 + 2 * np.real(m[0, 1]) * psi0 * psi1)
