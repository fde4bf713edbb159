"""Mach-Zehnder phase estimation with non-classical inputs.

One input port carries the light under test, the other a coherent state of
mean photon number P_alpha.  The figure of merit is the variance of the
output number difference divided by the total flux,
F = dN_-^2 / <N_+>, which equals 1 for a coherent state alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


VARIANTS = ("coherent", "squeezed_vacuum", "resonance_fluorescence")


@dataclass(frozen=True)
class InterferometerInput:
    """Input to the interferometer.

    Parameters
    ----------
    variant : {"coherent", "squeezed_vacuum", "resonance_fluorescence"}
    p_alpha, phi_alpha : float
        Coherent-arm power |alpha|^2 and phase.
    theta : float
        Path parameter Theta; resonance fluorescence is only defined at pi/2.
    xi, phi_xi : float
        Squeezing magnitude |xi| and phase, xi = |xi| exp(-i phi_xi).
    power, p_coh, B, dipole_phase : float
        Emitter summary: P, the frame coherence |<sigma>_V|^2, the sideband
        factor and the dipole phase phi.
    """

    variant: str
    p_alpha: float
    phi_alpha: float = 0.0
    theta: float = math.pi / 2
    xi: float = 0.0
    phi_xi: float = 0.0
    power: float = 0.0
    p_coh: float = 0.0
    B: float = 1.0
    dipole_phase: float = 0.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.p_alpha < 0 or self.power < 0 or self.p_coh < 0:
            raise ValueError("powers must be non-negative")
        if self.p_coh > 0.25 + 1e-12:
            raise ValueError("p_coh cannot exceed 1/4")

    @classmethod
    def coherent(cls, p_alpha, phi_alpha=0.0, theta=math.pi / 2):
        return cls("coherent", p_alpha, phi_alpha, theta)

    @classmethod
    def squeezed_vacuum(cls, xi, p_alpha, phi_xi=None, phi_alpha=0.0, theta=math.pi / 2):
        """Squeezed vacuum; the default phase gives the optimal Delta phi = pi."""
        if phi_xi is None:
            phi_xi = 2 * phi_alpha - math.pi
        return cls("squeezed_vacuum", p_alpha, phi_alpha, theta, xi=abs(xi), phi_xi=phi_xi)

    @classmethod
    def resonance_fluorescence(cls, power, p_coh, p_alpha, B=1.0, dipole_phase=0.0, phi_alpha=None):
        """Resonance fluorescence input; the coherent arm defaults to phi_alpha = phi."""
        if phi_alpha is None:
            phi_alpha = dipole_phase
        return cls("resonance_fluorescence", p_alpha, phi_alpha, math.pi / 2, power=power, p_coh=p_coh, B=B,
                   dipole_phase=dipole_phase)

    @classmethod
    def from_observables(cls, obs, p_alpha, phi_alpha=None):
        """Build the fluorescence input from an :class:`ObservableSet`."""
        pc = abs(obs.coherence_v) ** 2
        return cls.resonance_fluorescence(obs.P, min(pc, 0.25), p_alpha, obs.B, obs.dipole_phase, phi_alpha)

    @property
    def input_power(self) -> float:
        if self.variant == "squeezed_vacuum":
            return math.sinh(self.xi) ** 2
        if self.variant == "resonance_fluorescence":
            return self.power
        return 0.0


def squeezed_power(xi) -> float:
    return math.sinh(abs(xi)) ** 2


def flux_matched_xi(power: float) -> float:
    """|xi| with sinh^2 |xi| equal to ``power``."""
    return math.asinh(math.sqrt(max(power, 0.0)))


def sv_mean_difference(inp: InterferometerInput) -> float:
    """<N_-> = cos(Theta) (P_xi - P_alpha)."""
    return math.cos(inp.theta) * (squeezed_power(inp.xi) - inp.p_alpha)


def sv_variance(inp: InterferometerInput) -> float:
    """dN_-^2 for squeezed vacuum in one port and a coherent state in the other.

    Depends on Theta and on Delta phi = 2 phi_alpha - phi_xi; at Theta = pi/2,
    Delta phi = pi it reduces to P_xi + P_alpha exp(-2|xi|).
    """
    pxi = squeezed_power(inp.xi)
    pa = inp.p_alpha
    c2 = math.cos(2 * inp.theta)
    dphi = 2 * inp.phi_alpha - inp.phi_xi
    return (pa + pxi * (pxi + 1.5) + c2 * pxi * (pxi + 0.5)
            + (1 - c2) * pa * (pxi + math.sqrt(pxi * (pxi + 1)) * math.cos(dphi)))


def sv_optimal(p_alpha: float):
    """Optimal squeezing |xi|* = ln(1 + 2 sqrt(P_alpha))/2 and F* = 1/(1 + sqrt(P_alpha))."""
    if not p_alpha > 0:
        raise ValueError("p_alpha must be positive")
    r = math.sqrt(p_alpha)
    return 0.5 * math.log1p(2 * r), 1.0 / (1.0 + r)


def rf_variance(inp: InterferometerInput) -> float:
    """dN_-^2 = P + P_alpha (1 - 4 B^2 P_coh cos^2 Delta phi), Delta phi = phi_alpha - phi, at Theta = pi/2."""
    if inp.variant != "resonance_fluorescence":
        raise ValueError("rf_variance needs a resonance_fluorescence input")
    dphi = inp.phi_alpha - inp.dipole_phase
    return inp.power + inp.p_alpha * (1.0 - 4.0 * inp.B**2 * inp.p_coh * math.cos(dphi) ** 2)


def variance(inp: InterferometerInput) -> float:
    if inp.variant == "coherent":
        return inp.p_alpha
    if inp.variant == "squeezed_vacuum":
        return sv_variance(inp)
    return rf_variance(inp)


def figure_of_merit(inp: InterferometerInput) -> float:
    """F = dN_-^2 / <N_+> with <N_+> = input power + P_alpha."""
    flux = inp.input_power + inp.p_alpha
    if not flux > 0:
        raise ValueError("total photon flux must be positive")
    return variance(inp) / flux


def flux_matched_sv_merit(power: float, p_alpha: float) -> float:
    """F of a squeezed vacuum carrying the same photon number as the fluorescence."""
    return figure_of_merit(InterferometerInput.squeezed_vacuum(flux_matched_xi(power), p_alpha))


def rf_merit(obs, p_alpha: float) -> float:
    """Optimal-phase F for a fluorescence steady state."""
    return figure_of_merit(InterferometerInput.from_observables(obs, p_alpha))
