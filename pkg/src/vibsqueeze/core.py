"""Shared value types, unit conventions and Bloch-vector conversions.

Internally every frequency and rate is an angular frequency in ps^-1 with
hbar = 1, so energies are measured in ps^-1 as well.  Millielectronvolts and
kelvin only appear at the I/O boundary through the helpers below.

Basis ordering for every 2x2 matrix in the package is ``(|g>, |e>)``, i.e.
index 0 is the ground state.  The lowering operator is ``sigma = |g><e|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidStateError

#: reduced Planck constant in meV ps
HBAR_MEV_PS = 0.6582119569
#: Boltzmann constant in meV / K
KB_MEV_PER_K = 0.08617333262

TWO_PI = 2.0 * math.pi

SIGMA = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|
SIGMA_DAG = SIGMA.conj().T
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)  # i(sigma - sigma^dag)
NUMBER = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)  # sigma^dag sigma
IDENTITY2 = np.eye(2, dtype=complex)


def energy_to_angular_frequency(energy_mev):
    """Convert an energy in meV to an angular frequency in ps^-1."""
    out = np.asarray(energy_mev, dtype=float) / HBAR_MEV_PS
    return float(out) if out.ndim == 0 else out


def angular_frequency_to_energy(omega):
    """Convert an angular frequency in ps^-1 to an energy in meV."""
    out = np.asarray(omega, dtype=float) * HBAR_MEV_PS
    return float(out) if out.ndim == 0 else out


def rate_from_lifetime(lifetime_ps: float) -> float:
    """Rate in ps^-1 for a lifetime in ps."""
    if not lifetime_ps > 0:
        raise ValueError("lifetime must be positive")
    return 1.0 / lifetime_ps


def hbar_beta(temperature_k: float) -> float:
    """Thermal time hbar/(k_B T) in ps."""
    if not temperature_k > 0:
        raise ValueError("temperature must be positive")
    return HBAR_MEV_PS / (KB_MEV_PER_K * temperature_k)


def rabi_from_s(s, emission_rate):
    """Rabi frequency for the scaled drive s = 2 (Omega/Gamma)^2."""
    return emission_rate * np.sqrt(np.asarray(s, dtype=float) / 2.0)


def s_from_rabi(rabi, emission_rate):
    """Scaled drive s = 2 (Omega/Gamma)^2."""
    return 2.0 * (np.asarray(rabi, dtype=float) / emission_rate) ** 2


@dataclass(frozen=True)
class SystemParams:
    """Emitter and drive parameters, all in ps^-1.

    Parameters
    ----------
    rabi_magnitude : float
        |Omega|, non-negative.
    rabi_phase : float
        arg(Omega), stored reduced to [0, 2 pi).
    detuning : float
        Laser-emitter detuning delta, measured from the polaron-shifted line
        unless the caller asks for the raw convention downstream.
    emission_rate : float
        Radiative rate Gamma, strictly positive.
    pure_dephasing_rate : float
        Markovian dephasing rate gamma, default 0.
    """

    rabi_magnitude: float
    detuning: float
    emission_rate: float
    rabi_phase: float = 0.0
    pure_dephasing_rate: float = 0.0

    def __post_init__(self):
        for name in ("rabi_magnitude", "detuning", "emission_rate", "rabi_phase", "pure_dephasing_rate"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.rabi_magnitude < 0:
            raise ValueError("rabi_magnitude must be >= 0")
        if not self.emission_rate > 0:
            raise ValueError("emission_rate must be > 0")
        if self.pure_dephasing_rate < 0:
            raise ValueError("pure_dephasing_rate must be >= 0")
        object.__setattr__(self, "rabi_phase", self.rabi_phase % TWO_PI)

    @property
    def rabi(self) -> complex:
        """Complex Rabi frequency |Omega| exp(i phase)."""
        return self.rabi_magnitude * complex(math.cos(self.rabi_phase), math.sin(self.rabi_phase))

    @property
    def s(self) -> float:
        return float(s_from_rabi(self.rabi_magnitude, self.emission_rate))

    @property
    def d(self) -> float:
        return 4.0 * (self.detuning / self.emission_rate) ** 2

    def replace(self, **changes) -> "SystemParams":
        data = {k: getattr(self, k) for k in self.__dataclass_fields__}
        data.update(changes)
        return SystemParams(**data)


@dataclass(frozen=True)
class PhononParams:
    """Bath parameters for J(w) = alpha w^3 exp(-w^2/w_c^2).

    Parameters
    ----------
    alpha : float
        Coupling strength in ps^2.
    cutoff : float
        Cut-off frequency w_c in ps^-1.
    temperature : float
        Temperature in kelvin, strictly positive.
    """

    alpha: float
    cutoff: float
    temperature: float

    def __post_init__(self):
        for name in ("alpha", "cutoff", "temperature"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if not self.cutoff > 0:
            raise ValueError("cutoff must be > 0")
        if not self.temperature > 0:
            raise ValueError("temperature must be > 0")

    @property
    def hbar_beta(self) -> float:
        """Thermal time hbar beta in ps."""
        return hbar_beta(self.temperature)

    def replace(self, **changes) -> "PhononParams":
        data = {k: getattr(self, k) for k in self.__dataclass_fields__}
        data.update(changes)
        return PhononParams(**data)


#: Parameter set used throughout the figures.
REFERENCE_PHONONS = PhononParams(alpha=0.027, cutoff=2.2, temperature=4.0)
REFERENCE_EMISSION_RATE = 1.0 / 700.0


@dataclass(frozen=True)
class DensityOperator2:
    """Immutable 2x2 density matrix in the (|g>, |e>) basis.

    Construct with :meth:`from_matrix`, which checks the invariants.
    """

    gg: complex
    ge: complex
    eg: complex
    ee: complex
    min_eigenvalue: float = field(default=0.0, compare=False)

    @classmethod
    def from_matrix(cls, m, *, hermitian_tol=1e-12, trace_tol=1e-12, positivity_floor=-1e-10):
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidStateError(f"expected a 2x2 matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidStateError("matrix has non-finite entries")
        if np.max(np.abs(m - m.conj().T)) > hermitian_tol:
            raise InvalidStateError("matrix is not Hermitian")
        tr = m[0, 0] + m[1, 1]
        if abs(tr - 1.0) > trace_tol:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        h = 0.5 * (m + m.conj().T)
        ev = np.linalg.eigvalsh(h)
        if ev[0] < positivity_floor:
            raise InvalidStateError(f"eigenvalue {ev[0]:.3e} below floor {positivity_floor:.1e}")
        return cls(complex(h[0, 0].real), complex(h[0, 1]), complex(h[1, 0]), complex(h[1, 1].real), float(ev[0]))

    def matrix(self) -> np.ndarray:
        return np.array([[self.gg, self.ge], [self.eg, self.ee]], dtype=complex)

    @property
    def excited_population(self) -> float:
        return float(self.ee.real)

    @property
    def coherence(self) -> complex:
        """<sigma> = Tr(rho |g><e|) = rho_eg."""
        return complex(self.eg)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix())


@dataclass(frozen=True)
class BlochVector:
    """Bloch parameterisation (l, theta, phi).

    rho = (1 + l [cos(theta) (2 sigma^dag sigma - 1) + sin(theta) X(phi)]) / 2
    with X(phi) = exp(i phi) sigma + exp(-i phi) sigma^dag, so that
    <sigma> = (l sin(theta) / 2) exp(-i phi).
    """

    length: float
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        l, th, ph = float(self.length), float(self.theta), float(self.phi)
        if not (math.isfinite(l) and math.isfinite(th) and math.isfinite(ph)):
            raise InvalidStateError("Bloch vector entries must be finite")
        if l < 0 or l > 1 + 1e-12:
            raise InvalidStateError(f"Bloch length {l} outside [0, 1]")
        if th < -1e-12 or th > math.pi + 1e-12:
            raise InvalidStateError(f"polar angle {th} outside [0, pi]")
        object.__setattr__(self, "length", min(l, 1.0))
        object.__setattr__(self, "theta", min(max(th, 0.0), math.pi))
        object.__setattr__(self, "phi", ph % TWO_PI)


def bloch_from_density(rho: DensityOperator2) -> BlochVector:
    """Bloch vector of a valid two-level density operator.

    The dipole phase is returned as 0 whenever the transverse component
    l sin(theta) vanishes exactly.
    """
    if not isinstance(rho, DensityOperator2):
        rho = DensityOperator2.from_matrix(rho)
    z = 2.0 * rho.ee.real - 1.0
    c = 2.0 * rho.eg  # l sin(theta) exp(-i phi)
    r = abs(c)
    length = math.hypot(z, r)
    theta = math.atan2(r, z) if length > 0 else 0.0
    phi = (-math.atan2(c.imag, c.real)) % TWO_PI if r > 0 else 0.0
    return BlochVector(min(length, 1.0) if length <= 1 + 1e-12 else length, theta, phi)


def density_from_bloch(b: BlochVector) -> DensityOperator2:
    """Density operator for a Bloch vector; inverse of :func:`bloch_from_density`."""
    if not isinstance(b, BlochVector):
        b = BlochVector(*b)
    l, th, ph = b.length, b.theta, b.phi
    ee = 0.5 * (1.0 + l * math.cos(th))
    eg = 0.5 * l * math.sin(th) * complex(math.cos(ph), -math.sin(ph))
    return DensityOperator2.from_matrix(
        np.array([[1.0 - ee, eg.conjugate()], [eg, ee]], dtype=complex),
        positivity_floor=-1e-12,
    )
