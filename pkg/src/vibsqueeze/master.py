"""Variational-frame master equation and its steady state.

Superoperator convention: density matrices are column-stacked,
``vec(rho) = rho.flatten(order="F")``, so that ``vec(A rho B) = (B^T kron A) vec(rho)``.
Superoperators are built by applying the 2x2 map to the four matrix units,
which makes the convention bit-exact by construction.

Phonon dissipator
-----------------
In the variational frame the interaction is

    H_I = (Omega/2) sigma_x B_x + (Omega/2) sigma_y B_y' + sigma^dag sigma B_z

with B_y' = -(B_+ - B_-)/(2i).  Its bath correlations are
<B_x(tau) B_x> = Lambda_xx, <B_y'(tau) B_y'> = Lambda_yy,
<B_z(tau) B_z> = Lambda_zz and <B_y'(tau) B_z> = -<B_z(tau) B_y'> = Lambda_yz/2.
The second-order Born-Markov generator is

    K[rho] = -sum_ab [A_a, Xi_ab rho] + h.c.,
    Xi_ab  = sum_jk A_b^{jk} Gamma_ab(psi_k - psi_j) |psi_j><psi_k|,

where Gamma_ab(lam) = int_0^inf exp(i lam tau) <B_a(tau) B_b> dtau and the
matrix elements are taken in the eigenbasis of H_r.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import IDENTITY2, NUMBER, SIGMA, SIGMA_DAG, SIGMA_X, SIGMA_Y, DensityOperator2, SystemParams
from .correlations import CorrelationContext
from .errors import DegenerateLiouvillianError, InvalidStateError, PositivityError, StepBudgetError
from .spectral import DEFAULT_SETTINGS, QuadratureSettings
from .variational import VariationalSolution

COMPONENTS = ("hamiltonian", "phonon", "emission", "dephasing")
POSITIVITY_FLOOR = -1e-8


def vec(rho):
    return np.asarray(rho, dtype=complex).flatten(order="F")


def unvec(v):
    return np.asarray(v, dtype=complex).reshape(2, 2, order="F")


def superoperator(fn):
    """4x4 matrix of a linear map on 2x2 matrices."""
    out = np.zeros((4, 4), dtype=complex)
    for k in range(4):
        e = np.zeros(4, dtype=complex)
        e[k] = 1.0
        out[:, k] = vec(fn(unvec(e)))
    return out


def lindblad(op, rate=1.0):
    """rate * (op rho op^dag - {op^dag op, rho}/2) as a superoperator."""
    od = op.conj().T
    n = od @ op
    return superoperator(lambda r: rate * (op @ r @ od - 0.5 * (n @ r + r @ n)))


def commutator_super(h):
    """-i[h, .] as a superoperator."""
    return superoperator(lambda r: -1j * (h @ r - r @ h))


@dataclass(frozen=True)
class DressedBasis:
    """Eigenbasis of H_r = delta_r sigma^dag sigma + (Omega_r/2) sigma_x.

    ``energies`` ascend; ``vectors[:, j]`` is |psi_j> in the (g, e) basis;
    ``gaps[j, k] = psi_j - psi_k``.  ``elements`` maps "x", "y", "z", "sigma"
    to matrix elements <psi_j| O |psi_k>, with sigma_z = 2 sigma^dag sigma - 1.
    """

    energies: np.ndarray
    vectors: np.ndarray
    gaps: np.ndarray
    elements: dict
    hamiltonian: np.ndarray

    def to_dressed(self, op):
        return self.vectors.conj().T @ op @ self.vectors

    def to_bare(self, op):
        return self.vectors @ op @ self.vectors.conj().T


def dressed_basis(vs: VariationalSolution, sp: SystemParams | None = None) -> DressedBasis:
    """Closed-form eigendecomposition of the renormalised Hamiltonian.

    The drive phase is rotated out, so H_r is real symmetric; observables are
    rotated back by :func:`steady_state`.
    """
    d, o = vs.detuning_r, vs.rabi_r
    eta = math.hypot(d, o)
    ang = math.atan2(o, d)
    c, s = math.cos(0.5 * ang), math.sin(0.5 * ang)
    vectors = np.array([[c, s], [-s, c]], dtype=complex)
    energies = np.array([0.5 * (d - eta), 0.5 * (d + eta)])
    gaps = energies[:, None] - energies[None, :]
    h = d * NUMBER + 0.5 * o * SIGMA_X
    el = {}
    for name, op in (("x", SIGMA_X), ("y", SIGMA_Y), ("z", 2 * NUMBER - IDENTITY2), ("sigma", SIGMA)):
        el[name] = vectors.conj().T @ op @ vectors
    return DressedBasis(energies, vectors, gaps, el, h)


@dataclass(frozen=True)
class Liouvillian:
    """Generator acting on column-stacked 2x2 density matrices.

    ``components`` holds the separate 4x4 parts keyed by ``COMPONENTS``.
    ``frame_phase`` is the drive phase that was rotated out; states from
    this generator live in the rotated frame until :func:`steady_state`
    rotates them back.
    """

    components: dict
    frame_phase: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def matrix(self) -> np.ndarray:
        return sum(self.components[k] for k in COMPONENTS)

    def apply(self, rho):
        return unvec(self.matrix @ vec(rho))

    def to_json(self) -> str:
        def enc(m):
            return {"real": np.real(m).tolist(), "imag": np.imag(m).tolist()}

        doc = {
            "schema": "vibsqueeze.liouvillian/1",
            "vectorization": "column-stacked, vec(A rho B) = (B^T kron A) vec(rho), basis (g, e)",
            "frame_phase": self.frame_phase,
            "components": {k: enc(self.components[k]) for k in COMPONENTS},
            "meta": self.meta,
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def dissipator_prefactors(sp: SystemParams) -> dict:
    om = sp.rabi_magnitude
    return {"xx": 0.25 * om * om, "yy": 0.25 * om * om, "yz": 0.5 * om, "zz": 1.0}


def phonon_dissipator(db: DressedBasis, ctx: CorrelationContext, sp: SystemParams) -> np.ndarray:
    """Phonon part K_ph of the generator as a 4x4 superoperator (bare basis).

    Coefficients enter at the dressed-state gaps psi_k - psi_j, so the
    dissipator relaxes the emitter towards the thermal state of H_r.  The
    drive prefactors use the bare |Omega|.
    """
    om = sp.rabi_magnitude
    eta = db.energies[1] - db.energies[0]
    lams = sorted({0.0, float(eta), float(-eta)})
    coeffs = ctx.response_coefficients(("xx", "yy", "zz", "yz"), lams)

    def gamma(kind, lam):
        return coeffs[(kind, min(lams, key=lambda x: abs(x - lam)))]

    a_x = 0.5 * om * SIGMA_X
    a_y = 0.5 * om * SIGMA_Y
    a_z = NUMBER
    # (A_a, A_b, correlation kind, multiplier of its transform)
    pairs = [
        (a_x, a_x, "xx", 1.0),
        (a_y, a_y, "yy", 1.0),
        (a_z, a_z, "zz", 1.0),
        (a_y, a_z, "yz", 0.5),
        (a_z, a_y, "yz", -0.5),
    ]
    xis = []
    for a, b, kind, mult in pairs:
        b_d = db.to_dressed(b)
        xi_d = np.zeros((2, 2), dtype=complex)
        for j in range(2):
            for k in range(2):
                if b_d[j, k] != 0:
                    xi_d[j, k] = b_d[j, k] * mult * gamma(kind, db.energies[k] - db.energies[j])
        xis.append((a, db.to_bare(xi_d)))

    def k_ph(r):
        out = np.zeros((2, 2), dtype=complex)
        for a, xi in xis:
            # [A, Xi rho] plus its conjugate, written linearly in rho for Hermitian A
            xi_h = xi.conj().T
            out -= a @ xi @ r - xi @ r @ a + r @ xi_h @ a - a @ r @ xi_h
        return out

    return superoperator(k_ph)


def assemble_liouvillian(vs: VariationalSolution, sp: SystemParams, pp=None,
                         settings: QuadratureSettings = DEFAULT_SETTINGS, *, ctx: CorrelationContext | None = None,
                         include_emission: bool = True) -> Liouvillian:
    """Full generator -i[H_r, .] + K_ph + Gamma D[sigma] + gamma D[sigma^dag sigma].

    ``include_emission=False`` drops the radiative term, leaving the
    emitter coupled to phonons only (used for thermalisation checks).
    """
    db = dressed_basis(vs, sp)
    if ctx is None:
        ctx = CorrelationContext(vs, settings, prefactors=dissipator_prefactors(sp))
    comps = {
        "hamiltonian": commutator_super(db.hamiltonian),
        "phonon": phonon_dissipator(db, ctx, sp) if vs.phonons.alpha > 0 else np.zeros((4, 4), dtype=complex),
        "emission": lindblad(SIGMA, sp.emission_rate) if include_emission else np.zeros((4, 4), dtype=complex),
        "dephasing": lindblad(NUMBER, sp.pure_dephasing_rate),
    }
    meta = {"rabi_r": vs.rabi_r, "detuning_r": vs.detuning_r, "B": vs.B,
            "emission_rate": sp.emission_rate, "pure_dephasing_rate": sp.pure_dephasing_rate}
    return Liouvillian(comps, sp.rabi_phase, meta)


def _rotate_back(m, phase):
    if phase == 0.0:
        return m
    v = np.diag([1.0, complex(math.cos(phase), -math.sin(phase))])
    return v @ m @ v.conj().T


def _finish(m, phase):
    m = 0.5 * (m + m.conj().T)
    m = m / np.trace(m).real
    m = _rotate_back(m, phase)
    try:
        return DensityOperator2.from_matrix(m, positivity_floor=POSITIVITY_FLOOR)
    except InvalidStateError as exc:
        raise PositivityError(str(exc)) from exc


@dataclass(frozen=True)
class SteadyState:
    state: DensityOperator2
    residual: float


def steady_state(L: Liouvillian, *, kernel_tol: float = 1e-10, return_residual: bool = False):
    """Null vector of the generator via the SVD.

    Raises
    ------
    DegenerateLiouvillianError
        If the second-smallest singular value is below ``kernel_tol`` times
        the largest one.
    """
    m = L.matrix
    _, s, vh = np.linalg.svd(m)
    scale = max(s[0], 1e-300)
    if s[-2] <= kernel_tol * scale:
        raise DegenerateLiouvillianError(f"kernel dimension > 1 (singular values {s[-2]:.3e}, {s[-1]:.3e})")
    v = vh[-1].conj()
    rho = unvec(v)
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        raise DegenerateLiouvillianError("null vector is traceless")
    rho = rho / tr
    state = _finish(rho, L.frame_phase)
    rho_f = _rotate_back(state.matrix(), -L.frame_phase)
    residual = float(np.linalg.norm(m @ vec(rho_f)))
    return SteadyState(state, residual) if return_residual else state


def propagate_to_steady_state(L: Liouvillian, rho0=None, dt: float | None = None, tol: float = 1e-10,
                              max_steps: float = 1e8, return_residual: bool = False):
    """Fixed-step classical RK4 integration of d rho/dt = L rho until ``||L rho|| < tol``.

    One RK4 step is the matrix polynomial ``M = 1 + hL + (hL)^2/2 + (hL)^3/6
    + (hL)^4/24``; runs of steps are applied as powers of M whose stride
    doubles while the residual is above ``tol``.  ``rho0`` defaults to the
    ground state and is interpreted in the lab frame.
    """
    m = L.matrix
    norm = np.linalg.norm(m, 2)
    if rho0 is None:
        rho0 = np.array([[1, 0], [0, 0]], dtype=complex)
    r0 = rho0.matrix() if isinstance(rho0, DensityOperator2) else np.asarray(rho0, dtype=complex)
    v = vec(_rotate_back(r0, -L.frame_phase))
    if norm == 0:
        state = _finish(unvec(v), L.frame_phase)
        return SteadyState(state, 0.0) if return_residual else state
    h = 0.1 / norm if dt is None else float(dt)
    if h * norm > 0.1 * (1 + 1e-12):
        raise ValueError("dt must satisfy dt <= 0.1/||L||")
    hl = h * m
    eye = np.eye(4, dtype=complex)
    step = eye + hl @ (eye + hl @ (eye / 2 + hl @ (eye / 6 + hl / 24)))
    power = step
    stride = 1
    steps = 0
    res = float(np.linalg.norm(m @ v))
    while res >= tol:
        if steps + stride > max_steps:
            raise StepBudgetError(f"no steady state within {max_steps:.0e} steps (residual {res:.2e})")
        v = power @ v
        steps += stride
        res = float(np.linalg.norm(m @ v))
        if res >= tol and stride < 2**40:
            power = power @ power
            stride *= 2
    state = _finish(unvec(v), L.frame_phase)
    return SteadyState(state, res) if return_residual else state
