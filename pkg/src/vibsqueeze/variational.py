"""Self-consistent variational polaron frame.

The displacement of each phonon mode is a fraction F(w) of the full polaron
displacement.  Minimising the Feynman-Bogoliubov bound gives

    F(w) = N w^2 / (N w^2 + t Omega_r^2 u(w) / 2),
    N = eta_r - delta_r t,  t = tanh(hbar beta eta_r / 2),

with u(w) = w coth(hbar beta w / 2), together with

    B       = exp(-1/2 int J F^2 w^-2 coth dw),   Omega_r = Omega B,
    delta_r = delta_bare + int J F (F - 2) w^-1 dw.

The pair (Omega_r, delta_r) is found by damped fixed-point iteration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import HBAR_MEV_PS, PhononParams, SystemParams
from .errors import ConvergenceError
from .spectral import DEFAULT_SETTINGS, QuadratureSettings, integrate_frequency, thermal_u

FRAMES = ("variational", "polaron", "weak_coupling")
DETUNING_CONVENTIONS = ("shifted", "raw")
DETUNING_SIGNS = ("standard", "reversed")


def polaron_shift(pp: PhononParams, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """int J(w)/w dw in ps^-1 (closed form alpha sqrt(pi) w_c^3 / 4)."""
    return pp.alpha * math.sqrt(math.pi) * pp.cutoff**3 / 4.0


def displacement_fraction(omega, detuning_r, rabi_r, hbar_beta, cutoff=1.0):
    """Variational displacement fraction F(w).

    Parameters
    ----------
    omega : float or array
        Phonon frequency in ps^-1.  F is even in w; F(0) = 0 for Omega_r > 0.
    detuning_r, rabi_r : float
        Renormalised detuning and |drive| in ps^-1.
    hbar_beta : float
        Thermal time in ps.

    Notes
    -----
    When eta_r = 0 the expression is 0/0; its limit as the drive vanishes at
    zero detuning is F = 1, which is returned.
    """
    w = np.asarray(omega, dtype=float)
    eta = math.hypot(detuning_r, rabi_r)
    if eta == 0.0:
        out = np.ones_like(w)
        return float(out) if out.ndim == 0 else out
    t = math.tanh(0.5 * hbar_beta * eta)
    n = eta - detuning_r * t
    c = 0.5 * t * rabi_r * rabi_r
    num = n * w * w
    den = num + c * thermal_u(w, hbar_beta, cutoff)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den > 0, num / den, 0.0)
    # F is 1 exactly when the drive term is absent
    if c == 0.0:
        out = np.ones_like(w)
    out = np.where((out < 0) & (out > -1e-12), 0.0, out)
    out = np.where((out > 1) & (out < 1 + 1e-12), 1.0, out)
    return float(out) if out.ndim == 0 else out


def feature_scale(detuning_r, rabi_r, hbar_beta):
    """Frequency where F crosses 1/2 at small w, or 0 if there is none."""
    eta = math.hypot(detuning_r, rabi_r)
    if eta == 0.0 or rabi_r == 0.0:
        return 0.0
    t = math.tanh(0.5 * hbar_beta * eta)
    n = eta - detuning_r * t
    if n <= 0:
        return 0.0
    # low-frequency estimate with u ~ 2/hb, then one correction step
    w = math.sqrt(t * rabi_r * rabi_r / (hbar_beta * n))
    u = float(thermal_u(w, hbar_beta))
    return math.sqrt(0.5 * t * rabi_r * rabi_r * u / n)


def frequency_breakpoints(scales, cutoff, upper):
    pts = []
    for s in scales:
        if s > 0:
            for f in (0.125, 0.5, 2.0, 8.0):
                if s * f < min(upper, 2.0 * cutoff):
                    pts.append(s * f)
    return tuple(sorted(set(pts)))


@dataclass(frozen=True)
class VariationalSolution:
    """Converged variational-frame parameters.

    Rates in ps^-1; ``free_energy_bound`` in meV.  The displacement fraction
    is available through :meth:`displacement`.
    """

    rabi_r: float
    detuning_r: float
    B: float
    eta_r: float
    free_energy_bound: float
    iterations: int
    converged: bool
    residual: float
    rabi: float
    detuning_bare: float
    phonons: PhononParams = field(repr=False)
    frame: str = "variational"
    detuning_sign: str = "standard"
    start: str = ""

    @property
    def hbar_beta(self) -> float:
        return self.phonons.hbar_beta

    def displacement(self, omega):
        """F(w) for this solution, honouring forced diagnostic frames."""
        w = np.asarray(omega, dtype=float)
        if self.frame == "polaron":
            out = np.ones_like(w)
        elif self.frame == "weak_coupling":
            out = np.zeros_like(w)
        else:
            out = np.asarray(displacement_fraction(w, self.detuning_r, self.rabi_r, self.hbar_beta, self.phonons.cutoff))
        return float(out) if out.ndim == 0 else out

    def breakpoints(self, upper=None):
        pp = self.phonons
        up = upper if upper is not None else 12.0 * pp.cutoff
        scale = feature_scale(self.detuning_r, self.rabi_r, self.hbar_beta) if self.frame == "variational" else 0.0
        return frequency_breakpoints((scale, self.eta_r), pp.cutoff, up)


def _frame_integrals(pp, f_of_w, settings, breakpoints, sign):
    """(int alpha e u F^2, int alpha w^2 e F(F-2)) as one vector integral."""
    hb = pp.hbar_beta

    def integrand(w):
        e = pp.alpha * np.exp(-((w / pp.cutoff) ** 2))
        f = f_of_w(w)
        a = e * thermal_u(w, hb, pp.cutoff) * f * f
        r = e * w * w * f * (f - 2.0) if sign == "standard" else e * w * w * f * (2.0 - f)
        return np.stack([a, r], axis=1)

    val = integrate_frequency(integrand, pp.cutoff, settings, breakpoints=breakpoints)
    return float(val[0]), float(val[1])


def free_energy_bound(candidate: VariationalSolution, sp: SystemParams | None = None, pp: PhononParams | None = None) -> float:
    """Feynman-Bogoliubov bound in meV.

    A_B = R/2 - ln(2 cosh(hbar beta eta_r / 2)) / beta with R = delta_r - delta_bare.
    The constant delta_bare/2 common to every candidate at fixed bare
    parameters is dropped, so at alpha = 0 this is the dressed two-level
    free energy.
    """
    pp = pp or candidate.phonons
    hb = pp.hbar_beta
    x = 0.5 * hb * candidate.eta_r
    # log(2 cosh x) without overflow
    log2cosh = abs(x) + math.log1p(math.exp(-2.0 * abs(x)))
    r = candidate.detuning_r - candidate.detuning_bare
    return HBAR_MEV_PS * (0.5 * r - log2cosh / hb)


def _solution(rabi_r, detuning_r, b, it, converged, residual, rabi, delta_bare, pp, frame, sign, start):
    eta = math.hypot(detuning_r, rabi_r)
    sol = VariationalSolution(rabi_r, detuning_r, b, eta, 0.0, it, converged, residual, rabi, delta_bare,
                              pp, frame, sign, start)
    fe = free_energy_bound(sol)
    return VariationalSolution(rabi_r, detuning_r, b, eta, fe, it, converged, residual, rabi, delta_bare,
                               pp, frame, sign, start)


def bare_detuning(sp: SystemParams, pp: PhononParams, convention: str = "shifted") -> float:
    """Detuning entering the bare Hamiltonian, in ps^-1."""
    if convention not in DETUNING_CONVENTIONS:
        raise ValueError(f"unknown detuning convention {convention!r}")
    return sp.detuning + (polaron_shift(pp) if convention == "shifted" else 0.0)


def solve_variational(sp: SystemParams, pp: PhononParams, settings: QuadratureSettings = DEFAULT_SETTINGS, *,
                      frame: str = "variational", detuning_convention: str = "shifted",
                      detuning_sign: str = "standard", tol: float = 1e-10, max_iter: int = 10000,
                      damping: float = 0.5) -> VariationalSolution:
    """Self-consistent (Omega_r, delta_r, B) for the given parameters.

    Parameters
    ----------
    frame : {"variational", "polaron", "weak_coupling"}
        ``"polaron"`` forces F = 1 and ``"weak_coupling"`` forces F = 0;
        both are diagnostic and need no iteration.
    detuning_convention : {"shifted", "raw"}
        Whether ``sp.detuning`` is measured from the polaron-shifted line
        (default) or is the bare detuning.
    detuning_sign : {"standard", "reversed"}
        Sign of the detuning renormalisation integral: F(F-2) (default) or
        F(2-F).

    Raises
    ------
    ConvergenceError
        When neither starting point converges within ``max_iter``.
    """
    if frame not in FRAMES:
        raise ValueError(f"unknown frame {frame!r}")
    if detuning_sign not in DETUNING_SIGNS:
        raise ValueError(f"unknown detuning sign {detuning_sign!r}")
    rabi = sp.rabi_magnitude
    delta_bare = bare_detuning(sp, pp, detuning_convention)
    hb = pp.hbar_beta
    up = settings.upper(pp.cutoff)

    if pp.alpha == 0.0:
        return _solution(rabi, delta_bare, 1.0, 1, True, 0.0, rabi, delta_bare, pp, frame, detuning_sign, "exact")

    def const(v):
        return lambda w: np.full_like(w, v)

    if frame != "variational":
        fval = 1.0 if frame == "polaron" else 0.0
        a, r = _frame_integrals(pp, const(fval), settings, (), detuning_sign)
        b = math.exp(-0.5 * a)
        return _solution(rabi * b, delta_bare + r, b, 0, True, 0.0, rabi, delta_bare, pp, frame, detuning_sign, frame)

    def update(x):
        rr, dr = x
        bp = frequency_breakpoints((feature_scale(dr, rr, hb), math.hypot(rr, dr)), pp.cutoff, up)
        a, r = _frame_integrals(pp, lambda w: displacement_fraction(w, dr, rr, hb, pp.cutoff), settings, bp,
                                detuning_sign)
        b = math.exp(-0.5 * a)
        return np.array([rabi * b, delta_bare + r]), b

    a1, r1 = _frame_integrals(pp, const(1.0), settings, (), detuning_sign)
    starts = {
        "polaron": np.array([rabi * math.exp(-0.5 * a1), delta_bare + r1]),
        "weak_coupling": np.array([rabi, delta_bare]),
    }
    floor = 1e-13 * pp.cutoff
    results = []
    failures = []
    for name, x in starts.items():
        d = damping
        prev_step = None
        flips = 0
        b = 1.0
        residual = math.inf
        it = 0
        ok = False
        for it in range(1, max_iter + 1):
            gx, b = update(x)
            step = gx - x
            scale = max(abs(x[0]), abs(x[1]), abs(gx[0]), abs(gx[1]), floor)
            residual = float(np.max(np.abs(step)) / scale)
            if residual < tol:
                x = gx
                ok = True
                break
            if prev_step is not None and np.any(np.sign(step) * np.sign(prev_step) < 0):
                flips += 1
                if flips >= 3 and d > 0.1:
                    d = 0.1
            else:
                flips = 0
            prev_step = step
            x = x + d * step
        if ok:
            results.append(_solution(float(x[0]), float(x[1]), b, it, True, residual, rabi, delta_bare, pp,
                                     frame, detuning_sign, name))
        else:
            failures.append((name, x.copy(), residual))
    if not results:
        name, x, res = failures[0]
        raise ConvergenceError(f"variational iteration did not converge in {max_iter} steps",
                               last={"rabi_r": float(x[0]), "detuning_r": float(x[1])}, residual=res)
    return min(results, key=lambda s: s.free_energy_bound)


def update_residual(sol: VariationalSolution, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Relative change of (Omega_r, delta_r) under one more application of the update map."""
    pp = sol.phonons
    if pp.alpha == 0.0:
        return 0.0
    hb = pp.hbar_beta
    a, r = _frame_integrals(pp, sol.displacement, settings, sol.breakpoints(settings.upper(pp.cutoff)),
                            sol.detuning_sign)
    b = math.exp(-0.5 * a)
    new = np.array([sol.rabi * b, sol.detuning_bare + r])
    old = np.array([sol.rabi_r, sol.detuning_r])
    scale = max(np.max(np.abs(old)), np.max(np.abs(new)), 1e-13 * pp.cutoff)
    return float(np.max(np.abs(new - old)) / scale)
