"""Variational-frame phonon correlation functions and their rates.

All correlations share the spectral form ``C(tau) = int S(w) exp(i w tau) dw``
over the whole real line, with u(w) = w coth(hbar beta w / 2) and
e(w) = exp(-w^2/w_c^2):

    kappa      S = (alpha/2) F^2 e (u - w)
    Lambda_zz  S = (alpha/2) (1-F)^2 e w^2 (u - w)
    Lambda_yz  = -2B int S_perp exp(i w tau) dw,
               S_perp = -(i/2) alpha w F (1-F) e (u - w)

The linear ones (zz, yz and the part of Lambda_yy linear in kappa) are
transformed exactly via ``pi S(-lam) + i PV int S/(w + lam)``.  The
non-linear remainders

    Lambda_xx          = B^2 (cosh kappa - 1)
    Lambda_yy - B^2 kappa = B^2 (sinh kappa - kappa)

are transformed in the time domain, with kappa(tau) evaluated by a fixed
composite Gauss rule in w whose panels are sized for the largest tau in
the request.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .core import PhononParams
from .spectral import (DEFAULT_SETTINGS, QuadratureSettings, _legendre, adaptive_gauss, half_fourier,
                       spectral_half_fourier, thermal_u)
from .variational import VariationalSolution

KINDS = ("xx", "yy", "zz", "yz")
#: absolute tolerances are never loosened beyond this, however small the prefactor
MAX_ABS_TOL = 1e-6


def _memo_key(kind, lam):
    return kind, float(f"{lam:.11e}")


@dataclass
class CorrelationContext:
    """Correlation functions of one variational solution.

    Parameters
    ----------
    solution : VariationalSolution
    settings : QuadratureSettings
    prefactors : dict, optional
        Magnitude of the dissipator prefactor multiplying each kind.  The
        absolute tolerance of kind k becomes ``abs_tol / min(prefactor_k, 1)``
        (capped at ``MAX_ABS_TOL``) so that the tolerance applies to the
        resulting rate rather than to the bare correlation integral.
    """

    solution: VariationalSolution
    settings: QuadratureSettings = DEFAULT_SETTINGS
    prefactors: dict | None = None
    _memo: dict = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)
    _rules: dict = field(default_factory=dict, init=False, repr=False)

    @property
    def phonons(self) -> PhononParams:
        return self.solution.phonons

    @property
    def B(self) -> float:
        return self.solution.B

    @property
    def width(self) -> float:
        return self.settings.upper(self.phonons.cutoff)

    def abs_tol(self, kind):
        pref = 1.0 if not self.prefactors else abs(self.prefactors.get(kind, 1.0))
        if pref >= 1.0:
            return self.settings.abs_tol
        if pref == 0.0:
            return MAX_ABS_TOL
        return min(self.settings.abs_tol / pref, MAX_ABS_TOL)

    # spectral functions ---------------------------------------------------
    def _parts(self, w):
        pp = self.phonons
        f = np.asarray(self.solution.displacement(w), dtype=float)
        e = pp.alpha * np.exp(-((w / pp.cutoff) ** 2))
        u = thermal_u(w, pp.hbar_beta, pp.cutoff)
        return f, e, u

    def spectrum_kappa(self, w):
        f, e, u = self._parts(np.asarray(w, dtype=float))
        return 0.5 * f * f * e * (u - w)

    def spectrum_zz(self, w):
        w = np.asarray(w, dtype=float)
        f, e, u = self._parts(w)
        return 0.5 * (1 - f) ** 2 * e * w * w * (u - w)

    def spectrum_perp(self, w):
        """Real R with S_perp = -i R."""
        w = np.asarray(w, dtype=float)
        f, e, u = self._parts(w)
        return 0.5 * w * f * (1 - f) * e * (u - w)

    def breakpoints(self):
        pos = self.solution.breakpoints(self.width)
        return tuple(sorted(set([0.0] + list(pos) + [-p for p in pos])))

    # time domain ------------------------------------------------------------
    def _omega_rule(self, tau_max):
        """Composite Gauss nodes on [0, W] resolving cos(w tau) for tau <= tau_max."""
        wc = self.phonons.cutoff
        bucket = 2.0 ** math.ceil(math.log2(max(tau_max * wc, 1.0)))
        with self._lock:
            rule = self._rules.get(bucket)
        if rule is not None:
            return rule
        W = self.width
        h = min(0.25 * wc, 12.0 / (bucket / wc))
        edges = set(np.linspace(0.0, W, int(math.ceil(W / h)) + 1).tolist())
        pos = [p for p in self.solution.breakpoints(W) if p > 0]
        if pos:
            # geometric panels resolve the low-frequency shape of F
            lo = pos[0]
            edges.update(lo * 2.0 ** -np.arange(1, 12))
            edges.update(pos)
        edges = np.array(sorted(edges))
        x, wt = _legendre(self.settings.order)
        a, b = edges[:-1], edges[1:]
        nodes = (0.5 * (a + b))[:, None] + (0.5 * (b - a))[:, None] * x[None, :]
        weights = (0.5 * (b - a))[:, None] * wt[None, :]
        nodes = nodes.ravel()
        weights = weights.ravel()
        f, e, u = self._parts(nodes)
        base = weights * f * f * e
        rule = (nodes, base * u, base * nodes)
        with self._lock:
            self._rules.setdefault(bucket, rule)
        return rule

    def kappa(self, tau):
        """kappa(tau) = int_0^inf J F^2 w^-2 [coth cos(w tau) - i sin(w tau)] dw."""
        t = np.asarray(tau, dtype=float)
        if np.any(t < 0):
            raise ValueError("tau must be >= 0")
        flat = t.ravel()
        out = np.zeros(flat.shape, dtype=complex)
        if self.phonons.alpha == 0.0 or flat.size == 0 or self.solution.frame == "weak_coupling":
            return out.reshape(t.shape) if t.ndim else complex(out[0])
        nodes, a, b = self._omega_rule(float(flat.max()))
        chunk = max(1, 4_000_000 // nodes.size)
        for i in range(0, flat.size, chunk):
            ph = np.outer(flat[i:i + chunk], nodes)
            out[i:i + chunk] = np.cos(ph) @ a - 1j * (np.sin(ph) @ b)
        return out.reshape(t.shape) if t.ndim else complex(out[0])

    def kappa_direct(self, tau, rel_tol=1e-10, abs_tol=1e-13):
        """Adaptive-quadrature kappa; the slow reference path."""
        t = np.atleast_1d(np.asarray(tau, dtype=float))
        pp = self.phonons

        def g(w):
            f, e, u = self._parts(w)
            ph = np.outer(w, t)
            return (f * f * e)[:, None] * (u[:, None] * np.cos(ph) - 1j * w[:, None] * np.sin(ph))

        if pp.alpha == 0.0:
            val = np.zeros(t.shape, dtype=complex)
        else:
            val = adaptive_gauss(g, 0.0, self.width, rel_tol=rel_tol, abs_tol=abs_tol,
                                 breakpoints=self.solution.breakpoints(self.width),
                                 max_width=min(self.width / 8, 8.0 / max(t.max(), 1e-9)),
                                 max_panels=200000)
        val = np.asarray(val).reshape(t.shape)
        return val if np.ndim(tau) else complex(val[0])

    def lambda_xx(self, tau):
        k = self.kappa(tau)
        return self.B**2 * (np.cosh(k) - 1.0)

    def lambda_yy(self, tau):
        k = self.kappa(tau)
        return self.B**2 * np.sinh(k)

    def _direct_linear(self, tau, kind):
        t = np.atleast_1d(np.asarray(tau, dtype=float))
        pp = self.phonons

        def g(w):
            f, e, u = self._parts(w)
            ph = np.outer(w, t)
            c, s = np.cos(ph), np.sin(ph)
            if kind == "zz":
                return ((1 - f) ** 2 * e * w * w)[:, None] * (u[:, None] * c - 1j * w[:, None] * s)
            return (-2.0 * self.B * w * f * (1 - f) * e)[:, None] * (u[:, None] * s + 1j * w[:, None] * c)

        if pp.alpha == 0.0 or (self.solution.frame == "polaron"):
            val = np.zeros(t.shape, dtype=complex)
        elif kind == "yz" and self.solution.frame == "weak_coupling":
            val = np.zeros(t.shape, dtype=complex)
        else:
            val = adaptive_gauss(g, 0.0, self.width, rel_tol=1e-10, abs_tol=1e-14,
                                 breakpoints=self.solution.breakpoints(self.width),
                                 max_width=min(self.width / 8, 8.0 / max(t.max(), 1e-9)), max_panels=200000)
        val = np.asarray(val).reshape(t.shape)
        return val if np.ndim(tau) else complex(val[0])

    def lambda_zz(self, tau):
        """Lambda_zz(tau) = int J (1-F)^2 C_par dw."""
        return self._direct_linear(tau, "zz")

    def lambda_yz(self, tau):
        """Lambda_yz(tau) = -2B int J w^-1 F (1-F) C_perp dw, C_perp = coth sin + i cos."""
        return self._direct_linear(tau, "yz")

    def sideband_G(self, tau):
        """G(tau) = B^2 exp(int J F^2 w^-2 [coth cos + i sin] dw) = B^2 exp(conj kappa)."""
        return self.B**2 * np.exp(np.conj(self.kappa(tau)))

    def correlation(self, kind, tau):
        return {"xx": self.lambda_xx, "yy": self.lambda_yy, "zz": self.lambda_zz, "yz": self.lambda_yz}[kind](tau)

    # rates ------------------------------------------------------------------
    def _spectral(self, spec, lam, kind):
        return spectral_half_fourier(spec, lam, self.width, rel_tol=self.settings.rel_tol,
                                     abs_tol=self.abs_tol(kind), order=self.settings.order,
                                     breakpoints=self.breakpoints(), max_panels=self.settings.max_panels)

    def _compute(self, kinds, lams):
        """Fresh coefficients for ``kinds`` x ``lams`` as a dict."""
        out = {}
        B = self.B
        zero = self.phonons.alpha == 0.0
        frame = self.solution.frame
        need_td = [k for k in kinds if k in ("xx", "yy")]
        td = None
        if need_td and not zero and frame != "weak_coupling":
            tols = np.array([self.abs_tol("xx"), self.abs_tol("yy")])

            def fun(t):
                k = self.kappa(t)
                return np.stack([B * B * (np.cosh(k) - 1.0), B * B * (np.sinh(k) - k)], axis=1)

            td = half_fourier(fun, np.asarray(lams, dtype=float), self.settings, cutoff=self.phonons.cutoff,
                              abs_tol=tols)
        for j, lam in enumerate(lams):
            for kind in kinds:
                if zero:
                    val = 0j
                elif kind == "xx":
                    val = 0j if td is None else complex(td[0, j])
                elif kind == "yy":
                    if td is None:
                        val = 0j
                    else:
                        val = complex(td[1, j]) + B * B * complex(self._spectral(self.spectrum_kappa, lam, "yy"))
                elif kind == "zz":
                    val = 0j if frame == "polaron" else complex(self._spectral(self.spectrum_zz, lam, "zz"))
                elif kind == "yz":
                    if frame != "variational":
                        val = 0j
                    else:
                        val = 2j * B * complex(self._spectral(self.spectrum_perp, lam, "yz"))
                else:
                    raise ValueError(f"unknown correlation kind {kind!r}")
                out[_memo_key(kind, lam)] = val
        return out

    def response_coefficients(self, kinds, lams):
        """Half-line transforms for every pair in ``kinds`` x ``lams``.

        Returns a dict ``{(kind, lam): complex}`` with the caller's ``lam``
        values as keys.  Cached per (kind, lam rounded to 1e-12 relative).
        """
        kinds = tuple(kinds)
        for k in kinds:
            if k not in KINDS:
                raise ValueError(f"unknown correlation kind {k!r}")
        lams = [float(x) for x in lams]
        missing_lams = []
        with self._lock:
            for lam in lams:
                if any(_memo_key(k, lam) not in self._memo for k in kinds) and lam not in missing_lams:
                    missing_lams.append(lam)
        if missing_lams:
            fresh = self._compute(kinds, missing_lams)
            with self._lock:
                for key, val in fresh.items():
                    self._memo.setdefault(key, val)
        with self._lock:
            return {(k, lam): self._memo[_memo_key(k, lam)] for k in kinds for lam in lams}

    def response_coefficient(self, kind, lam):
        """int_0^inf exp(i lam tau) Lambda_kind(tau) dtau."""
        return self.response_coefficients((kind,), (lam,))[(kind, float(lam))]
