"""Spectral density and the quadrature routines built on it.

Two integration engines live here:

* :func:`adaptive_gauss` is a vectorised, globally adaptive composite
  Gauss-Legendre rule.  The integrand receives a 1-D array of nodes and may
  return several components at once (shape ``(n,)`` or ``(n, m)``), which
  lets one pass over the nodes serve many correlation kinds or transform
  frequencies.  Each panel is compared against its two halves and the
  difference is the panel error estimate.
* :func:`half_fourier` integrates ``exp(i lam tau) f(tau)`` over the half
  line by doubling a finite horizon until the function has decayed and the
  last doubling no longer moves the result.

For correlation functions with a known spectral representation
``C(tau) = int S(w) exp(i w tau) dw`` the half-line transform is available in
closed form as ``pi S(-lam) + i PV int S(w)/(w + lam) dw``; see
:func:`spectral_half_fourier`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import spherical_jn

from .core import PhononParams
from .errors import QuadratureError


@dataclass(frozen=True)
class QuadratureSettings:
    """Tolerances and domain rules shared by all integrals.

    Parameters
    ----------
    rel_tol, abs_tol : float
        Target accuracy; an integral is accepted once its error estimate is
        below ``max(abs_tol, rel_tol * |I|)``.
    cutoff_multiplier : float
        Frequency integrals run over ``[0, m w_c]``.
    max_panels : int
        Subdivision budget of :func:`adaptive_gauss`.
    horizon_start, horizon_ceiling : float
        Initial and maximal time horizon of :func:`half_fourier`, in units
        of ``1/w_c``.
    points_per_period : int
        Minimum node density per period ``2 pi/|lam|`` in time integrals.
    order : int
        Gauss-Legendre points per panel.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    cutoff_multiplier: float = 12.0
    max_panels: int = 20000
    horizon_start: float = 16.0
    horizon_ceiling: float = 1e4
    points_per_period: int = 20
    order: int = 15

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.cutoff_multiplier < 6:
            raise ValueError("cutoff_multiplier must be >= 6")
        if self.order < 4 or self.max_panels < 1:
            raise ValueError("order must be >= 4 and max_panels >= 1")
        if not 0 < self.horizon_start <= self.horizon_ceiling:
            raise ValueError("need 0 < horizon_start <= horizon_ceiling")

    def upper(self, cutoff: float) -> float:
        return self.cutoff_multiplier * cutoff


DEFAULT_SETTINGS = QuadratureSettings()

#: below this fraction of w_c the thermal factor uses its series expansion
SERIES_THRESHOLD = 1e-6


def spectral_density(omega, p: PhononParams):
    """J(w) = alpha w^3 exp(-w^2/w_c^2) for w >= 0."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise ValueError("spectral density is defined for w >= 0")
    out = p.alpha * w**3 * np.exp(-((w / p.cutoff) ** 2))
    return float(out) if out.ndim == 0 else out


def thermal_u(omega, hbar_beta: float, cutoff: float = 1.0):
    """u(w) = w coth(hbar beta w / 2), an even smooth function with u(0) = 2/(hbar beta).

    Below ``1e-6 * cutoff`` the two-term series ``2/hb + hb w^2/6`` is used.
    """
    w = np.abs(np.asarray(omega, dtype=float))
    small = w < SERIES_THRESHOLD * cutoff
    with np.errstate(divide="ignore", invalid="ignore"):
        big = w / np.tanh(0.5 * hbar_beta * w)
    out = np.where(small, 2.0 / hbar_beta + hbar_beta * w * w / 6.0, big)
    return float(out) if out.ndim == 0 else out


def coth_half(omega, hbar_beta: float):
    """coth(hbar beta w / 2); singular at w = 0."""
    w = np.asarray(omega, dtype=float)
    out = 1.0 / np.tanh(0.5 * hbar_beta * w)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=16)
def _legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_nodes(a, b, order):
    """Nodes and weights for a batch of panels, shapes (k, order)."""
    x, w = _legendre(order)
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    return c[:, None] + h[:, None] * x[None, :], h[:, None] * w[None, :]


@lru_cache(maxsize=16)
def _filon_matrix(order: int):
    """Q[j, k] = w_j (2k + 1) P_k(x_j) for the Gauss nodes x_j."""
    x, w = _legendre(order)
    P = np.polynomial.legendre.legvander(x, order - 1)
    return w[:, None] * P * (2 * np.arange(order) + 1)[None, :]


def filon_weights(a, b, lam, order):
    """Weights ``W[k, j, l]`` with ``sum_j W f(x_j) ~ int_{a_k}^{b_k} exp(i lam_l t) f(t) dt``.

    ``f`` is replaced by its Legendre interpolant through the Gauss nodes of
    each panel and the oscillatory factor is integrated exactly, using
    ``int_{-1}^{1} exp(i mu x) P_n(x) dx = 2 i^n j_n(mu)``.  The rule is exact
    for polynomials of degree below ``order`` at any ``lam`` and reduces to
    Gauss-Legendre at ``lam = 0``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    h = 0.5 * (b - a)
    c = 0.5 * (a + b)
    mu = h[:, None] * lam[None, :]
    n = np.arange(order)
    jn = spherical_jn(n[None, None, :], np.abs(mu)[:, :, None])
    # j_n is even/odd in mu with the parity of n
    jn = jn * np.where(mu[:, :, None] < 0, (-1.0) ** n, 1.0)
    moments = (1j ** n)[None, None, :] * jn
    Q = _filon_matrix(order)
    core = np.einsum("jn,kln->kjl", Q, moments)
    return (h[:, None] * np.exp(1j * c[:, None] * lam[None, :]))[:, None, :] * core


def adaptive_gauss(f, a, b, *, rel_tol=1e-9, abs_tol=1e-12, order=15, breakpoints=(),
                   max_width=None, initial_panels=8, max_panels=20000, return_error=False,
                   oscillation=None):
    """Globally adaptive composite Gauss-Legendre quadrature on [a, b].

    Parameters
    ----------
    f : callable
        Maps a 1-D array of nodes to values of shape ``(n,)`` or ``(n, m)``.
    rel_tol, abs_tol : float or array
        Acceptance rule per component, ``err <= max(abs_tol, rel_tol |I|)``.
        Array tolerances broadcast against the component axis.
    breakpoints : sequence of float
        Extra panel edges (features, kinks, poles of a subtracted integrand).
    max_width : float, optional
        Upper bound on the initial panel width.
    oscillation : 1-D array, optional
        Frequencies ``lam``; the integral becomes ``int exp(i lam t) f(t) dt``
        evaluated with :func:`filon_weights`, so panels only need to resolve
        ``f``.  The result has components ``m x len(lam)`` flattened.

    Returns
    -------
    value or (value, error)
    """
    a = float(a)
    b = float(b)
    if b == a:
        probe = np.asarray(f(np.array([a])))
        z = np.zeros(probe.shape[1:], dtype=probe.dtype)
        return (z, np.zeros(z.shape)) if return_error else (z if z.ndim else z[()])
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    edges = [a, b]
    edges += [float(p) for p in breakpoints if a < p < b]
    edges = np.unique(np.asarray(edges))
    if max_width is None:
        max_width = (b - a) / initial_panels
    pieces = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        k = max(1, int(math.ceil((hi - lo) / max_width - 1e-12)))
        pieces.append(np.linspace(lo, hi, k + 1))
    cuts = np.concatenate([p[:-1] for p in pieces] + [[b]])
    lo = cuts[:-1]
    hi = cuts[1:]
    total_width = b - a

    done_val = 0.0
    done_err = 0.0
    frozen = 0
    cur_val = cur_err = None
    tol_abs = tol_rel = None
    # each round evaluates the pending panels, freezes the good ones, splits the rest
    while True:
        k = lo.size
        if k + frozen > max_panels:
            raise QuadratureError(f"adaptive quadrature exceeded {max_panels} panels",
                                  estimate=None if cur_val is None else sign * cur_val, error=cur_err)
        mid = 0.5 * (lo + hi)
        xw, ww = _panel_nodes(lo, hi, order)
        xl, wl = _panel_nodes(lo, mid, order)
        xr, wr = _panel_nodes(mid, hi, order)
        nodes = np.concatenate([xw.ravel(), xl.ravel(), xr.ravel()])
        vals = np.asarray(f(nodes))
        comp_shape = vals.shape[1:]
        vals = vals.reshape(3, k, order, -1)
        if oscillation is None:
            whole = np.einsum("kn,knm->km", ww, vals[0])
            halves = np.einsum("kn,knm->km", wl, vals[1]) + np.einsum("kn,knm->km", wr, vals[2])
        else:
            comp_shape = (vals.shape[-1] * len(oscillation),)

            def osc(p, q, v):
                return np.einsum("knl,knm->kml", filon_weights(p, q, oscillation, order), v).reshape(k, -1)

            whole = osc(lo, hi, vals[0])
            halves = osc(lo, mid, vals[1]) + osc(mid, hi, vals[2])
        err = np.abs(whole - halves)
        if tol_abs is None:
            nc = halves.shape[1]
            tol_abs = np.broadcast_to(np.asarray(abs_tol, dtype=float).reshape(-1), (nc,))
            tol_rel = np.broadcast_to(np.asarray(rel_tol, dtype=float).reshape(-1), (nc,))
        cur_val = done_val + halves.sum(axis=0)
        cur_err = done_err + err.sum(axis=0)
        tol = np.maximum(tol_abs, tol_rel * np.abs(cur_val))
        failing = cur_err > tol
        if not np.any(failing):
            break
        # a panel is refined when it exceeds its share of a failing budget
        share = tol[None, :] * ((hi - lo) / total_width)[:, None]
        split = np.any((err > share) & failing[None, :], axis=1)
        if not np.any(split):
            split = np.any(err > 0.0, axis=1)
            if not np.any(split):
                break
        keep = ~split
        frozen += int(keep.sum())
        done_val = done_val + halves[keep].sum(axis=0)
        done_err = done_err + err[keep].sum(axis=0)
        slo, shi, smid = lo[split], hi[split], mid[split]
        lo = np.concatenate([slo, smid])
        hi = np.concatenate([smid, shi])
    value = sign * cur_val.reshape(comp_shape)
    error = cur_err.reshape(comp_shape)
    if not comp_shape:
        value = value[()]
        error = error[()]
    return (value, error) if return_error else value


def integrate_frequency(f, cutoff: float, settings: QuadratureSettings = DEFAULT_SETTINGS, *,
                        breakpoints=(), lower=0.0, upper=None, return_error=False):
    """Integrate ``f`` over ``[lower, m w_c]``.

    ``f`` must be vectorised and return finite values at every interior
    node; removable singularities at w = 0 are the caller's job (see
    :func:`thermal_u`).  Raises :class:`QuadratureError` carrying the
    achieved estimate when the panel budget runs out.
    """
    hi = settings.upper(cutoff) if upper is None else upper
    return adaptive_gauss(f, lower, hi, rel_tol=settings.rel_tol, abs_tol=settings.abs_tol,
                          order=settings.order, breakpoints=breakpoints,
                          max_panels=settings.max_panels, return_error=return_error)


def half_fourier(fun, lam, settings: QuadratureSettings = DEFAULT_SETTINGS, *, cutoff=1.0,
                 abs_tol=None, rel_tol=None, return_info=False, method="filon"):
    """Half-line transform ``int_0^inf exp(i lam tau) fun(tau) dtau``.

    Parameters
    ----------
    fun : callable
        Vectorised in tau; may return ``(n,)`` or ``(n, m)`` values.
    lam : float or 1-D array
        Transform frequencies; an array is evaluated on shared nodes.
    cutoff : float
        Bath cut-off w_c setting the horizon unit ``1/w_c``.
    abs_tol, rel_tol : float or array, optional
        Per-component overrides of the settings.  Array shapes broadcast
        against ``fun``'s component axis.

    Returns
    -------
    complex or ndarray
        Shape ``fun components x lam`` with singleton axes squeezed.

    Notes
    -----
    The horizon starts at ``horizon_start/w_c`` and doubles until
    ``|fun(T)| <= abs_tol`` and the last doubling changed the result by at
    most ``max(abs_tol, rel_tol |I|)``.

    ``method="filon"`` (default) integrates the factor ``exp(i lam tau)``
    exactly against the panel interpolant of ``fun``, so panel sizes follow
    ``fun`` alone.  ``method="gauss"`` applies plain Gauss-Legendre panels
    holding at least ``points_per_period`` nodes per period ``2 pi/|lam|``;
    it is slower and kept as an independent check.
    """
    if method not in ("filon", "gauss"):
        raise ValueError("method must be 'filon' or 'gauss'")
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    scalar_lam = np.ndim(lam) == 0
    atol = settings.abs_tol if abs_tol is None else abs_tol
    rtol = settings.rel_tol if rel_tol is None else rel_tol
    probe = np.asarray(fun(np.array([0.0])))
    scalar_fun = probe.ndim == 1
    m = 1 if scalar_fun else probe.shape[1]
    nl = lam_arr.size
    atol_c = np.broadcast_to(np.asarray(atol, dtype=float).reshape(-1, 1) if np.ndim(atol) else atol, (m, nl))
    rtol_c = np.broadcast_to(np.asarray(rtol, dtype=float).reshape(-1, 1) if np.ndim(rtol) else rtol, (m, nl))

    def integrand(t):
        v = np.asarray(fun(t)).reshape(t.size, m)
        ph = np.exp(1j * np.outer(t, lam_arr))
        return (v[:, :, None] * ph[:, None, :]).reshape(t.size, m * nl)

    lmax = float(np.max(np.abs(lam_arr)))
    width = None
    if lmax > 0:
        width = settings.order / settings.points_per_period * (2.0 * math.pi / lmax)
    t_hi = settings.horizon_start / cutoff
    ceiling = settings.horizon_ceiling / cutoff

    def segment(lo, hi):
        if method == "filon":
            return adaptive_gauss(lambda t: np.asarray(fun(t)).reshape(t.size, m), lo, hi,
                                  rel_tol=rtol_c.ravel() * 0.1, abs_tol=atol_c.ravel() * 0.1,
                                  order=settings.order, max_width=(hi - lo) / 8, max_panels=settings.max_panels,
                                  oscillation=lam_arr)
        w = (hi - lo) / 8 if width is None else min(width, (hi - lo) / 8)
        return adaptive_gauss(integrand, lo, hi, rel_tol=rtol_c.ravel() * 0.1, abs_tol=atol_c.ravel() * 0.1,
                              order=settings.order, max_width=w, max_panels=settings.max_panels)

    total = segment(0.0, t_hi)
    t_lo = 0.0
    while True:
        t_lo, t_hi = t_hi, 2.0 * t_hi
        if t_hi > ceiling * (1 + 1e-12):
            raise QuadratureError(f"correlation has not decayed by the horizon ceiling {ceiling:g}",
                                  estimate=total, error=None)
        tail = segment(t_lo, t_hi)
        total = total + tail
        edge = np.abs(np.asarray(fun(np.array([t_hi]))).reshape(m))
        decayed = np.all(edge[:, None] <= atol_c)
        settled = np.all(np.abs(tail).reshape(m, nl) <= np.maximum(atol_c, rtol_c * np.abs(total).reshape(m, nl)))
        if decayed and settled:
            break
    out = total.reshape(m, nl)
    if scalar_fun:
        out = out[0]
        if scalar_lam:
            out = out[0]
    elif scalar_lam:
        out = out[:, 0]
    if return_info:
        return out, {"horizon": t_hi}
    return out


def principal_value(s, pole, lower, upper, *, rel_tol=1e-9, abs_tol=1e-12, order=15, breakpoints=(),
                    max_panels=20000):
    """PV ``int_lower^upper s(w)/(w - pole) dw`` by singularity subtraction.

    ``s`` is vectorised and smooth.  The subtracted integrand
    ``(s(w) - s(pole))/(w - pole)`` is regular and the remainder is the
    logarithm ``s(pole) ln((upper - pole)/(pole - lower))``.
    """
    if not lower < pole < upper:
        return adaptive_gauss(lambda w: s(w) / (w - pole), lower, upper, rel_tol=rel_tol, abs_tol=abs_tol,
                              order=order, breakpoints=breakpoints, max_panels=max_panels)
    s0 = np.asarray(s(np.array([pole])))[0]

    def sub(w):
        return (s(w) - s0) / (w - pole) if np.ndim(s0) == 0 else (s(w) - s0) / (w - pole)[:, None]

    bp = tuple(breakpoints) + (pole,)
    reg = adaptive_gauss(sub, lower, upper, rel_tol=rel_tol, abs_tol=abs_tol, order=order,
                         breakpoints=bp, max_panels=max_panels)
    return reg + s0 * math.log((upper - pole) / (pole - lower))


def spectral_half_fourier(s_real, lam, width, *, rel_tol=1e-9, abs_tol=1e-12, order=15, breakpoints=(),
                          max_panels=20000):
    """Half-line transform of ``C(tau) = int_{-W}^{W} s(w) exp(i w tau) dw``.

    Returns ``pi s(-lam) + i PV int s(w)/(w + lam) dw`` for a real
    vectorised spectral function ``s`` supported inside ``[-W, W]``.
    Multiply by a constant phase for complex spectra.
    """
    lam = float(lam)
    pv = principal_value(s_real, -lam, -width, width, rel_tol=rel_tol, abs_tol=abs_tol, order=order,
                         breakpoints=breakpoints, max_panels=max_panels)
    return math.pi * np.asarray(s_real(np.array([-lam])))[0] + 1j * pv
