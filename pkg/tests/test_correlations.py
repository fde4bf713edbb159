import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from scipy.linalg import expm

from vibsqueeze.core import PhononParams
from vibsqueeze.correlations import CorrelationContext
from vibsqueeze.spectral import half_fourier
from vibsqueeze.variational import solve_variational

from conftest import system

PP = PhononParams(0.027, 2.2, 4.0)


@pytest.fixture(scope="module")
def strong():
    return CorrelationContext(solve_variational(system(10**6.5, 1.0), PP))


@pytest.fixture(scope="module")
def weak():
    return CorrelationContext(solve_variational(system(1e2, -0.3), PP))


def test_kappa_at_zero(strong, weak):
    for ctx in (strong, weak):
        k0 = ctx.kappa(0.0)
        assert abs(k0.imag) < 1e-10
        assert k0.real == pytest.approx(-2 * math.log(ctx.B), rel=1e-9)
        assert abs(ctx.B**2 * np.exp(k0) - 1) < 1e-9


def test_kappa_decay(strong):
    assert abs(strong.kappa(50 / PP.cutoff)) < 1e-8


def test_fast_kappa_matches_direct_quadrature(strong, weak):
    for ctx in (strong, weak):
        t = np.array([0.0, 0.3, 2.0, 9.0, 40.0])
        assert np.max(np.abs(ctx.kappa(t) - ctx.kappa_direct(t))) < 1e-9


def test_lambda_at_zero(strong):
    B = strong.B
    assert strong.lambda_xx(0.0) == pytest.approx((1 - B * B) ** 2 / 2, abs=1e-10)
    assert strong.lambda_yy(0.0) == pytest.approx((1 - B**4) / 2, abs=1e-10)


def test_sideband_function(strong):
    assert abs(strong.sideband_G(0.0) - 1) < 1e-9
    assert abs(strong.sideband_G(50 / PP.cutoff) - strong.B**2) < 1e-6


def test_everything_vanishes_without_phonons():
    ctx = CorrelationContext(solve_variational(system(1e3, 0.5), PP.replace(alpha=0.0)))
    t = np.linspace(0, 30, 31)
    for kind in ("xx", "yy", "zz", "yz"):
        assert np.all(ctx.correlation(kind, t) == 0)
        assert ctx.response_coefficient(kind, 0.7) == 0
    assert np.all(ctx.sideband_G(t) == 1)


def test_forced_frames():
    sp = system(1e6, 1.0)
    pol = CorrelationContext(solve_variational(sp, PP, frame="polaron"))
    t = np.array([0.0, 1.0, 5.0])
    assert np.all(pol.lambda_zz(t) == 0) and np.all(pol.lambda_yz(t) == 0)
    wk = CorrelationContext(solve_variational(sp, PP, frame="weak_coupling"))
    assert wk.B == 1.0
    for f in (wk.lambda_yz, wk.lambda_xx, wk.lambda_yy):
        assert np.all(f(t) == 0)
    assert abs(wk.lambda_zz(0.0)) > 0


def test_decay_envelope(strong):
    wc = PP.cutoff
    early = np.linspace(0, 10 / wc, 200)
    late = np.linspace(10 / wc, 20 / wc, 200)
    for kind in ("xx", "yy", "zz", "yz"):
        assert np.max(np.abs(strong.correlation(kind, late))) < np.max(np.abs(strong.correlation(kind, early)))


def test_xx_at_zero_frequency_against_trapezoid(strong):
    tau = np.linspace(0, 60 / PP.cutoff, 60001)
    ref = np.trapezoid(strong.lambda_xx(tau).real, tau)
    assert strong.response_coefficient("xx", 0.0).real == pytest.approx(ref, rel=1e-6)


@pytest.mark.parametrize("kind", ["zz", "yz", "yy"])
def test_spectral_forms_match_time_domain(strong, kind):
    lams = [0.0, strong.solution.eta_r, -strong.solution.eta_r]
    for lam in lams:
        td = half_fourier(lambda t: strong.correlation(kind, t), lam, cutoff=PP.cutoff, abs_tol=1e-12)
        assert abs(strong.response_coefficient(kind, lam) - td) < 1e-8


def test_memo_is_reproducible_and_thread_safe():
    vs = solve_variational(system(1e6, 1.0), PP)
    a = CorrelationContext(vs)
    lam = vs.eta_r
    first = a.response_coefficient("xx", lam)
    assert a.response_coefficient("xx", lam * (1 + 1e-13)) == first
    fresh = CorrelationContext(vs).response_coefficient("xx", lam)
    assert abs(fresh - first) <= 1e-12
    b = CorrelationContext(vs)
    with ThreadPoolExecutor(4) as pool:
        vals = list(pool.map(lambda k: b.response_coefficient(k, lam), ["yy"] * 6))
    assert len(set(vals)) == 1


def test_cross_correlations_single_mode_fock_oracle():
    """Bath cross correlations of one displaced mode against the closed forms.

    With B+- = D(+-f/w0), By = (B+ - B-)/(2i) and Bz = (g - f)(b + b^dag):
    <By(t) Bz> = -Lyz(t)/2, <Bz(t) By> = +Lyz(t)/2, <Bx(t) By> = <Bx(t) Bz> = 0,
    <Bx(t) Bx> = Lxx(t), <By(t) By> = Lyy(t) for the displayed single-mode Lambdas.
    """
    n, w0, g, F, hb = 60, 1.0, 0.6, 0.4, 2.0
    f = F * g
    b = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
    bd = b.conj().T
    H = w0 * bd @ b
    rho = expm(-hb * H)
    rho /= np.trace(rho)
    a = f / w0
    Bp, Bm = expm(a * (bd - b)), expm(-a * (bd - b))
    B = np.trace(rho @ Bp).real
    coth = 1 / math.tanh(hb * w0 / 2)
    assert B == pytest.approx(math.exp(-0.5 * a * a * coth), rel=1e-12)
    Bx = (Bp + Bm) / 2 - B * np.eye(n)
    By = (Bp - Bm) / 2j
    Bz = (g - f) * (b + bd)
    for t in (0.0, 0.7, 2.3):
        U = expm(-1j * H * t)

        def corr(X, Y):
            return np.trace(rho @ U.conj().T @ X @ U @ Y)

        kappa = a * a * (coth * math.cos(w0 * t) - 1j * math.sin(w0 * t))
        lxx = B * B / 2 * (np.exp(kappa) + np.exp(-kappa) - 2)
        lyy = B * B / 2 * (np.exp(kappa) - np.exp(-kappa))
        lzz = (g - f) ** 2 * (coth * math.cos(w0 * t) - 1j * math.sin(w0 * t))
        lyz = -2 * B * g * g / w0 * F * (1 - F) * (coth * math.sin(w0 * t) + 1j * math.cos(w0 * t))
        assert corr(Bx, Bx) == pytest.approx(lxx, abs=1e-10)
        assert corr(By, By) == pytest.approx(lyy, abs=1e-10)
        assert corr(Bz, Bz) == pytest.approx(lzz, abs=1e-10)
        assert corr(By, Bz) == pytest.approx(-lyz / 2, abs=1e-10)
        assert corr(Bz, By) == pytest.approx(lyz / 2, abs=1e-10)
        assert abs(corr(Bx, By)) < 1e-10 and abs(corr(Bx, Bz)) < 1e-10
