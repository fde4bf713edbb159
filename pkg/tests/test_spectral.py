import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from vibsqueeze.core import PhononParams
from vibsqueeze.errors import QuadratureError
from vibsqueeze.spectral import (QuadratureSettings, adaptive_gauss, filon_weights, half_fourier,
                                 integrate_frequency, principal_value, spectral_density, spectral_half_fourier,
                                 thermal_u)

PP = PhononParams(0.027, 2.2, 4.0)


def test_spectral_density_examples():
    assert spectral_density(0.0, PP) == 0.0
    assert spectral_density(2.2, PP) == pytest.approx(0.027 * 2.2**3 * math.exp(-1), rel=1e-14)
    assert spectral_density(2.2, PP) == pytest.approx(0.10576, abs=5e-6)
    res = minimize_scalar(lambda w: -spectral_density(w, PP), bounds=(0.1, 10), method="bounded",
                          options={"xatol": 1e-10})
    assert res.x == pytest.approx(math.sqrt(1.5) * 2.2, rel=1e-6)


def test_spectral_density_linear_in_alpha():
    w = np.linspace(0, 20, 101)
    assert np.array_equal(spectral_density(w, PP.replace(alpha=0.054)), 2 * spectral_density(w, PP))


def test_spectral_density_rejects_negative_frequency():
    with pytest.raises(ValueError):
        spectral_density(-1.0, PP)


def test_gaussian_moments():
    s = QuadratureSettings()
    a, wc = PP.alpha, PP.cutoff
    j_over_w = integrate_frequency(lambda w: spectral_density(w, PP) / np.where(w > 0, w, 1), wc, s)
    assert j_over_w == pytest.approx(a * math.sqrt(math.pi) / 4 * wc**3, rel=1e-9)
    j_over_w2 = integrate_frequency(lambda w: a * w * np.exp(-(w / wc) ** 2), wc, s)
    assert j_over_w2 == pytest.approx(a * wc**2 / 2, rel=1e-9)
    assert j_over_w2 == pytest.approx(0.065340, abs=5e-7)
    assert integrate_frequency(lambda w: np.zeros_like(w), wc, s) == 0.0


def test_thermal_u_series_branch():
    hb = PP.hbar_beta
    assert thermal_u(0.0, hb) == pytest.approx(2 / hb)
    w = np.array([0.999e-6, 1.001e-6])
    assert thermal_u(w[0], hb) == pytest.approx(thermal_u(w[1], hb), rel=1e-8)
    assert thermal_u(3.0, hb) == pytest.approx(3.0 / math.tanh(1.5 * hb))


def test_adaptive_gauss_budget_error_carries_estimate():
    with pytest.raises(QuadratureError) as exc:
        adaptive_gauss(lambda x: np.abs(x - 0.3) ** 0.5 * np.sin(1 / (x + 1e-3)), 0, 1, max_panels=20,
                       rel_tol=1e-14, abs_tol=1e-16)
    assert exc.value.estimate is not None and exc.value.error is not None


def test_adaptive_gauss_vector_components():
    val = adaptive_gauss(lambda x: np.stack([np.sin(x), np.cos(x)], 1), 0, math.pi)
    assert val == pytest.approx([2.0, 0.0], abs=1e-12)


@pytest.mark.parametrize("lam", [0.0, 0.4, 7.0, -35.0])
def test_filon_weights_match_quad(lam):
    a, b = 0.2, 1.7
    W = filon_weights(np.array([a]), np.array([b]), np.array([lam]), 15)[0, :, 0]
    x = np.polynomial.legendre.leggauss(15)[0] * 0.5 * (b - a) + 0.5 * (a + b)
    f = np.exp(-x) * np.cos(3 * x)
    g = lambda t: math.exp(-t) * math.cos(3 * t)
    ref = (quad(lambda t: g(t) * math.cos(lam * t), a, b, limit=400, epsabs=1e-14)[0]
           + 1j * quad(lambda t: g(t) * math.sin(lam * t), a, b, limit=400, epsabs=1e-14)[0])
    assert abs(W @ f - ref) < 1e-11


@pytest.mark.parametrize("method", ["filon", "gauss"])
def test_half_fourier_examples(method):
    assert half_fourier(lambda t: np.exp(-t), 0.0, method=method) == pytest.approx(1.0, abs=1e-12)
    assert half_fourier(lambda t: np.exp(-t), 1.0, method=method) == pytest.approx(0.5 + 0.5j, abs=1e-12)
    assert half_fourier(lambda t: np.exp(-t * t), 0.0, method=method) == pytest.approx(0.8862269, abs=5e-8)


def test_half_fourier_conjugate_symmetry():
    f = lambda t: np.exp(-0.7 * t) * np.cos(3 * t)
    for lam in (0.3, 2.0, 11.0):
        assert abs(half_fourier(f, -lam) - np.conj(half_fourier(f, lam))) < 1e-9


def test_half_fourier_vector_shapes_and_methods_agree():
    g = lambda t: np.stack([np.exp(-t * t), np.exp(-t) * np.cos(2 * t)], 1)
    a = half_fourier(g, [0.0, 3.0, -8.0])
    b = half_fourier(g, [0.0, 3.0, -8.0], method="gauss")
    assert a.shape == (2, 3)
    assert np.max(np.abs(a - b)) < 1e-11
    assert a[1, 1] == pytest.approx(((1 - 3j) / ((1 - 3j) ** 2 + 4)), abs=1e-12)


def test_half_fourier_ceiling():
    with pytest.raises(QuadratureError):
        half_fourier(lambda t: 1.0 / (1.0 + t), 0.0, QuadratureSettings(horizon_ceiling=64.0))


def test_principal_value_against_quad_cauchy():
    s = lambda w: np.exp(-(w - 0.3) ** 2) * (1 + 0.2 * w)
    for pole in (-1.2, 0.0, 0.7):
        ref = quad(lambda w: math.exp(-(w - 0.3) ** 2) * (1 + 0.2 * w), -6, 6, weight="cauchy", wvar=pole)[0]
        assert principal_value(s, pole, -6.0, 6.0) == pytest.approx(ref, abs=1e-10)


def test_spectral_transform_matches_time_domain():
    # C(tau) = int exp(-w^2) (1 + w/2) exp(i w tau) dw
    s = lambda w: np.exp(-w * w) * (1 + 0.5 * w)

    def c(t):
        g = math.sqrt(math.pi) * np.exp(-t * t / 4)
        return g * (1 + 0.5 * (0.5j * t))

    for lam in (0.0, 0.8, -2.5):
        spec = spectral_half_fourier(s, lam, 9.0)
        td = half_fourier(c, lam)
        assert abs(spec - td) < 1e-9
