import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.linalg import expm

from vibsqueeze.atomic import atomic_steady, thermal_bloch
from vibsqueeze.core import NUMBER, SIGMA, BlochVector, DensityOperator2, density_from_bloch
from vibsqueeze.observables import G2_ZERO, observables, position_density, thermal_prediction, wigner, wigner_at


def _atomic_state(S):
    ap = atomic_steady(S)
    c = -math.sqrt(ap.P_coh) * 1j
    return DensityOperator2.from_matrix(np.array([[1 - ap.P, np.conj(c)], [c, ap.P]]))


def test_examples():
    assert observables(_atomic_state(1 / 3)).min_variance == pytest.approx(-0.125, abs=1e-12)
    assert observables(density_from_bloch(BlochVector(1, math.pi / 3, 0))).min_variance == pytest.approx(-0.25)
    g = observables(np.diag([1.0, 0.0]))
    assert (g.P, g.P_coh, g.min_variance) == (0.0, 0.0, 0.0)
    assert g.heisenberg_lhs == g.heisenberg_rhs == 1.0
    assert g.g2_zero == G2_ZERO == 0.0


def test_sideband_factor_only_scales_coherent_power():
    rho = _atomic_state(1 / 3)
    a, b = observables(rho), observables(rho, B=0.9)
    assert b.P == a.P
    assert b.P_coh == pytest.approx(0.81 * a.P_coh)
    assert b.P_inc == pytest.approx(b.P - b.P_coh)
    assert b.min_variance == pytest.approx(1 - abs(2 * b.P - 1) - 4 * 0.81 * abs(rho.coherence) ** 2)


def test_dipole_phase_convention():
    c = 0.2 * np.exp(-1j * 0.7)
    o = observables(np.array([[0.5, np.conj(c)], [c, 0.5]]))
    assert o.dipole_phase == pytest.approx(0.7)


states = st.tuples(st.floats(0, 1), st.floats(0, math.pi), st.floats(0, 2 * math.pi, exclude_max=True),
                   st.floats(0.05, 1.0))


@given(states)
def test_observable_invariants(p):
    l, th, ph, B = p
    o = observables(density_from_bloch(BlochVector(l, th, ph)), B)
    assert 0 <= o.P <= 1
    assert o.P_coh <= o.P * (1 - o.P) + 1e-10
    assert o.heisenberg_lhs >= o.heisenberg_rhs - 1e-10
    assert o.min_variance >= -0.25 - 1e-10


def test_thermal_prediction_examples():
    om = 1.0
    assert thermal_prediction(om, om / math.sqrt(3), math.inf).min_variance == pytest.approx(-0.25, abs=1e-12)
    assert thermal_prediction(om, om / math.sqrt(3), 0.0).min_variance == pytest.approx(1.0, abs=1e-12)
    assert thermal_prediction(om, 0.0, math.inf).min_variance == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        thermal_prediction(0.0, 0.0, 1.0)


@given(st.floats(0.01, 5), st.floats(-5, 5), st.floats(0.01, 30), st.floats(0.5, 1.0), st.booleans())
def test_thermal_prediction_two_paths(om, delta, hb, B, sideband):
    pred = thermal_prediction(om, delta, hb, B, sideband=sideband)
    obs = observables(density_from_bloch(thermal_bloch(om, delta, hb)), B if sideband else 1.0)
    assert obs.min_variance == pytest.approx(pred.min_variance, abs=1e-12)
    assert obs.P == pytest.approx(pred.P, abs=1e-12)


@pytest.mark.parametrize("om,delta,hb", [(0.8, 0.5, 2.0), (1.3, -0.7, 0.6), (0.5 + 0.5j, 0.2, 5.0)])
def test_gibbs_branch_is_the_thermal_state(om, delta, hb):
    H = delta * NUMBER + 0.5 * (om * SIGMA + np.conj(om) * SIGMA.conj().T)
    rho = expm(-hb * H)
    rho /= np.trace(rho)
    b = thermal_bloch(om, delta, hb)
    assert np.allclose(density_from_bloch(b).matrix(), rho, atol=1e-12)


def test_wigner_examples():
    assert wigner_at(np.diag([1.0, 0.0]), 0, 0) == pytest.approx(1 / math.pi)
    assert wigner_at(np.diag([0.0, 1.0]), 0, 0) == pytest.approx(-1 / math.pi)
    assert wigner_at(np.eye(2) / 2, 0, 0) == pytest.approx(0.0, abs=1e-16)
    g = wigner(np.eye(2) / 2)
    assert g["W"].shape == (201, 201) and g["x"][0] == -4 and g["p"][-1] == 4


def _psi(n, x):
    h0 = math.pi**-0.25 * math.exp(-0.5 * x * x)
    return h0 if n == 0 else math.sqrt(2) * x * h0


def test_wigner_closed_form_against_definition():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = a @ a.conj().T
    rho /= np.trace(rho)

    def kernel(x, y):
        return sum(rho[n, m] * _psi(n, x + y) * _psi(m, x - y) for n in range(2) for m in range(2))

    for x, p in [(0.0, 0.0), (0.4, -0.9), (-1.3, 0.2), (2.0, 1.5)]:
        re = quad(lambda y: (kernel(x, y) * np.exp(-2j * p * y)).real, -12, 12, epsabs=1e-13)[0]
        im = quad(lambda y: (kernel(x, y) * np.exp(-2j * p * y)).imag, -12, 12, epsabs=1e-13)[0]
        assert abs(im) < 1e-10
        assert wigner_at(rho, x, p) == pytest.approx(re / math.pi, abs=1e-10)


def test_wigner_normalisation_and_marginal():
    rng = np.random.default_rng(5)
    lim, n = 7.0, 401
    for _ in range(100):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        g = wigner(rho, (-lim, lim), (-lim, lim), (n, n))
        W, x, p = g["W"], g["x"], g["p"]
        assert abs(np.trapezoid(np.trapezoid(W, p, axis=1), x) - 1) < 1e-6
        assert np.max(np.abs(np.trapezoid(W, p, axis=1) - position_density(rho, x))) < 1e-6
