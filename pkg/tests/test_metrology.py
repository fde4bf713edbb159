import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from vibsqueeze.metrology import (InterferometerInput, figure_of_merit, flux_matched_sv_merit, flux_matched_xi,
                                  rf_variance, squeezed_power, sv_mean_difference, sv_optimal, sv_variance)

XI3 = 0.5 * math.log(3)


def test_mean_difference_examples():
    assert sv_mean_difference(InterferometerInput.squeezed_vacuum(0.4, 1.0)) == pytest.approx(0.0, abs=1e-16)
    assert sv_mean_difference(InterferometerInput.squeezed_vacuum(0.0, 1.5, theta=0.0)) == -1.5
    assert sv_mean_difference(InterferometerInput.squeezed_vacuum(XI3, 1.0, theta=0.0)) == pytest.approx(-2 / 3)


def test_sv_variance_examples():
    assert sv_variance(InterferometerInput.squeezed_vacuum(0.0, 2.0)) == pytest.approx(2.0)
    inp = InterferometerInput.squeezed_vacuum(XI3, 1.0)
    assert sv_variance(inp) == pytest.approx(2 / 3, abs=1e-14)
    assert figure_of_merit(inp) == pytest.approx(0.5, abs=1e-14)


def test_reduction_identity():
    rng = np.random.default_rng(11)
    for xi in rng.uniform(0, 3, 100):
        pa = rng.uniform(0.1, 5)
        inp = InterferometerInput.squeezed_vacuum(xi, pa, phi_xi=-math.pi, phi_alpha=0.0)
        assert sv_variance(inp) == pytest.approx(squeezed_power(xi) + pa * math.exp(-2 * xi), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("pa,F", [(1.0, 0.5), (4.0, 1 / 3), (1e-8, 1 / (1 + 1e-4))])
def test_sv_optimum(pa, F):
    xi, f = sv_optimal(pa)
    assert f == pytest.approx(F, rel=1e-12)
    res = minimize_scalar(lambda x: figure_of_merit(InterferometerInput.squeezed_vacuum(x, pa)),
                          bounds=(0, 5), method="bounded", options={"xatol": 1e-12})
    assert res.fun == pytest.approx(f, abs=1e-8)
    if pa == 1.0:
        assert xi == pytest.approx(0.54931, abs=5e-6)


def test_sv_optimum_is_global():
    rng = np.random.default_rng(2)
    pa = 1.3
    best = sv_variance(InterferometerInput.squeezed_vacuum(sv_optimal(pa)[0], pa))
    for _ in range(100):
        inp = InterferometerInput("squeezed_vacuum", pa, phi_alpha=rng.uniform(0, 6.3), xi=sv_optimal(pa)[0],
                                  phi_xi=rng.uniform(0, 6.3), theta=math.pi / 2)
        assert sv_variance(inp) >= best - 1e-12


def test_rf_examples():
    assert rf_variance(InterferometerInput.resonance_fluorescence(0.3, 0.0, 1.0)) == pytest.approx(1.3)
    opt = InterferometerInput.resonance_fluorescence(0.25, 3 / 16, 1.0)
    assert rf_variance(opt) == pytest.approx(0.5)
    assert figure_of_merit(opt) == pytest.approx(0.4)
    at = InterferometerInput.resonance_fluorescence(1 / 8, 3 / 32, 1.0)
    assert rf_variance(at) == pytest.approx(0.75)
    assert figure_of_merit(at) == pytest.approx(2 / 3)


def test_rf_minimised_at_dipole_phase():
    phases = np.linspace(0, 2 * math.pi, 721)
    v = [rf_variance(InterferometerInput.resonance_fluorescence(0.2, 0.1, 1.0, B=0.95, dipole_phase=1.0,
                                                                phi_alpha=1.0 + d)) for d in phases]
    assert np.argmin(v) in (0, 720)


def test_coherent_and_flux_matching():
    for pa in (0.1, 1.0, 7.0):
        assert figure_of_merit(InterferometerInput.coherent(pa)) == 1.0
    for P in (0.0, 0.13, 0.5, 0.99):
        assert squeezed_power(flux_matched_xi(P)) == pytest.approx(P, abs=1e-12)
    assert flux_matched_sv_merit(1 / 3, 1.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        figure_of_merit(InterferometerInput.coherent(0.0))
    with pytest.raises(ValueError):
        InterferometerInput.resonance_fluorescence(0.5, 0.3, 1.0)
