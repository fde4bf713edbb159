import math

import pytest
from hypothesis import HealthCheck, settings

from vibsqueeze.core import REFERENCE_EMISSION_RATE, PhononParams, SystemParams, energy_to_angular_frequency, rabi_from_s
from vibsqueeze.spectral import QuadratureSettings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

GAMMA = REFERENCE_EMISSION_RATE


@pytest.fixture
def dot_phonons():
    return PhononParams(alpha=0.027, cutoff=2.2, temperature=4.0)


@pytest.fixture
def quad():
    return QuadratureSettings()


def system(s, detuning_mev=0.0, *, phase=0.0, dephasing=0.0, gamma=GAMMA):
    """SystemParams from the scaled drive and a detuning in meV."""
    return SystemParams(float(rabi_from_s(s, gamma)), energy_to_angular_frequency(detuning_mev), gamma, phase,
                        dephasing)


def log_grid(lo, hi, n):
    return [10 ** (math.log10(lo) + i * (math.log10(hi) - math.log10(lo)) / (n - 1)) for i in range(n)]


# acceptance summary -----------------------------------------------------------------

_CRITERIA = {}



@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _CRITERIA[n] = (title, rep.outcome, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, outcome, dur = _CRITERIA[n]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  {title}  ({dur:.1f} s)")
