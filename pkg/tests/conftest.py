import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from eqshbc.model import CapacitanceProfile, ContactInterface, Scenario

settings.register_profile(
    "default",
    deadline=None,
    max_examples=100,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

PF = 1e-12

#: Log-uniform capacitance between 10 fF and 1 nF.
caps = st.floats(min_value=math.log10(10e-15), max_value=math.log10(1e-9)).map(lambda e: 10.0**e)
freqs = st.floats(min_value=5.0, max_value=math.log10(30e6)).map(lambda e: 10.0**e)
resistances = st.floats(min_value=1.0, max_value=6.0).map(lambda e: 10.0**e)


@st.composite
def floating_profiles(draw):
    names = ("c_x_tx", "c_x_rx", "c_gm_tx", "c_gm_rx", "c_b", "c_bm", "c_mg", "c_gb_rx", "c_l")
    return CapacitanceProfile(**{n: draw(caps) for n in names})


@st.composite
def contacts(draw):
    return ContactInterface.from_resistance(draw(resistances), draw(caps))


def log_uniform(rng, lo, hi, size=None):
    return 10.0 ** rng.uniform(math.log10(lo), math.log10(hi), size)


def random_floating_profile(rng):
    names = ("c_x_tx", "c_x_rx", "c_gm_tx", "c_gm_rx", "c_b", "c_bm", "c_mg", "c_gb_rx", "c_l")
    return CapacitanceProfile(**{n: float(log_uniform(rng, 10e-15, 1e-9)) for n in names})


@pytest.fixture
def worked_profile():
    """Raw couplings whose effective values are 1 / 150 / 1 / 5 pF."""
    return CapacitanceProfile(
        c_x_tx=0.2 * PF,
        c_gm_tx=0.8 * PF,
        c_x_rx=0.2 * PF,
        c_gm_rx=0.8 * PF,
        c_b=150 * PF,
        c_gb_rx=3 * PF,
        c_l=2 * PF,
    )


@pytest.fixture
def worked_scenario(worked_profile):
    return Scenario("grounded-metal", "proximity", worked_profile)


@pytest.fixture
def open_scenario():
    profile = CapacitanceProfile(c_x_tx=0.2 * PF, c_x_rx=0.2 * PF, c_b=150 * PF, c_l=5 * PF)
    return Scenario("open-space", "proximity", profile)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda s: s.split("] ", 1)[1]):
            terminalreporter.write_line(line)
