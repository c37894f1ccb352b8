import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqshbc.exceptions import ValidationError
from eqshbc.model import (
    EPS0,
    CapacitanceProfile,
    ContactInterface,
    ContactRegime,
    Scenario,
    TerminationKind,
    TerminationModel,
    classify_interaction,
    contact_impedance,
    contact_resistance,
    critical_distance,
    derive_effective,
    parallel_plate_cbm,
)

from .conftest import PF, caps


def test_derive_effective_worked_example(worked_profile):
    e = derive_effective(worked_profile)
    assert e.c_ret_tx == pytest.approx(1 * PF)
    assert e.c_ret_rx == pytest.approx(1 * PF)
    assert e.c_body == pytest.approx(150 * PF)
    assert e.c_l_eff == pytest.approx(5 * PF)


def test_derive_effective_sums():
    p = CapacitanceProfile(
        c_x_tx=1, c_x_rx=2, c_gm_tx=3, c_gm_rx=4, c_b=5, c_bm=6, c_mg=7, c_gb_rx=8, c_l=9
    )
    e = derive_effective(p)
    assert (e.c_ret_tx, e.c_ret_rx, e.c_body, e.c_l_eff, e.c_a) == (4, 6, 11, 17, 20)


def test_derive_effective_rejects_bodyless_profile():
    with pytest.raises(ValidationError, match="degenerate"):
        derive_effective(CapacitanceProfile(c_x_tx=1.0))


@given(st.dictionaries(st.sampled_from(["c_x_tx", "c_gm_tx", "c_bm", "c_gb_rx"]), caps))
def test_effective_monotone_in_raw_couplings(extra):
    base = CapacitanceProfile(c_x_tx=PF, c_x_rx=PF, c_b=100 * PF, c_l=5 * PF)
    bumped = CapacitanceProfile(**{**base.as_dict(), **{k: base.as_dict()[k] + v for k, v in extra.items()}})
    a, b = derive_effective(base), derive_effective(bumped)
    assert b.c_ret_tx >= a.c_ret_tx
    assert b.c_body >= a.c_body
    assert b.c_l_eff >= a.c_l_eff


@pytest.mark.parametrize("bad", [-1e-12, math.nan, "1pF", True])
def test_profile_rejects_invalid_values(bad):
    with pytest.raises(ValidationError):
        CapacitanceProfile(c_b=bad)


def test_parallel_plate_cbm_values():
    assert parallel_plate_cbm(1e-3, 1e-3) == pytest.approx(8.85 * PF)
    assert parallel_plate_cbm(0.278e-3, 1e-3) == pytest.approx(31.83 * PF, rel=1e-3)
    assert parallel_plate_cbm(1e-3, 1e-3, eps_r=4) == pytest.approx(4 * 8.85 * PF)


def test_parallel_plate_rejects_zero_distance():
    with pytest.raises(ValidationError, match="touch"):
        parallel_plate_cbm(0, 1e-3)


@given(st.floats(1e-5, 1.0), st.floats(1e-5, 1.0))
def test_parallel_plate_decreasing_in_distance(d1, d2):
    lo, hi = sorted((d1, d2))
    assert parallel_plate_cbm(lo, 0.01) >= parallel_plate_cbm(hi, 0.01)


def test_contact_resistance_default_and_inverse_area():
    assert contact_resistance(1e-4) == pytest.approx(1e3)
    assert contact_resistance(1e-3) == pytest.approx(contact_resistance(1e-4) / 10)


def test_contact_interface_consistency_enforced():
    with pytest.raises(ValidationError, match="inconsistent"):
        ContactInterface(a_con=1e-4, rho_c=0.1, r_con=500.0, c_bm_touch=PF)
    c = ContactInterface.from_area(1e-4, 10 * PF)
    assert c.r_con == pytest.approx(1e3)


def test_contact_with_area_scales_r_and_c():
    c = ContactInterface.from_area(1e-4, 10 * PF)
    big = c.with_area(1e-3)
    assert big.r_con == pytest.approx(c.r_con / 10)
    assert big.c_bm_touch == pytest.approx(c.c_bm_touch * 10)


def test_contact_impedance_limits():
    c = ContactInterface.from_area(1e-4, 10 * PF)
    assert contact_impedance(c, 0) == pytest.approx(c.r_con)
    assert abs(contact_impedance(c, 1e12)) < 1.0
    insulating = ContactInterface.from_resistance(math.inf, 10 * PF)
    z = contact_impedance(insulating, 1e6)
    assert z == pytest.approx(1 / (2j * math.pi * 1e6 * 10 * PF))


def test_critical_distance_worked_example():
    d_c = critical_distance(5e6, 10e-4, 1.0, 1e3)
    assert d_c == pytest.approx(0.278e-3, rel=5e-3)
    assert d_c == pytest.approx(2 * math.pi * 5e6 * EPS0 * 10e-4 * 1e3)


def test_critical_distance_is_impedance_crossover():
    f, area, r_con = 5e6, 10e-4, 1e3
    d_c = critical_distance(f, area, 1.0, r_con)
    z_c = 1 / (2 * math.pi * f * parallel_plate_cbm(d_c, area))
    assert z_c == pytest.approx(r_con)


def test_classify_interaction_boundaries():
    args = (5e6, 10e-4, 1.0, 1e3)
    d_c = critical_distance(*args)
    assert classify_interaction(0.0, *args) is ContactRegime.TOUCH
    assert classify_interaction(d_c, *args) is ContactRegime.TOUCH
    assert classify_interaction(d_c * 1.01, *args) is ContactRegime.NEAR_TOUCH
    with pytest.raises(ValidationError):
        classify_interaction(-1e-3, *args)


def test_termination_model():
    assert TerminationModel().kind is TerminationKind.CAPACITIVE
    assert TerminationModel.resistive().r_l == 50.0
    with pytest.raises(ValidationError):
        TerminationModel("resistive")
    with pytest.raises(ValidationError):
        TerminationModel("capacitive", 50.0)
    with pytest.raises(ValidationError):
        TerminationModel("inductive")


def test_scenario_invariants(worked_profile):
    contact = ContactInterface.from_area(1e-4, 10 * PF)
    with pytest.raises(ValidationError, match="contact"):
        Scenario("grounded-metal", "touch", worked_profile)
    with pytest.raises(ValidationError, match="only valid for touch"):
        Scenario("grounded-metal", "proximity", worked_profile, contact=contact)
    with pytest.raises(ValidationError, match="open-space"):
        Scenario("open-space", "proximity", worked_profile)
    with pytest.raises(ValidationError, match="c_b"):
        Scenario("grounded-metal", "proximity", CapacitanceProfile(c_x_tx=PF, c_l=PF))
    with pytest.raises(ValidationError):
        Scenario("underwater", "proximity", worked_profile)
    s = Scenario("grounded-metal", "touch", worked_profile, contact=contact)
    assert s.kind.value == "grounded-metal"
