from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqshbc.exceptions import ScenarioFileError, UnitSuffixError
from eqshbc.model import (
    CapacitanceProfile,
    ContactInterface,
    Scenario,
    TerminationModel,
    derive_effective,
)
from eqshbc.scenario_io import (
    dump_scenario,
    dumps_scenario,
    load_scenario,
    loads_scenario,
    scenario_digest,
)

from .conftest import PF, caps, contacts

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"

MINIMAL = """
kind = "open-space"
interaction = "proximity"

[capacitance]
c_x_tx_pf = 0.2
c_x_rx_pf = 0.2
c_b_pf = 150
c_l_pf = 5
"""


def test_minimal_open_space_defaults():
    s = loads_scenario(MINIMAL)
    assert s.profile.c_c == 0
    assert s.profile.c_b == pytest.approx(150 * PF)
    assert s.v_tx == 1.0
    assert s.termination == TerminationModel()


def test_worked_example_file_effective_values():
    e = derive_effective(load_scenario(SCENARIOS / "worked_example.toml").profile)
    assert (e.c_ret_tx, e.c_body, e.c_ret_rx, e.c_l_eff) == pytest.approx(
        (1 * PF, 150 * PF, 1 * PF, 5 * PF)
    )


@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.toml")), ids=lambda p: p.stem)
def test_shipped_scenarios_load(path):
    assert isinstance(load_scenario(path), Scenario)


def test_touch_without_contact_rejected():
    text = MINIMAL.replace("open-space", "grounded-metal").replace("proximity", "touch")
    with pytest.raises(ScenarioFileError, match="contact"):
        loads_scenario(text)


def test_missing_suffix_reports_line_and_key():
    text = MINIMAL.replace("c_b_pf = 150", "c_b = 150")
    with pytest.raises(UnitSuffixError) as err:
        loads_scenario(text, "s.toml")
    msg = str(err.value)
    assert "line 8" in msg and "capacitance.c_b" in msg and "s.toml" in msg


def test_wrong_dimension_suffix():
    text = MINIMAL.replace("c_b_pf", "c_b_ohm")
    with pytest.raises(UnitSuffixError, match="resistance unit"):
        loads_scenario(text)


def test_unknown_key_rejected():
    text = MINIMAL.replace("c_l_pf", "c_load_pf")
    with pytest.raises(ScenarioFileError, match="unknown key"):
        loads_scenario(text)


def test_unknown_top_level_table_rejected():
    with pytest.raises(ScenarioFileError):
        loads_scenario(MINIMAL + "\n[extras]\nx_pf = 1\n")


def test_duplicate_quantity_rejected():
    text = MINIMAL.replace("c_l_pf = 5", "c_l_pf = 5\nc_l_ff = 5000")
    with pytest.raises(ScenarioFileError, match="more than once"):
        loads_scenario(text)


def test_non_numeric_value_rejected():
    with pytest.raises(ScenarioFileError, match="number"):
        loads_scenario(MINIMAL.replace("c_l_pf = 5", 'c_l_pf = "5"'))


def test_toml_syntax_error():
    with pytest.raises(ScenarioFileError, match="parse error"):
        loads_scenario("kind = ")


def test_missing_file():
    with pytest.raises(ScenarioFileError, match="cannot read"):
        load_scenario("/nonexistent/scenario.toml")


def test_contact_by_resistance_and_units():
    text = """
kind = "grounded-metal"
interaction = "touch"
[capacitance]
c_x_tx_pf = 1
c_x_rx_pf = 1
c_b_pf = 150
c_l_pf = 5
[contact]
a_con_mm2 = 100
r_con_kohm = 2
c_bm_touch_nf = 0.01
"""
    c = loads_scenario(text).contact
    assert c.a_con == pytest.approx(1e-4)
    assert c.r_con == pytest.approx(2e3)
    assert c.rho_c == pytest.approx(0.2)
    assert c.c_bm_touch == pytest.approx(10 * PF)


def test_resistive_termination_block():
    text = MINIMAL + '\n[termination]\nkind = "resistive"\nr_l_ohm = 50\n'
    assert loads_scenario(text).termination == TerminationModel.resistive(50.0)


@st.composite
def scenarios(draw):
    kind = draw(st.sampled_from(["open-space", "grounded-metal", "floating-metal"]))
    names = ["c_x_tx", "c_x_rx", "c_b", "c_gb_rx", "c_l", "c_c"]
    if kind != "open-space":
        names += ["c_gm_tx", "c_gm_rx", "c_bm", "c_mg"]
    profile = CapacitanceProfile(**{n: draw(caps) for n in names})
    touch = kind != "open-space" and draw(st.booleans())
    termination = draw(st.sampled_from([TerminationModel(), TerminationModel.resistive(50.0)]))
    return Scenario(
        kind,
        "touch" if touch else "proximity",
        profile,
        contact=draw(contacts()) if touch else None,
        termination=termination,
        v_tx=draw(st.floats(0.01, 10)),
    )


@given(scenarios())
def test_round_trip_is_exact(s):
    assert loads_scenario(dumps_scenario(s)) == s


def test_round_trip_via_file_and_digest(tmp_path, worked_scenario):
    path = tmp_path / "s.toml"
    dump_scenario(worked_scenario, path)
    back = load_scenario(path)
    assert back == worked_scenario
    assert scenario_digest(back) == scenario_digest(worked_scenario)
    assert len(scenario_digest(back)) == 16


def test_digest_changes_with_content(worked_scenario, open_scenario):
    assert scenario_digest(worked_scenario) != scenario_digest(open_scenario)


def test_insulating_contact_round_trip(worked_profile):
    s = Scenario(
        "grounded-metal", "touch", worked_profile,
        contact=ContactInterface.from_resistance(float("inf"), 10 * PF),
    )
    assert loads_scenario(dumps_scenario(s)) == s
