import pytest

from eqshbc.exceptions import ScenarioFileError, ValidationError
from eqshbc.nodal import scenario_transfer
from eqshbc.presets import PRESET_ENV, list_presets, load_preset, preset_scenario


def _loss(scenario, f=5e6):
    return scenario_transfer(scenario, f).loss_db


def test_bundled_presets_listed():
    assert {"elevator", "car"} <= set(list_presets())


def test_elevator_has_nine_complete_positions():
    table = load_preset("elevator")
    assert list(table.positions) == list("ABCDEFGHI")
    for pos in table.positions:
        assert table.profile(pos).c_b > 0
    assert "non-calibrated" in table.provenance


def test_elevator_wall_positions_lose_more():
    table = load_preset("elevator")
    losses = {p: _loss(table.scenario(p)) for p in table.positions}
    assert losses["B"] > losses["A"]
    assert losses["H"] > losses["I"]


def test_car_relaxed_pose_loses_more():
    table = load_preset("car")
    assert _loss(table.scenario("R")) > _loss(table.scenario("T"))


def test_unknown_position():
    with pytest.raises(ValidationError, match="no position"):
        load_preset("car").profile("Z")


def test_preset_scenario_overrides():
    s = preset_scenario("car", "T", v_tx=2.0)
    assert s.v_tx == 2.0


def test_env_override(tmp_path, monkeypatch):
    (tmp_path / "lab.toml").write_text(
        'kind = "open-space"\ninteraction = "proximity"\n'
        "[defaults]\nc_x_tx_pf = 1\nc_x_rx_pf = 1\nc_b_pf = 100\nc_l_pf = 5\n"
        '[positions.X]\nnote = "bench"\n'
    )
    monkeypatch.setenv(PRESET_ENV, str(tmp_path))
    assert list_presets() == ["lab"]
    table = load_preset("lab")
    assert table.notes["X"] == "bench"
    with pytest.raises(ValidationError, match="not found"):
        load_preset("elevator")


def test_invalid_position_rejected(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text(
        'kind = "open-space"\ninteraction = "proximity"\n'
        "[defaults]\nc_x_tx_pf = 1\nc_b_pf = 100\nc_l_pf = 5\n"
        "[positions.X]\nc_bm_pf = 3\n"
    )
    with pytest.raises(ScenarioFileError, match="position X"):
        load_preset(path)
