"""Preset capacitance tables for enclosure scenarios (elevator, car).

Presets are TOML files with a ``[defaults]`` capacitance table and one
``[positions.<NAME>]`` table of overrides per position. The search path is
the bundled ``presets/`` directory unless ``HBC_PRESET_DIR`` is set
(``os.pathsep``-separated directories, searched in order).
"""

import os
from dataclasses import dataclass, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .exceptions import ScenarioFileError, ValidationError
from .model import CapacitanceProfile, Scenario
from .scenario_io import CAP_QUANTITIES, TOP_QUANTITIES, parse_quantities

PRESET_ENV = "HBC_PRESET_DIR"
BUNDLED_DIR = Path(__file__).parent / "presets"


@dataclass(frozen=True)
class PresetTable:
    name: str
    description: str
    provenance: str
    kind: str
    interaction: str
    v_tx: float
    defaults: dict
    positions: dict
    notes: dict

    def profile(self, position):
        try:
            overrides = self.positions[position]
        except KeyError:
            raise ValidationError(
                f"preset {self.name!r} has no position {position!r} "
                f"(known: {', '.join(self.positions)})"
            ) from None
        return CapacitanceProfile(**{**self.defaults, **overrides})

    def scenario(self, position):
        return Scenario(self.kind, self.interaction, self.profile(position), v_tx=self.v_tx)


def preset_dirs():
    env = os.environ.get(PRESET_ENV)
    if env:
        return [Path(p) for p in env.split(os.pathsep) if p]
    return [BUNDLED_DIR]


def list_presets():
    """Preset names found on the search path (first occurrence wins)."""
    names = []
    for d in preset_dirs():
        if d.is_dir():
            for f in sorted(d.glob("*.toml")):
                if f.stem not in names:
                    names.append(f.stem)
    return names


def find_preset(name):
    for d in preset_dirs():
        candidate = d / f"{name}.toml"
        if candidate.is_file():
            return candidate
    raise ValidationError(
        f"preset {name!r} not found in {', '.join(str(d) for d in preset_dirs())}"
    )


def load_preset(name_or_path):
    """Load a preset by name (search path) or by file path."""
    path = Path(name_or_path)
    if path.suffix != ".toml":
        path = find_preset(str(name_or_path))
    text = path.read_text(encoding="utf-8")
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioFileError(f"parse error: {exc}", path) from None

    allowed = {"name", "description", "provenance", "kind", "interaction", "defaults", "positions"}
    top = {k: v for k, v in data.items() if k not in allowed}
    top_values, _ = parse_quantities(top, TOP_QUANTITIES, text=text, path=path)
    for key in ("kind", "interaction"):
        if key not in data:
            raise ScenarioFileError(f"missing required key '{key}'", path)
    defaults, _ = parse_quantities(
        data.get("defaults", {}), CAP_QUANTITIES, table_name="defaults", text=text, path=path
    )
    positions, notes = {}, {}
    for pos, table in data.get("positions", {}).items():
        values, strings = parse_quantities(
            table, CAP_QUANTITIES, ("note",), table_name=f"positions.{pos}", text=text, path=path
        )
        positions[pos] = values
        notes[pos] = strings.get("note", "")
    if not positions:
        raise ScenarioFileError("preset defines no positions", path)
    table = PresetTable(
        name=data.get("name", path.stem),
        description=data.get("description", ""),
        provenance=data.get("provenance", ""),
        kind=data["kind"],
        interaction=data["interaction"],
        v_tx=top_values.get("v_tx", 1.0),
        defaults=defaults,
        positions=positions,
        notes=notes,
    )
    for pos in positions:
        try:
            table.scenario(pos)
        except ValidationError as exc:
            raise ScenarioFileError(f"position {pos}: {exc}", path) from None
    return table


def preset_scenario(name, position, **changes):
    """Scenario for one preset position, optionally with field overrides."""
    scenario = load_preset(name).scenario(position)
    return replace(scenario, **changes) if changes else scenario
