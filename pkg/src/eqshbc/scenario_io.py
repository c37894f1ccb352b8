"""Scenario files: TOML with mandatory unit suffixes on every physical key.

Example::

    kind = "grounded-metal"
    interaction = "touch"
    v_tx_v = 1.0

    [capacitance]
    c_x_tx_pf = 0.2
    c_b_pf = 150

    [contact]
    a_con_cm2 = 1.0
    rho_c_ohm_m2 = 0.1
    c_bm_touch_pf = 10

    [termination]
    kind = "resistive"
    r_l_ohm = 50

Unknown keys are rejected. ``dumps_scenario`` writes the canonical form in
base SI units (``_f``, ``_ohm``, ``_m2``) so that loading it back reproduces
the scenario bit for bit.
"""

import hashlib
import math
import re

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .exceptions import ScenarioFileError, UnitSuffixError, ValidationError
from .model import (
    CAPACITANCE_NAMES,
    DEFAULT_RHO_C,
    CapacitanceProfile,
    ContactInterface,
    Scenario,
    TerminationModel,
)

UNITS = {
    "capacitance": {"f": 1.0, "uf": 1e-6, "nf": 1e-9, "pf": 1e-12, "ff": 1e-15},
    "resistance": {"ohm": 1.0, "kohm": 1e3},
    "area": {"m2": 1.0, "cm2": 1e-4, "mm2": 1e-6},
    "resistivity": {"ohm_m2": 1.0, "ohm_cm2": 1e-4},
    "voltage": {"v": 1.0, "mv": 1e-3},
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6},
    "frequency": {"hz": 1.0, "khz": 1e3, "mhz": 1e6},
}

CANONICAL_UNIT = {
    "capacitance": "f",
    "resistance": "ohm",
    "area": "m2",
    "resistivity": "ohm_m2",
    "voltage": "v",
    "length": "m",
    "frequency": "hz",
}

TOP_QUANTITIES = {"v_tx": "voltage"}
TOP_STRINGS = ("kind", "interaction", "description")
CAP_QUANTITIES = {name: "capacitance" for name in CAPACITANCE_NAMES}
CONTACT_QUANTITIES = {
    "a_con": "area",
    "rho_c": "resistivity",
    "r_con": "resistance",
    "c_bm_touch": "capacitance",
}
TERMINATION_QUANTITIES = {"r_l": "resistance"}


def _key_line(text, table, key):
    """1-based line of ``key`` inside ``[table]`` (top level when table is None)."""
    if text is None:
        return None
    lines = text.splitlines()
    start = 0
    if table is not None:
        header = re.compile(r"^\s*\[\s*" + re.escape(table) + r"\s*\]")
        for i, line in enumerate(lines):
            if header.match(line):
                start = i + 1
                break
    pattern = re.compile(r"^\s*" + re.escape(key) + r"\s*=")
    for i in range(start, len(lines)):
        if table is None and lines[i].lstrip().startswith("["):
            break
        if pattern.match(lines[i]):
            return i + 1
    return None


def _dimension_of(suffix):
    for dim, units in UNITS.items():
        if suffix in units:
            return dim
    return None


def parse_quantities(table, quantities, strings=(), *, table_name=None, text=None, path=None):
    """Split unit-suffixed keys of one TOML table into SI values.

    Returns ``(values, extra_strings)`` where ``values`` maps base names to
    floats in SI units.
    """
    values = {}
    found_strings = {}
    for key, raw in table.items():
        line = _key_line(text, table_name, key)
        shown = f"{table_name}.{key}" if table_name else key
        if key in strings:
            if not isinstance(raw, str):
                raise ScenarioFileError("expected a string", path, line, shown)
            found_strings[key] = raw
            continue
        if isinstance(raw, dict):
            raise ScenarioFileError("unexpected table", path, line, shown)
        if key in quantities:
            units = ", ".join(key + "_" + u for u in UNITS[quantities[key]])
            raise UnitSuffixError(f"missing unit suffix (use one of {units})", path, line, shown)
        bases = [b for b in quantities if key.startswith(b + "_")]
        if not bases:
            raise ScenarioFileError("unknown key", path, line, shown)
        base = max(bases, key=len)
        suffix = key[len(base) + 1 :]
        dim = quantities[base]
        if suffix not in UNITS[dim]:
            other = _dimension_of(suffix)
            detail = f"'{suffix}' is a {other} unit" if other else f"unknown unit '{suffix}'"
            raise UnitSuffixError(
                f"unit suffix mismatch: {detail}; {base} is a {dim} "
                f"(allowed: {', '.join(UNITS[dim])})",
                path,
                line,
                shown,
            )
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ScenarioFileError(f"expected a number, got {raw!r}", path, line, shown)
        if base in values:
            raise ScenarioFileError(f"{base} given more than once", path, line, shown)
        values[base] = float(raw) * UNITS[dim][suffix]
    return values, found_strings


def _build_contact(values, path):
    try:
        a_con = values["a_con"]
        c_bm = values["c_bm_touch"]
    except KeyError as exc:
        raise ScenarioFileError(
            f"contact block needs {exc.args[0]} (with a unit suffix)", path, key="contact"
        ) from None
    if "r_con" in values:
        r_con = values["r_con"]
        rho_c = values.get("rho_c", r_con * a_con)
        return ContactInterface(a_con, rho_c, r_con, c_bm)
    return ContactInterface.from_area(a_con, c_bm, values.get("rho_c", DEFAULT_RHO_C))


def scenario_from_dict(data, *, text=None, path=None):
    """Validate a parsed TOML document and build a :class:`Scenario`."""
    known_tables = {"capacitance", "contact", "termination"}
    top = {k: v for k, v in data.items() if k not in known_tables}
    top_values, top_strings = parse_quantities(
        top, TOP_QUANTITIES, TOP_STRINGS, text=text, path=path
    )
    for required in ("kind", "interaction"):
        if required not in top_strings:
            raise ScenarioFileError(f"missing required key '{required}'", path)
    if "capacitance" not in data:
        raise ScenarioFileError("missing [capacitance] table", path)
    caps, _ = parse_quantities(
        data["capacitance"], CAP_QUANTITIES, table_name="capacitance", text=text, path=path
    )
    cvals = tvals = None
    tstr = {}
    if "contact" in data:
        cvals, _ = parse_quantities(
            data["contact"], CONTACT_QUANTITIES, table_name="contact", text=text, path=path
        )
    if "termination" in data:
        tvals, tstr = parse_quantities(
            data["termination"],
            TERMINATION_QUANTITIES,
            ("kind",),
            table_name="termination",
            text=text,
            path=path,
        )
    try:
        contact = _build_contact(cvals, path) if cvals is not None else None
        termination = TerminationModel(
            tstr.get("kind", "capacitive"), (tvals or {}).get("r_l")
        )
        return Scenario(
            kind=top_strings["kind"],
            interaction=top_strings["interaction"],
            profile=CapacitanceProfile(**caps),
            contact=contact,
            termination=termination,
            v_tx=top_values.get("v_tx", 1.0),
        )
    except ScenarioFileError:
        raise
    except ValidationError as exc:
        raise ScenarioFileError(str(exc), path) from None


def loads_scenario(text, path=None):
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioFileError(f"parse error: {exc}", path) from None
    return scenario_from_dict(data, text=text, path=path)


def load_scenario(path):
    """Read and validate a scenario file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioFileError(f"cannot read file: {exc.strerror}", path) from None
    return loads_scenario(text, path)


def _fmt(x):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def dumps_scenario(scenario):
    """Canonical TOML text for a scenario (SI units, fixed key order)."""
    lines = [
        f'kind = "{scenario.kind.value}"',
        f'interaction = "{scenario.interaction.value}"',
        f"v_tx_v = {_fmt(scenario.v_tx)}",
        "",
        "[capacitance]",
    ]
    for name, value in scenario.profile.as_dict().items():
        lines.append(f"{name}_f = {_fmt(value)}")
    if scenario.contact is not None:
        c = scenario.contact
        lines += [
            "",
            "[contact]",
            f"a_con_m2 = {_fmt(c.a_con)}",
            f"rho_c_ohm_m2 = {_fmt(c.rho_c)}",
            f"r_con_ohm = {_fmt(c.r_con)}",
            f"c_bm_touch_f = {_fmt(c.c_bm_touch)}",
        ]
    lines += ["", "[termination]", f'kind = "{scenario.termination.kind.value}"']
    if scenario.termination.r_l is not None:
        lines.append(f"r_l_ohm = {_fmt(scenario.termination.r_l)}")
    return "\n".join(lines) + "\n"


def dump_scenario(scenario, path):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps_scenario(scenario))
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror}") from exc


def scenario_digest(scenario):
    """Short stable hash of the canonical serialization."""
    return hashlib.sha256(dumps_scenario(scenario).encode()).hexdigest()[:16]
