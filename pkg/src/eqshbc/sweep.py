"""Parameter sweeps over a scenario and their CSV / text / figure output."""

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import __version__
from .exceptions import ValidationError
from .link import LinkReport, link_report
from .model import CAPACITANCE_NAMES, Interaction, parallel_plate_cbm
from .nodal import scenario_transfer
from .scenario_io import scenario_digest
from .transfer import closed_form_transfer

AXES = ("frequency", "distance", "contact-area", "named-capacitance")
AXIS_UNITS = {
    "frequency": "Hz",
    "distance": "m",
    "contact-area": "m2",
    "named-capacitance": "F",
}
MODELS = ("closed-form", "oracle", "both")
FORMATS = ("csv", "structured-text", "svg-plot")
DEFAULT_FREQUENCY = 5e6


@dataclass(frozen=True)
class SweepSpec:
    """One swept axis.

    ``targets`` names the capacitances driven by a ``distance`` sweep
    (through the parallel-plate estimate with ``plate_area``/``eps_r``) or
    set directly by a ``named-capacitance`` sweep.
    """

    axis: str
    start: float
    stop: float
    points: int
    spacing: str = "log"
    targets: tuple = ()
    plate_area: float = 0.1
    eps_r: float = 1.0

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValidationError(f"axis must be one of {AXES}, got {self.axis!r}")
        if self.spacing not in ("log", "linear"):
            raise ValidationError(f"spacing must be log or linear, got {self.spacing!r}")
        if not self.start < self.stop:
            raise ValidationError("sweep needs start < stop")
        if self.points < 2:
            raise ValidationError("sweep needs at least 2 points")
        if self.spacing == "log" and self.start <= 0:
            raise ValidationError("log spacing needs start > 0")
        targets = tuple(self.targets)
        if self.axis == "distance" and not targets:
            targets = ("c_bm",)
        if self.axis in ("distance", "named-capacitance"):
            if not targets:
                raise ValidationError(f"{self.axis} sweep needs at least one target")
            unknown = [t for t in targets if t not in CAPACITANCE_NAMES]
            if unknown:
                raise ValidationError(f"unknown capacitance target(s): {unknown}")
        elif targets:
            raise ValidationError(f"{self.axis} sweep takes no targets")
        object.__setattr__(self, "targets", targets)
        if self.axis in ("distance", "contact-area", "named-capacitance") and self.start <= 0:
            raise ValidationError(f"{self.axis} values must be > 0")

    def values(self):
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    value: complex
    mag_db: float
    phase_deg: float
    link: Optional[LinkReport] = None
    gap_rel: Optional[float] = None


@dataclass(frozen=True)
class SweepResult:
    axis: str
    rows: tuple
    scenario: object
    metadata: dict = field(default_factory=dict)


def _point_scenario(scenario, spec, x):
    if spec.axis == "frequency":
        return scenario
    if spec.axis == "contact-area":
        return replace(scenario, contact=scenario.contact.with_area(x))
    value = x if spec.axis == "named-capacitance" else parallel_plate_cbm(x, spec.plate_area, spec.eps_r)
    profile = replace(scenario.profile, **{name: value for name in spec.targets})
    return replace(scenario, profile=profile)


def _check_axis(scenario, spec):
    if spec.axis == "distance" and scenario.interaction is not Interaction.PROXIMITY:
        raise ValidationError("distance sweep needs a proximity scenario")
    if spec.axis == "contact-area" and scenario.interaction is not Interaction.TOUCH:
        raise ValidationError("contact-area sweep needs a touch scenario")


def evaluate(scenario, f, model="closed-form"):
    """Return ``(reported, closed, oracle)`` transfers at one frequency."""
    if model not in MODELS:
        raise ValidationError(f"model must be one of {MODELS}, got {model!r}")
    closed = closed_form_transfer(scenario, f) if model != "oracle" else None
    oracle = scenario_transfer(scenario, f) if model != "closed-form" else None
    return (closed or oracle), closed, oracle


def _row(scenario, spec, x, model, frequency, budget):
    x = float(x)
    f = x if spec.axis == "frequency" else frequency
    point = _point_scenario(scenario, spec, x)
    reported, closed, oracle = evaluate(point, f, model)
    gap = None
    if closed is not None and oracle is not None:
        gap = abs(closed.value - oracle.value) / abs(oracle.value)
    link = link_report(reported.magnitude, budget) if budget is not None else None
    value = complex(reported.value)
    gap = None if gap is None else float(gap)
    return SweepRow(x, value, float(reported.mag_db), float(reported.phase_deg), link, gap)


def run_sweep(scenario, spec, model="closed-form", frequency=DEFAULT_FREQUENCY, budget=None, workers=1):
    """Evaluate the scenario across ``spec``.

    Non-frequency axes are evaluated at ``frequency``. In ``both`` mode rows
    report the closed form and carry its relative gap to the oracle. With a
    ``budget`` every row also gets a link report. Row order follows the axis
    regardless of ``workers``.
    """
    _check_axis(scenario, spec)
    if model not in MODELS:
        raise ValidationError(f"model must be one of {MODELS}, got {model!r}")
    xs = spec.values()

    def job(x):
        return _row(scenario, spec, x, model, frequency, budget)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(job, xs))
    else:
        rows = tuple(job(x) for x in xs)

    if model == "oracle":
        variant = "oracle"
    else:
        first_f = xs[0] if spec.axis == "frequency" else frequency
        variant = closed_form_transfer(_point_scenario(scenario, spec, xs[0]), first_f).variant
        if model == "both":
            variant += "+oracle"
    metadata = {
        "axis": spec.axis,
        "axis_unit": AXIS_UNITS[spec.axis],
        "model": model,
        "model_variant": variant,
        "scenario_digest": scenario_digest(scenario),
        "tool_version": __version__,
    }
    if spec.axis != "frequency":
        metadata["frequency_hz"] = frequency
    if spec.targets:
        metadata["targets"] = list(spec.targets)
    return SweepResult(spec.axis, rows, scenario, metadata)


def run_point(scenario, f=DEFAULT_FREQUENCY, model="closed-form", budget=None):
    """Single-frequency evaluation packaged as a one-row result."""
    spec = SweepSpec("frequency", f, 2 * f, 2)
    row = _row(scenario, spec, float(f), model, f, budget)
    variant = "oracle" if model == "oracle" else closed_form_transfer(scenario, f).variant
    if model == "both":
        variant += "+oracle"
    metadata = {
        "axis": "frequency",
        "axis_unit": "Hz",
        "model": model,
        "model_variant": variant,
        "scenario_digest": scenario_digest(scenario),
        "tool_version": __version__,
    }
    return SweepResult("frequency", (row,), scenario, metadata)


def run_link(scenario, budget, f=DEFAULT_FREQUENCY, model="closed-form", snr_db=None):
    """Transfer at ``f`` composed into SNR, capacity, Eb/N0 and BER."""
    if model == "both":
        raise ValidationError("run_link takes closed-form or oracle")
    reported, _, _ = evaluate(scenario, f, model)
    return link_report(reported.magnitude, budget, snr_db=snr_db)


def _num(x):
    if x is None:
        return ""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".9g")


def csv_columns(result):
    cols = ["axis", "re", "im", "mag_db", "phase_deg"]
    if result.rows and result.rows[0].link is not None:
        cols += ["snr_db", "capacity_bps", "ber"]
    if result.rows and result.rows[0].gap_rel is not None:
        cols.append("gap_rel")
    return cols


def _row_values(row, cols):
    out = {
        "axis": row.axis_value,
        "re": row.value.real,
        "im": row.value.imag,
        "mag_db": row.mag_db,
        "phase_deg": row.phase_deg,
    }
    if row.link is not None:
        out.update(snr_db=row.link.snr_db, capacity_bps=row.link.capacity, ber=row.link.ber)
    if row.gap_rel is not None:
        out["gap_rel"] = row.gap_rel
    return [_num(out[c]) for c in cols]


def format_result(result, fmt):
    """CSV or structured-text (JSON) rendering as a string."""
    cols = csv_columns(result)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for row in result.rows:
            writer.writerow(_row_values(row, cols))
        return buf.getvalue()
    if fmt == "structured-text":
        doc = {
            "metadata": result.metadata,
            "columns": cols,
            "rows": [_row_values(row, cols) for row in result.rows],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    raise ValidationError(f"format {fmt!r} has no text rendering")


def emit(result, fmt, path):
    """Write ``result`` as csv, structured-text (JSON) or svg-plot."""
    if fmt not in FORMATS:
        raise ValidationError(f"format must be one of {FORMATS}, got {fmt!r}")
    if fmt == "svg-plot":
        from .plotting import save_sweep_plot

        save_sweep_plot(result, path)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_result(result, fmt))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
