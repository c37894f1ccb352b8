"""Command-line front end: ``eqshbc run|sweep|link|presets``.

Exit codes: 0 success, 2 invalid input (bad file, bad flags, degenerate
network), 1 runtime failure (I/O, singular configuration).
"""

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path

from . import __version__
from .exceptions import DegenerateNetworkError, ValidationError
from .link import DEFAULT_BANDWIDTH, DEFAULT_N0, LinkBudget
from .model import CAPACITANCE_NAMES
from .presets import list_presets, load_preset
from .scenario_io import load_scenario
from .sweep import (
    AXES,
    DEFAULT_FREQUENCY,
    FORMATS,
    MODELS,
    SweepSpec,
    emit,
    format_result,
    run_link,
    run_point,
    run_sweep,
)

log = logging.getLogger("eqshbc")

AUTO = "auto"


def _add_scenario_args(p):
    p.add_argument("scenario", nargs="?", help="scenario TOML file")
    p.add_argument("--preset", help="preset name instead of a scenario file")
    p.add_argument("--position", help="preset position (e.g. B, or T/R for car)")
    p.add_argument("-f", "--frequency", type=float, default=DEFAULT_FREQUENCY, help="Hz (default 5e6)")


def _add_model_arg(p, choices=MODELS):
    p.add_argument("--model", choices=choices, default="closed-form")


def _add_budget_args(p):
    p.add_argument("--v-tx", type=float, help="source amplitude in V (default: scenario v_tx)")
    p.add_argument("--n0", type=float, default=DEFAULT_N0, help="noise density V^2/Hz")
    p.add_argument("--bandwidth", type=float, default=DEFAULT_BANDWIDTH, help="Hz")
    p.add_argument("--bit-rate", type=float, help="bit/s (default: bandwidth)")
    p.add_argument("--modulation", default="OOK", help="OOK, QPSK or M-QAM such as 16-QAM")


def build_parser():
    parser = argparse.ArgumentParser(prog="eqshbc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evaluate one frequency point")
    _add_scenario_args(p)
    _add_model_arg(p)
    p.add_argument("--link", action="store_true", help="append SNR, capacity and BER columns")
    _add_budget_args(p)
    p.add_argument("--format", choices=FORMATS[:2], default="csv")
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("sweep", help="sweep one axis")
    _add_scenario_args(p)
    _add_model_arg(p)
    p.add_argument("--axis", choices=AXES, default="frequency")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--spacing", choices=("log", "linear"), default="log")
    p.add_argument(
        "--target",
        action="append",
        choices=CAPACITANCE_NAMES,
        help="capacitance driven by a distance/named-capacitance sweep (repeatable)",
    )
    p.add_argument("--plate-area", type=float, default=0.1, help="m^2, distance sweeps")
    p.add_argument("--eps-r", type=float, default=1.0, help="distance sweeps")
    p.add_argument("--link", action="store_true", help="append SNR, capacity and BER columns")
    _add_budget_args(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--out", help="output file (default: stdout; required for svg-plot)")
    p.add_argument(
        "--plot",
        nargs="?",
        const=AUTO,
        help="also render a figure (default path: --out with .svg suffix)",
    )

    p = sub.add_parser("link", help="link budget at one frequency")
    _add_scenario_args(p)
    _add_model_arg(p, ("closed-form", "oracle"))
    _add_budget_args(p)
    p.add_argument("--snr-db", type=float, help="use a stated SNR instead of the computed one")

    p = sub.add_parser("presets", help="list or show preset tables")
    psub = p.add_subparsers(dest="presets_command", required=True)
    psub.add_parser("list")
    show = psub.add_parser("show")
    show.add_argument("name")
    return parser


def _scenario(args):
    if args.preset:
        if args.scenario:
            raise ValidationError("give either a scenario file or --preset, not both")
        if not args.position:
            raise ValidationError("--preset needs --position")
        return load_preset(args.preset).scenario(args.position)
    if args.position:
        raise ValidationError("--position is only valid with --preset")
    if not args.scenario:
        raise ValidationError("a scenario file or --preset is required")
    return load_scenario(args.scenario)


def _budget(args, scenario):
    v_tx = args.v_tx if args.v_tx is not None else (scenario.v_tx or 1.0)
    return LinkBudget(
        v_tx=v_tx,
        n0=args.n0,
        bandwidth=args.bandwidth,
        bit_rate=args.bit_rate if args.bit_rate is not None else args.bandwidth,
        modulation=args.modulation,
    )


def _write(result, fmt, out):
    if out:
        emit(result, fmt, out)
        log.info("wrote %s", out)
    else:
        sys.stdout.write(format_result(result, fmt))


def cmd_run(args):
    scenario = _scenario(args)
    budget = _budget(args, scenario) if args.link else None
    result = run_point(scenario, args.frequency, args.model, budget)
    _write(result, args.format, args.out)


def cmd_sweep(args):
    scenario = _scenario(args)
    spec = SweepSpec(
        axis=args.axis,
        start=args.start,
        stop=args.stop,
        points=args.points,
        spacing=args.spacing,
        targets=tuple(args.target or ()),
        plate_area=args.plate_area,
        eps_r=args.eps_r,
    )
    if args.format == "svg-plot" and not args.out:
        raise ValidationError("svg-plot needs --out")
    budget = _budget(args, scenario) if args.link else None
    result = run_sweep(scenario, spec, args.model, args.frequency, budget, args.workers)
    _write(result, args.format, args.out)
    if args.plot:
        if args.plot == AUTO:
            if not args.out:
                raise ValidationError("--plot without a path needs --out")
            plot_path = Path(args.out).with_suffix(".svg")
        else:
            plot_path = Path(args.plot)
        emit(result, "svg-plot", plot_path)
        log.info("wrote %s", plot_path)


def cmd_link(args):
    scenario = _scenario(args)
    budget = _budget(args, scenario)
    report = run_link(scenario, budget, args.frequency, args.model, snr_db=args.snr_db)
    for f in fields(report):
        value = getattr(report, f.name)
        text = value if isinstance(value, str) else format(value, ".9g")
        print(f"{f.name} = {text}")


def cmd_presets(args):
    if args.presets_command == "list":
        for name in list_presets():
            print(name)
        return
    table = load_preset(args.name)
    print(f"name: {table.name}")
    print(f"kind: {table.kind}  interaction: {table.interaction}")
    if table.description:
        print(f"description: {table.description}")
    if table.provenance:
        print(f"provenance: {table.provenance}")
    print("defaults (pF): " + ", ".join(f"{k}={v * 1e12:g}" for k, v in table.defaults.items()))
    for pos, overrides in table.positions.items():
        deltas = ", ".join(f"{k}={v * 1e12:g}" for k, v in overrides.items())
        note = f"  # {table.notes[pos]}" if table.notes.get(pos) else ""
        print(f"  {pos}: {deltas}{note}")


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "link": cmd_link, "presets": cmd_presets}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        COMMANDS[args.command](args)
    except (ValidationError, DegenerateNetworkError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure: report, do not dump a traceback
        log.debug("runtime failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
