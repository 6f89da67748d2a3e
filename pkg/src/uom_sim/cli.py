"""Command-line entry point: validate configs, run scenarios, emit files.

Exit codes: 0 success, 2 configuration problems (reported field by field),
1 anything that fails after validation (solver errors, I/O).  Errors go to
stderr as one JSON document so callers can parse failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import SCENARIO_NAMES, load_config
from .exceptions import ConfigValidationError, UomSimError
from .output import _render, write_csv, write_metadata, write_svg
from .scenarios import RunOptions, run_scenario

_EXIT_OK = 0
_EXIT_ERROR = 1
_EXIT_CONFIG = 2


def _error_report(kind: str, **fields) -> None:
    print(json.dumps({"error": kind, **fields}, indent=2), file=sys.stderr)


def _default_jobs() -> int:
    env = os.environ.get("UOM_SIM_JOBS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uom-sim",
        description=(
            "Simulation scenarios for a qubit-mediated field-modulated phonon "
            "resonator: model-reduction checks, parametric gain, phonon pair "
            "statistics and spectra. Scenarios: " + ", ".join(SCENARIO_NAMES) + "."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scenario and write result files")
    run.add_argument("config", help="JSON scenario configuration")
    run.add_argument("--out", default=".", metavar="DIR", help="output directory")
    run.add_argument(
        "--jobs", type=int, default=None, metavar="N",
        help="sweep-point parallelism (default: UOM_SIM_JOBS or 1)",
    )
    run.add_argument("--svg", action="store_true", help="also write a quick-look SVG plot")
    run.add_argument("--rtol", type=float, default=1e-6, metavar="R",
                     help="integrator relative tolerance")
    run.add_argument("--atol", type=float, default=1e-9, metavar="A",
                     help="integrator absolute tolerance")

    val = sub.add_parser("validate", help="check a config file without running it")
    val.add_argument("config", help="JSON scenario configuration")

    par = sub.add_parser("params", help="print the derived-parameter table for a config")
    par.add_argument("config", help="JSON scenario configuration")

    return parser


def _cmd_validate(path: str) -> int:
    config = load_config(path)
    print(f"ok: {config.scenario} ({path})")
    return _EXIT_OK


def _cmd_params(path: str) -> int:
    config = load_config(path)
    # reuse the report scenario on this config's parameter set
    from .config import parse_config

    report_cfg = parse_config(
        {"scenario": "params_report", "params": config.resolved["params"]}, config.text
    )
    table = run_scenario(report_cfg)
    names = table.column("quantity").values
    values = table.column("value").values
    units = table.column("unit").values
    width = max(len(n) for n in names)
    for name, value, unit in zip(names, values, units):
        print(f"{name:<{width}}  {_render(value)} {unit}")
    return _EXIT_OK


def _cmd_run(args) -> int:
    config = load_config(args.config)
    jobs = args.jobs if args.jobs is not None else _default_jobs()
    if jobs < 1:
        _error_report("config", messages=["--jobs: must be >= 1"])
        return _EXIT_CONFIG
    options = RunOptions(jobs=jobs, rtol=args.rtol, atol=args.atol)
    table = run_scenario(config, options)

    os.makedirs(args.out, exist_ok=True)
    stem = os.path.join(args.out, config.output.path)
    csv_path = stem + ".csv"
    meta_path = stem + ".meta.json"
    write_csv(table, csv_path)
    write_metadata(table, meta_path, config.text)
    written = [csv_path, meta_path]
    if args.svg:
        svg_path = stem + ".svg"
        write_svg(table, svg_path)
        written.append(svg_path)
    for path in written:
        print(path)
    return _EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return _cmd_validate(args.config)
        if args.command == "params":
            return _cmd_params(args.config)
        return _cmd_run(args)
    except ConfigValidationError as err:
        _error_report("config", messages=err.messages)
        return _EXIT_CONFIG
    except UomSimError as err:
        _error_report(
            type(err).__name__,
            scenario=getattr(args, "config", None) and _scenario_name(args.config),
            message=str(err),
        )
        return _EXIT_ERROR


def _scenario_name(path: str) -> str | None:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh).get("scenario")
    except Exception:
        return None


if __name__ == "__main__":
    sys.exit(main())
