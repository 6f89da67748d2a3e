"""Scenario configuration: JSON schema, validation, unit conversion.

Config files carry every frequency and rate as nu = omega/2pi in Hz, the
convention used in all stated operating points; conversion to angular units
happens exactly once, here.  Validation is total: every problem in a file is
collected into one ConfigValidationError with field-level messages before
any solver work starts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from .exceptions import ConfigValidationError, InvalidArgumentError
from .hamiltonians import TWO_PI, DriveSpec, QubitCosineDrive, SystemParams

SCENARIO_NAMES = (
    "rabi",
    "freq_shift",
    "dce_rate",
    "dce_g2",
    "dce_spectrum",
    "snr_scan",
    "mpa_gain",
    "params_report",
)

# reference operating point; every scenario starts from this set and a
# config file only has to name the fields it changes
_BASE_PARAMS_HZ: dict[str, float] = {
    "omega_q": 3.0e9,
    "omega_m": 250.0e6,
    "omega_c0": 500.0e6,
    "g_x": 60.0e6,
    "g_z0": 40.0e6,
    "omega_d": 0.0,
    "Gamma": 0.05e6,
    "gamma": 0.1e6,
    "kappa": 0.2e6,
    "n_th": 0.0,
}

# DCE scenarios run with the longitudinal coupling modulated at 5 GHz, which
# shifts the physical resonator to omega_c0 = omega_c + omega_d
_DCE_PARAM_OVERRIDES = {"omega_c0": 5500.0e6, "omega_d": 5000.0e6}


def _num(v) -> str | None:
    ok = isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
    return None if ok else "expected a finite number"


def _pos(v) -> str | None:
    return _num(v) or (None if v > 0 else "expected a number > 0")


def _nonneg(v) -> str | None:
    return _num(v) or (None if v >= 0 else "expected a number >= 0")


def _pos_int(v) -> str | None:
    ok = isinstance(v, int) and not isinstance(v, bool) and v > 0
    return None if ok else "expected a positive integer"


def _boolean(v) -> str | None:
    return None if isinstance(v, bool) else "expected true or false"


def _num_list(v) -> str | None:
    if not isinstance(v, list) or not v:
        return "expected a non-empty list of numbers"
    if any(_num(x) for x in v):
        return "expected a non-empty list of numbers"
    return None


def _pos_list(v) -> str | None:
    msg = _num_list(v)
    if msg:
        return msg
    return None if all(x > 0 for x in v) else "expected all entries > 0"


def _choice(*options: str) -> Callable[[Any], str | None]:
    def check(v):
        return None if v in options else f"expected one of {sorted(options)}"

    return check


def _optional(check):
    def wrapped(v):
        return None if v is None else check(v)

    return wrapped


@dataclass(frozen=True)
class _ScenarioSchema:
    grids: dict[str, tuple[Any, Callable[[Any], str | None]]]
    truncations: dict[str, int]
    params_overrides: dict[str, float] = field(default_factory=dict)
    # None: the scenario takes no drive block; otherwise defaults for one
    drive_defaults: dict[str, Any] | None = None
    cross_checks: tuple[Callable[[dict], str | None], ...] = ()


def _span_pair(lo_key: str, hi_key: str) -> Callable[[dict], str | None]:
    def check(grids):
        if grids[lo_key] >= grids[hi_key]:
            return f"grids.{hi_key}: must exceed grids.{lo_key}"
        return None

    return check


def _full_dims_shape(grids) -> str | None:
    dims = grids["full_dims"]
    if len(dims) != 3 or any(_pos_int(d) for d in dims) or dims[0] != 2 or min(dims[1:]) < 3:
        return "grids.full_dims: expected [2, n_cavity >= 3, n_mech >= 3]"
    return None


_SCHEMAS: dict[str, _ScenarioSchema] = {
    "rabi": _ScenarioSchema(
        grids={"t_max": (44.0e-6, _pos), "n_times": (881, _pos_int)},
        truncations={"qubit": 2, "cavity": 4, "mech": 8},
    ),
    "freq_shift": _ScenarioSchema(
        grids={
            "xi_min": (-1.5, _num),
            "xi_max": (1.5, _num),
            "n_xi": (61, _pos_int),
        },
        truncations={"mech": 20},
        cross_checks=(_span_pair("xi_min", "xi_max"),),
    ),
    "mpa_gain": _ScenarioSchema(
        grids={
            "n_phi": (128, _pos_int),
            "input_amplitude": (0.05, _pos),
            "simulate": (True, _boolean),
        },
        truncations={"mech": 40},
        drive_defaults={"kind": "qubit_cosine", "Omega_d": 112.5e6, "phi": 0.0},
    ),
    "dce_rate": _ScenarioSchema(
        grids={
            "epsilon": ([0.01e6, 0.02e6, 0.03e6, 0.04e6, 0.05e6], _pos_list),
            "full_point": (True, _boolean),
            "full_epsilon": (0.05e6, _pos),
            "full_dims": ([2, 5, 10], _num_list),
            "full_t_max": (8.0e-6, _pos),
            "full_n_times": (401, _pos_int),
        },
        truncations={"cavity": 8, "mech": 12},
        params_overrides=_DCE_PARAM_OVERRIDES,
        cross_checks=(_full_dims_shape,),
    ),
    "dce_g2": _ScenarioSchema(
        grids={
            "epsilon": ([0.01e6, 0.03e6, 0.05e6], _pos_list),
            "tau_max_kappa": (8.0, _pos),
            "n_tau": (257, _pos_int),
        },
        truncations={"cavity": 8, "mech": 12},
        params_overrides=_DCE_PARAM_OVERRIDES,
    ),
    "dce_spectrum": _ScenarioSchema(
        grids={
            "sweep": ("detuning", _choice("detuning", "modulation")),
            "epsilon": (0.05e6, _pos),
            "detunings": ([0.0, 0.6e6, 1.2e6], _num_list),
            "span": (1.5e6, _pos),
            "n_omega": (601, _pos_int),
            "Omega_d": (100.0e6, _pos),
            "Omega_min": (493.0e6, _pos),
            "Omega_max": (497.0e6, _pos),
            "n_Omega": (41, _pos_int),
        },
        truncations={"cavity": 8, "mech": 12},
        params_overrides=_DCE_PARAM_OVERRIDES,
        cross_checks=(_span_pair("Omega_min", "Omega_max"),),
    ),
    "snr_scan": _ScenarioSchema(
        grids={
            "n_th_min": (1.0e-4, _pos),
            "n_th_max": (10.0, _pos),
            "n_points": (25, _pos_int),
            "refine": (True, _boolean),
        },
        truncations={"mech": 30},
        drive_defaults={"kind": "qubit_cosine", "Omega_d": 100.0e6},
        cross_checks=(_span_pair("n_th_min", "n_th_max"),),
    ),
    "params_report": _ScenarioSchema(
        grids={"xi": (0.0, _num), "delta_s": (None, _optional(_num))},
        truncations={"mech": 20},
        drive_defaults={"kind": "qubit_cosine", "Omega_d": 100.0e6},
    ),
}

_DRIVE_FIELDS = {
    "qubit_cosine": {
        "Omega_d": (None, _nonneg),
        "omega_mod": (None, _optional(_pos)),
        "phi": (0.0, _num),
    },
}

_TOP_KEYS = ("scenario", "params", "drive", "truncations", "grids", "output")


@dataclass(frozen=True)
class OutputSpec:
    """File stem and data format for scenario results."""

    path: str
    format: str = "csv"


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario description.

    ``params`` is already in angular units; ``resolved`` echoes the full
    configuration (defaults applied) in the file's Hz convention, and
    ``text`` preserves the input verbatim for the metadata round trip.
    """

    scenario: str
    params: SystemParams
    drive: DriveSpec | None
    truncations: Mapping[str, int]
    grids: Mapping[str, Any]
    output: OutputSpec
    resolved: dict
    text: str


def _merge_section(errors, data, section, defaults, validators, prefix):
    """Overlay user values on defaults, validating types and key names."""
    merged = dict(defaults)
    user = data.get(section)
    if user is None:
        return merged
    if not isinstance(user, dict):
        errors.append(f"{section}: expected a JSON object")
        return merged
    for key, value in user.items():
        if key not in merged:
            errors.append(f"{prefix}{key}: unknown key")
            continue
        msg = validators[key](value)
        if msg:
            errors.append(f"{prefix}{key}: {msg}, got {value!r}")
        else:
            merged[key] = value
    return merged


def _parse_params(errors, data, schema):
    defaults = dict(_BASE_PARAMS_HZ, **schema.params_overrides)
    validators = {k: _nonneg for k in defaults}
    merged = _merge_section(errors, data, "params", defaults, validators, "params.")
    try:
        return SystemParams.from_hz(**merged), merged
    except InvalidArgumentError as err:
        errors.append(f"params: {err}")
        return None, merged


def _parse_drive(errors, data, schema):
    block = data.get("drive")
    if schema.drive_defaults is None:
        if block is not None:
            errors.append("drive: this scenario does not accept a drive block")
        return None, None
    defaults = dict(schema.drive_defaults)
    kind = defaults.pop("kind")
    if isinstance(block, dict) and "kind" in block:
        if block["kind"] != kind:
            errors.append(f"drive.kind: expected {kind!r}, got {block['kind']!r}")
            return None, None
        block = {k: v for k, v in block.items() if k != "kind"}
        data = dict(data, drive=block)
    fields = _DRIVE_FIELDS[kind]
    full_defaults = {k: defaults.get(k, d) for k, (d, _) in fields.items()}
    validators = {k: check for k, (_, check) in fields.items()}
    merged = _merge_section(errors, data, "drive", full_defaults, validators, "drive.")
    if errors:
        return None, dict(merged, kind=kind)
    try:
        drive = QubitCosineDrive(
            Omega_d=TWO_PI * merged["Omega_d"],
            omega_mod=None if merged["omega_mod"] is None else TWO_PI * merged["omega_mod"],
            phi=merged["phi"],
        )
    except InvalidArgumentError as err:
        errors.append(f"drive: {err}")
        return None, dict(merged, kind=kind)
    return drive, dict(merged, kind=kind)


def _parse_truncations(errors, data, schema):
    def dim_check(v):
        if _pos_int(v) or v < 2:
            return "expected an integer >= 2"
        return None

    validators = {k: dim_check for k in schema.truncations}
    merged = _merge_section(
        errors, data, "truncations", schema.truncations, validators, "truncations."
    )
    if merged.get("qubit", 2) != 2:
        errors.append("truncations.qubit: the qubit is two-level; dim must be 2")
    return merged


def _parse_output(errors, data, scenario):
    defaults = {"path": scenario, "format": "csv"}

    def path_check(v):
        if not isinstance(v, str) or not v or "/" in v or "\\" in v:
            return "expected a non-empty file stem without path separators"
        return None

    validators = {"path": path_check, "format": _choice("csv")}
    merged = _merge_section(errors, data, "output", defaults, validators, "output.")
    return OutputSpec(**merged), merged


def parse_config(data: Any, text: str = "") -> ScenarioConfig:
    """Validate a parsed JSON document into a ScenarioConfig.

    Raises ConfigValidationError carrying every field-level problem found.
    """
    errors: list[str] = []
    if not isinstance(data, dict):
        raise ConfigValidationError(["top level: expected a JSON object"])
    for key in data:
        if key not in _TOP_KEYS:
            errors.append(f"{key}: unknown key")
    scenario = data.get("scenario")
    if scenario not in SCENARIO_NAMES:
        errors.append(f"scenario: expected one of {sorted(SCENARIO_NAMES)}, got {scenario!r}")
        raise ConfigValidationError(errors)
    schema = _SCHEMAS[scenario]

    params, params_hz = _parse_params(errors, data, schema)
    drive, drive_resolved = _parse_drive(errors, data, schema)
    truncations = _parse_truncations(errors, data, schema)
    grid_defaults = {k: d for k, (d, _) in schema.grids.items()}
    grid_validators = {k: check for k, (_, check) in schema.grids.items()}
    grids = _merge_section(errors, data, "grids", grid_defaults, grid_validators, "grids.")
    if not errors:
        for check in schema.cross_checks:
            msg = check(grids)
            if msg:
                errors.append(msg)
    output, output_resolved = _parse_output(errors, data, scenario)
    if errors:
        raise ConfigValidationError(errors)

    resolved = {
        "scenario": scenario,
        "params": params_hz,
        "truncations": truncations,
        "grids": grids,
        "output": output_resolved,
    }
    if drive_resolved is not None:
        resolved["drive"] = drive_resolved
    return ScenarioConfig(
        scenario=scenario,
        params=params,
        drive=drive,
        truncations=truncations,
        grids=grids,
        output=output,
        resolved=resolved,
        text=text,
    )


def load_config(path: str) -> ScenarioConfig:
    """Read, parse, and validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise ConfigValidationError([f"cannot read {path}: {err}"]) from err
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigValidationError([f"{path}: invalid JSON ({err})"]) from err
    return parse_config(data, text)
