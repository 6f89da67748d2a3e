"""Result tables and file emission: CSV data, JSON metadata, optional SVG.

The CSV data section is a pure function of the configuration: cell values
are rendered with repr (shortest round-trip form), so re-running a scenario
reproduces the file byte for byte.  Everything run-dependent (wall time,
solver diagnostics) goes into the sidecar metadata file instead.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .exceptions import InvalidArgumentError


@dataclass(frozen=True)
class Column:
    """One named, unit-annotated output series."""

    name: str
    unit: str
    values: Sequence[Any]

    def __post_init__(self):
        if not self.name:
            raise InvalidArgumentError("column name must be non-empty")
        if not self.unit:
            raise InvalidArgumentError(f"column {self.name!r} is missing a unit annotation")


@dataclass
class ResultTable:
    """Scenario output: equal-length columns plus free-form metadata."""

    scenario: str
    columns: tuple[Column, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        if not self.columns:
            raise InvalidArgumentError("a result table needs at least one column")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise InvalidArgumentError(f"duplicate column names in {names}")
        lengths = {len(c.values) for c in self.columns}
        if len(lengths) != 1:
            raise InvalidArgumentError(f"column lengths differ: {sorted(lengths)}")

    @property
    def n_rows(self) -> int:
        return len(self.columns[0].values)

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise InvalidArgumentError(f"no column named {name!r}")


def _render(value) -> str:
    """Deterministic cell text: shortest round-trip form for floats."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    raise InvalidArgumentError(f"cannot render {type(value).__name__} in CSV")


def write_csv(table: ResultTable, path: str) -> None:
    """RFC-4180 CSV with a single `name [unit]` header row."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"{c.name} [{c.unit}]" for c in table.columns])
        for k in range(table.n_rows):
            writer.writerow([_render(c.values[k]) for c in table.columns])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def write_metadata(table: ResultTable, path: str, config_text: str) -> None:
    """Sidecar JSON: verbatim config text plus resolved settings and notes.

    ``config_text`` is stored unmodified, so reading it back and encoding as
    UTF-8 reproduces the input file exactly.
    """
    doc = {
        "scenario": table.scenario,
        "config_text": config_text,
        "columns": [{"name": c.name, "unit": c.unit} for c in table.columns],
    }
    doc.update(_jsonable(table.metadata))
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def write_svg(table: ResultTable, path: str) -> None:
    """Quick-look line plot; layout hints come from metadata['plot']."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = table.scenario
    hints = table.metadata.get("plot", {})
    fig, ax = plt.subplots(figsize=(6.0, 4.0))

    if hints.get("kind") == "text":
        ax.axis("off")
        lines = [
            "   ".join(_render(c.values[k]) for c in table.columns)
            for k in range(table.n_rows)
        ]
        header = "   ".join(f"{c.name} [{c.unit}]" for c in table.columns)
        ax.text(0.02, 0.98, "\n".join([header] + lines), family="monospace",
                fontsize=7, va="top", transform=ax.transAxes)
    elif hints.get("kind") == "grouped":
        xcol = table.column(hints["x"])
        ycol = table.column(hints["y"])
        gcol = table.column(hints["group"])
        groups = np.asarray(gcol.values)
        x = np.asarray(xcol.values, dtype=float)
        y = np.asarray(ycol.values, dtype=float)
        for g in dict.fromkeys(gcol.values):
            sel = groups == g
            ax.plot(x[sel], y[sel], label=f"{gcol.name} = {_render(g)}")
        ax.set_xlabel(f"{xcol.name} [{xcol.unit}]")
        ax.set_ylabel(f"{ycol.name} [{ycol.unit}]")
        ax.legend(fontsize=8)
        if hints.get("logy"):
            ax.set_yscale("log")
    else:
        xcol = table.columns[0]
        x = np.asarray(xcol.values, dtype=float)
        for c in table.columns[1:]:
            ax.plot(x, np.asarray(c.values, dtype=float), label=f"{c.name} [{c.unit}]")
        ax.set_xlabel(f"{xcol.name} [{xcol.unit}]")
        ax.legend(fontsize=8)
        if hints.get("logy"):
            ax.set_yscale("log")
        if hints.get("logx"):
            ax.set_xscale("log")
    ax.set_title(table.scenario)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
