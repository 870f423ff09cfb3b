"""Report schema, JSON/CSV writers and the summary table.

Every command produces one report::

    {"schema_version", "command", "config_echo", "results",
     "provenance": {"tool_version", "wall_time"}}

``results`` is a list of records with ``label``, ``inputs``, ``outputs``,
``tolerances`` and ``witnesses`` mappings.  The summary table printed by the
CLI is rendered from the report dictionary alone, so re-reading a saved
report reproduces it exactly.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = 1
FLOAT_FMT = ".17g"


@dataclass
class Record:
    label: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"label": self.label, "inputs": self.inputs, "outputs": self.outputs,
                "tolerances": self.tolerances, "witnesses": self.witnesses}


def jsonable(obj):
    """Recursively convert numpy scalars/arrays, tuples and dataclass-likes."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def make_report(command: str, config: dict, records, tool_version: str,
                wall_time: float | None = None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config_echo": jsonable(config),
        "results": [jsonable(r) for r in records],
        "provenance": {"tool_version": tool_version, "wall_time": wall_time},
    }


def write_json(path, report: dict) -> None:
    # Python's float repr round-trips exactly; non-finite values use the
    # Infinity / NaN literals that json.load accepts
    text = json.dumps(report, indent=2, sort_keys=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text + "\n")


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def fmt_csv(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), FLOAT_FMT)
    return str(v)


def write_csv(path, header, rows) -> None:
    """Comma-separated, header row, LF endings, 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt_csv(v) for v in row])


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(x) for x in r] for r in rows[1:]]


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    if not os.access(path, os.W_OK):
        raise PermissionError(f"output directory {path} is not writable")
    return path


# ---------------------------------------------------------------------------
# summary table


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, float):
        if math.isnan(v) or math.isinf(v):
            return str(v)
        short = repr(v)
        return short if len(short) <= 12 else format(v, ".10g")
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_fmt(v[k])}" for k in sorted(v)) + "}"
    return str(v)


def _rows(prefix, d):
    for key in sorted(d):
        yield f"{prefix}{key}", _fmt(d[key])


_SECTIONS = (("inputs", "in."), ("outputs", "out."), ("tolerances", "tol."),
             ("witnesses", "witness."))


def render_summary(report: dict) -> str:
    """Human-readable table of a report dictionary (deterministic)."""
    lines = [f"liyau {report['command']}  (schema {report['schema_version']}, "
             f"version {report['provenance']['tool_version']})"]
    for rec in report["results"]:
        lines.append("")
        lines.append(f"[{rec['label']}]")
        rows = []
        for section, prefix in _SECTIONS:
            rows.extend(_rows(prefix, rec.get(section, {})))
        width = max((len(k) for k, _ in rows), default=0)
        for k, v in rows:
            lines.append(f"  {k.ljust(width)}  {v}")
    return "\n".join(lines) + "\n"
