"""Parsers for the qwalk file schemas, with positional diagnostics.

Formats are detected from content (NDJSON lines start with ``{``), schemas
are validated strictly: a deviating CSV header or a missing NDJSON key is a
:class:`SchemaError` carrying file, line and column.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

WALK_FIELDS = ("t", "ipr", "sp", "norm")
PROFILE_FIELDS = ("t", "n", "p")
SWEEP_FIELDS = ("theta", "chi", "ipr_bar", "ipr_norm", "sp_bar", "regime")

__all__ = [
    "SchemaError",
    "read_profile",
    "read_sidecar",
    "read_sweep",
    "read_walk",
]


class SchemaError(ValueError):
    """Input file does not match the expected qwalk schema."""

    def __init__(self, path: str, line: int, column: int, message: str):
        super().__init__(f"{path}:{line}:{column}: {message}")
        self.path = path
        self.line = line
        self.column = column


def _lines(path: str) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise SchemaError(path, 1, 1, "empty input")
    return lines


def _is_ndjson(first_line: str) -> bool:
    return first_line.lstrip().startswith("{")


def _parse_table(path: str, fields: tuple[str, ...], converters) -> list[tuple]:
    lines = _lines(path)
    rows = []
    if _is_ndjson(lines[0]):
        for ln, line in enumerate(lines, start=1):
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(path, ln, exc.colno, f"invalid JSON: {exc.msg}") from None
            if not isinstance(doc, dict):
                raise SchemaError(path, ln, 1, "expected a JSON object per line")
            values = []
            for field, conv in zip(fields, converters):
                if field not in doc:
                    raise SchemaError(path, ln, 1, f"missing field {field!r}")
                try:
                    values.append(conv(doc[field]))
                except (TypeError, ValueError):
                    raise SchemaError(
                        path, ln, 1, f"field {field!r} has invalid value {doc[field]!r}"
                    ) from None
            rows.append(tuple(values))
        return rows

    header = ",".join(fields)
    if lines[0] != header:
        raise SchemaError(path, 1, 1, f"expected header {header!r}, got {lines[0]!r}")
    for ln, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(fields):
            raise SchemaError(
                path, ln, 1, f"expected {len(fields)} fields, got {len(parts)}"
            )
        values = []
        column = 1
        for field, conv, part in zip(fields, converters, parts):
            try:
                values.append(conv(part))
            except (TypeError, ValueError):
                raise SchemaError(
                    path, ln, column, f"field {field!r} has invalid value {part!r}"
                ) from None
            column += len(part) + 1
        rows.append(tuple(values))
    return rows


def read_walk(path: str) -> dict[str, np.ndarray]:
    """Walk time series: arrays keyed t, ipr, sp, norm."""
    rows = _parse_table(path, WALK_FIELDS, (int, float, float, float))
    if not rows:
        raise SchemaError(path, 2, 1, "no data rows")
    cols = list(zip(*rows))
    return {
        "t": np.asarray(cols[0], dtype=np.int64),
        "ipr": np.asarray(cols[1], dtype=np.float64),
        "sp": np.asarray(cols[2], dtype=np.float64),
        "norm": np.asarray(cols[3], dtype=np.float64),
    }


def read_profile(path: str) -> dict[str, np.ndarray]:
    """Profile dump: arrays keyed t, n, p (one row per site per snapshot)."""
    rows = _parse_table(path, PROFILE_FIELDS, (int, int, float))
    if not rows:
        raise SchemaError(path, 2, 1, "no data rows")
    cols = list(zip(*rows))
    return {
        "t": np.asarray(cols[0], dtype=np.int64),
        "n": np.asarray(cols[1], dtype=np.int64),
        "p": np.asarray(cols[2], dtype=np.float64),
    }


def read_sweep(path: str) -> dict[str, np.ndarray]:
    """Sweep table: arrays keyed theta, chi, ipr_bar, ipr_norm, sp_bar, regime."""
    rows = _parse_table(
        path, SWEEP_FIELDS, (float, float, float, float, float, str)
    )
    if not rows:
        raise SchemaError(path, 2, 1, "no data rows")
    cols = list(zip(*rows))
    return {
        "theta": np.asarray(cols[0], dtype=np.float64),
        "chi": np.asarray(cols[1], dtype=np.float64),
        "ipr_bar": np.asarray(cols[2], dtype=np.float64),
        "ipr_norm": np.asarray(cols[3], dtype=np.float64),
        "sp_bar": np.asarray(cols[4], dtype=np.float64),
        "regime": np.asarray(cols[5], dtype=object),
    }


def read_sidecar(data_path: str) -> dict | None:
    """Load the data file's .meta.json sidecar if present."""
    p = Path(data_path)
    meta = p.with_name(p.stem + ".meta.json")
    if not meta.exists():
        return None
    with open(meta, "r", encoding="utf-8") as fh:
        return json.load(fh)
