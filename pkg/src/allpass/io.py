"""Plain-text formats: single-column CSV series and key/value reports.

Every file starts with ``#`` comment lines carrying the tool version and the
resolved run configuration. Floats are written with 17 significant digits so
values read back bit-for-bit.
"""

from __future__ import annotations

import csv
import json
import sys
from contextlib import contextmanager

import numpy as np

from allpass import __version__
from allpass.errors import DomainError


def fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    if isinstance(v, (list, tuple, np.ndarray)):
        return " ".join(fmt(x) for x in v)
    return str(v)


def header_lines(config: dict) -> list:
    return [f"# allpass {__version__}", "# config: " + json.dumps(config, sort_keys=True, default=str)]


@contextmanager
def open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            yield fh


def write_columns(path, columns: dict, config: dict):
    names = list(columns)
    data = [np.asarray(columns[k]) for k in names]
    with open_out(path) as fh:
        for line in header_lines(config):
            fh.write(line + "\n")
        fh.write(",".join(names) + "\n")
        for row in zip(*data):
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_rows(path, rows: list, config: dict):
    """Write a list of dicts sharing the same keys as CSV."""
    with open_out(path) as fh:
        for line in header_lines(config):
            fh.write(line + "\n")
        if not rows:
            return
        names = list(rows[0])
        fh.write(",".join(names) + "\n")
        for r in rows:
            fh.write(",".join(fmt(r[k]) for k in names) + "\n")


def write_report(path, fields: dict, config: dict):
    with open_out(path) as fh:
        for line in header_lines(config):
            fh.write(line + "\n")
        for k, v in fields.items():
            fh.write(f"{k}: {fmt(v)}\n")


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_series(path, column: int | str = 0) -> np.ndarray:
    """Read one numeric column from a CSV file (``#`` lines and one header row allowed)."""
    fh = sys.stdin if path in (None, "-") else open(path, encoding="utf-8", newline="")
    try:
        rows = [r for r in csv.reader(line for line in fh if line.strip() and not line.startswith("#"))]
    finally:
        if fh is not sys.stdin:
            fh.close()
    if not rows:
        raise DomainError(f"no data in {path}")
    idx = column
    if not all(_is_number(c) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if isinstance(column, str):
            if column not in header:
                raise DomainError(f"column {column!r} not found in {path}")
            idx = header.index(column)
    elif isinstance(column, str):
        raise DomainError(f"{path} has no header row to look up {column!r}")
    try:
        vals = np.array([float(r[idx]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise DomainError(f"malformed numeric data in {path}: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise DomainError(f"non-finite values in {path}")
    return vals


def read_report(path) -> dict:
    """Parse a key/value report back into strings (comment lines skipped)."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") or ":" not in line:
                continue
            k, v = line.rstrip("\n").split(": ", 1)
            out[k] = v
    return out


def parse_floats(value: str) -> list:
    if value == "NA":
        return []
    return [float(t) for t in value.split()]
